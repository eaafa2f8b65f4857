#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "dmme/algebra.hpp"
#include "dmme/rk45.hpp"

// Dynamical invariant for the driven two-qubit Hamiltonian.  The invariant
// is parametrized by six real coefficients over the sector generators,
//   I = g1*G_uv1 - g2*G_uv2 + g6*G_uv3 + g3*G_ab1 + g4*G_ab2 - g5*G_ab3,
// and stays an invariant iff g obeys the linear ODE implemented in g_rhs.

namespace dmme {

struct gvector {
  double g1 = 0, g2 = 0, g3 = 0, g4 = 0, g5 = 0, g6 = 0;
};

inline gvector g_rhs(const gvector& g, double f, double J) {
  gvector d;
  d.g1 = 2 * pi * J * g.g2;
  d.g2 = 4 * f * g.g6 - 2 * pi * J * g.g1;
  d.g3 = 0;
  d.g4 = 2 * pi * J * g.g5;
  d.g5 = -2 * pi * J * g.g4;
  d.g6 = -4 * f * g.g2;
  return d;
}

inline Mat4 invariant_matrix(const gvector& g) {
  auto G = sector_generators();
  return g.g1 * G[uv1] - g.g2 * G[uv2] + g.g6 * G[uv3] +
         g.g3 * G[ab1] + g.g4 * G[ab2] - g.g5 * G[ab3];
}

// Pointwise defect of the invariance condition dI/dt = -i[H, I], with dI/dt
// taken from g_rhs.  Zero (to rounding) for any g, f, J by construction of
// the ODE; exposed as a property check.
inline double invariance_residual(const gvector& g, double f, double J) {
  gvector d = g_rhs(g, f, J);
  Mat4 idot = invariant_matrix(d);
  Mat4 rhs = -iu * commutator(hamiltonian(f, J), invariant_matrix(g));
  return (idot - rhs).cwiseAbs().maxCoeff();
}

struct lri_angles {
  double eta1 = 0, zeta1 = 0, eta2 = 0, zeta2 = 0;
};

// Spherical angles of the two sector Bloch vectors:
//   cos(2*eta2) = -g1/r,  e^{i zeta2} = (g6 - i g2)/|..| (uv sector)
//   cos(2*eta1) = -g4/r1, e^{i zeta1} = (g3 - i g5)/|..| (ab sector)
inline lri_angles invariant_angles(const gvector& g) {
  lri_angles a;
  double q1 = std::hypot(g.g3, g.g5);
  double q2 = std::hypot(g.g2, g.g6);
  a.eta1 = 0.5 * std::atan2(q1, -g.g4);
  a.eta2 = 0.5 * std::atan2(q2, -g.g1);
  a.zeta1 = (q1 > 0) ? std::atan2(-g.g5, g.g3) : 0.0;
  a.zeta2 = (q2 > 0) ? std::atan2(-g.g2, g.g6) : 0.0;
  return a;
}

// Eigen-decomposition of the invariant in closed form.  Eigenvalue order is
// fixed: {-r1, +r1, -r, +r} with r1 = |(g3,g4,g5)|, r = |(g1,g2,g6)|.
// States 1,2 live in span{|01>,|10>}, states 3,4 in span{|00>,|11>}.
// All amplitudes are built from cancellation-free rational forms; the only
// branch is the phase convention e^{i zeta} := 1 when the off-diagonal
// sector coefficient vanishes.
struct lri_eigensystem {
  std::array<Vec4, 4> states;
  std::array<double, 4> eigenvalues;
  double r1 = 0, r = 0;      // sector radii
  double s1 = 0, c1 = 0;     // sin/cos eta1
  double s2 = 0, c2 = 0;     // sin/cos eta2
  cplx e1{1, 0}, e2{1, 0};   // e^{i zeta1}, e^{i zeta2}
  double q1 = 0, q2 = 0;     // |(g3,g5)|, |(g2,g6)|
};

inline lri_eigensystem eigensystem(const gvector& g) {
  lri_eigensystem es;
  es.r1 = std::sqrt(g.g3 * g.g3 + g.g4 * g.g4 + g.g5 * g.g5);
  es.r = std::sqrt(g.g1 * g.g1 + g.g2 * g.g2 + g.g6 * g.g6);
  if (es.r1 < 1e-12 || es.r < 1e-12) {
    throw domain_error("invariant spectrum is degenerate (sector radius ~ 0)");
  }
  es.q1 = std::hypot(g.g3, g.g5);
  es.q2 = std::hypot(g.g2, g.g6);
  es.s1 = std::sqrt((es.r1 + g.g4) / (2 * es.r1));
  es.c1 = std::sqrt((es.r1 - g.g4) / (2 * es.r1));
  es.s2 = std::sqrt((es.r + g.g1) / (2 * es.r));
  es.c2 = std::sqrt((es.r - g.g1) / (2 * es.r));
  es.e1 = es.q1 > 1e-15 * es.r1 ? cplx(g.g3, -g.g5) / es.q1 : cplx(1, 0);
  es.e2 = es.q2 > 1e-15 * es.r ? cplx(g.g6, -g.g2) / es.q2 : cplx(1, 0);

  for (auto& v : es.states) v = Vec4::Zero();
  es.states[0](1) = -es.c1 * es.e1;  // eigenvalue -r1
  es.states[0](2) = es.s1;
  es.states[1](1) = es.s1 * es.e1;   // eigenvalue +r1
  es.states[1](2) = es.c1;
  es.states[2](0) = -es.c2 * es.e2;  // eigenvalue -r
  es.states[2](3) = es.s2;
  es.states[3](0) = es.s2 * es.e2;   // eigenvalue +r
  es.states[3](3) = es.c2;
  es.eigenvalues = {-es.r1, es.r1, -es.r, es.r};
  return es;
}

struct angle_rates {
  double eta1 = 0, zeta1 = 0, eta2 = 0, zeta2 = 0;
};

inline angle_rates invariant_angle_rates(const gvector& g, const gvector& gdot) {
  angle_rates rt;
  double q1sq = g.g3 * g.g3 + g.g5 * g.g5;
  double q2sq = g.g2 * g.g2 + g.g6 * g.g6;
  if (q1sq > 1e-30) {
    rt.eta1 = gdot.g4 / (2 * std::sqrt(q1sq));
    rt.zeta1 = (-gdot.g5 * g.g3 + g.g5 * gdot.g3) / q1sq;
  }
  if (q2sq > 1e-30) {
    rt.eta2 = gdot.g1 / (2 * std::sqrt(q2sq));
    rt.zeta2 = (-gdot.g2 * g.g6 + g.g2 * gdot.g6) / q2sq;
  }
  return rt;
}

// Lewis-Riesenfeld phase rates for the four invariant eigenstates,
// d(alpha_n)/dt = <psi_n| i d/dt - H |psi_n>, written rationally in g:
//   sin(2 eta1) cos(zeta1) = g3/r1,  sin(2 eta2) cos(zeta2) = g6/r,
//   cos(2 eta2) = -g1/r, c^2/s^2 = (r -+ g1)/(2r)  (and the ab analogues).
struct phase_rates {
  std::array<double, 4> alpha_dot{};
  angle_rates angles;
};

inline phase_rates lr_phase_rates(const gvector& g, double f, double J) {
  gvector gd = g_rhs(g, f, J);
  phase_rates out;
  out.angles = invariant_angle_rates(g, gd);
  double r1 = std::sqrt(g.g3 * g.g3 + g.g4 * g.g4 + g.g5 * g.g5);
  double r = std::sqrt(g.g1 * g.g1 + g.g2 * g.g2 + g.g6 * g.g6);
  if (r1 < 1e-12 || r < 1e-12) {
    throw domain_error("phase rates undefined for degenerate invariant");
  }
  double pj = pi * J;
  out.alpha_dot[0] = -out.angles.zeta1 * (r1 - g.g4) / (2 * r1) + pj * g.g3 / r1;
  out.alpha_dot[1] = -out.angles.zeta1 * (r1 + g.g4) / (2 * r1) - pj * g.g3 / r1;
  out.alpha_dot[2] = -out.angles.zeta2 * (r - g.g1) / (2 * r) + pj * g.g6 / r + 2 * f * g.g1 / r;
  out.alpha_dot[3] = -out.angles.zeta2 * (r + g.g1) / (2 * r) - pj * g.g6 / r - 2 * f * g.g1 / r;
  return out;
}

// Exact propagator assembled from the invariant eigenbasis,
// U(t) = sum_n e^{i alpha_n(t)} |psi_n(t)><psi_n(0)|.
inline Mat4 propagator(const lri_eigensystem& at_t, const lri_eigensystem& at_0,
                       const std::array<double, 4>& alpha) {
  Mat4 u = Mat4::Zero();
  for (int n = 0; n < 4; ++n) {
    u += std::exp(iu * alpha[n]) * at_t.states[n] * at_0.states[n].adjoint();
  }
  return u;
}

// Integrate the invariant coefficients between two times under given
// control fields.
inline gvector integrate_g(const std::function<double(double)>& f,
                           const std::function<double(double)>& J,
                           const gvector& g0, double t0, double t1,
                           const rk_options& opt = {}) {
  std::array<double, 6> y = {g0.g1, g0.g2, g0.g3, g0.g4, g0.g5, g0.g6};
  auto rhs = [&](double t, const std::array<double, 6>& s, std::array<double, 6>& d) {
    gvector gg{s[0], s[1], s[2], s[3], s[4], s[5]};
    gvector gd = g_rhs(gg, f(t), J(t));
    d = {gd.g1, gd.g2, gd.g3, gd.g4, gd.g5, gd.g6};
  };
  rk45_integrate<6>(rhs, t0, t1, y, opt);
  return gvector{y[0], y[1], y[2], y[3], y[4], y[5]};
}

}  // namespace dmme
