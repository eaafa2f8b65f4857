#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "dmme/bath.hpp"
#include "dmme/controls.hpp"
#include "dmme/invariant.hpp"
#include "dmme/rk45.hpp"

// Markovian master equation driven along the invariant eigenbasis.  The
// dissipator couples state 2 to states 3 and 4 only: both protocols keep
// g4 = g5 = 0, which closes the 1<->3 and 1<->4 channels exactly (their
// amplitudes carry the vanishing odd-sector factor).

namespace dmme {

enum class picture { schroedinger, interaction };

// Coherent part plus jump channels of the generator at one instant, in a
// fixed picture.
struct instant_generator {
  Mat4 h = Mat4::Zero();
  std::array<std::pair<double, Mat4>, 4> channels{};
  int n_channels = 0;
};

inline Mat4 lamb_shift_hamiltonian(const lri_eigensystem& basis,
                                   const channel_rates_result& cr) {
  Mat4 h = Mat4::Zero();
  if (cr.shift32 != 0 && !cr.dead32) {
    h += cr.shift32 * cr.xi32_sq * basis.states[1] * basis.states[1].adjoint();
  }
  if (cr.shift24 != 0 && !cr.dead24) {
    h += cr.shift24 * cr.xi24_sq * basis.states[3] * basis.states[3].adjoint();
  }
  return h;
}

// Jump operators with their rates.  Emission carries (N+1), absorption N;
// a reversed channel (negative signed frequency) swaps the two directions.
inline void append_channels(instant_generator& gen, const lri_eigensystem& basis,
                            const channel_rates_result& cr) {
  auto add = [&](double rate, const Vec4& to, const Vec4& from) {
    if (rate <= 0) return;
    gen.channels[gen.n_channels++] = {rate, Mat4(to * from.adjoint())};
  };
  if (!cr.dead32) {
    const Vec4& lower = cr.reversed32 ? basis.states[1] : basis.states[2];
    const Vec4& upper = cr.reversed32 ? basis.states[2] : basis.states[1];
    add(cr.gamma32 * (cr.n32 + 1), lower, upper);
    add(cr.gamma32 * cr.n32, upper, lower);
  }
  if (!cr.dead24) {
    const Vec4& lower = cr.reversed24 ? basis.states[3] : basis.states[1];
    const Vec4& upper = cr.reversed24 ? basis.states[1] : basis.states[3];
    add(cr.gamma24 * (cr.n24 + 1), lower, upper);
    add(cr.gamma24 * cr.n24, upper, lower);
  }
}

// Assemble the instant generator.  In the Schroedinger picture `basis` must
// hold the eigensystem at time t; in the interaction picture the frozen
// t = 0 eigensystem (the jump operators are then constant).
inline instant_generator instant_terms(const lri_eigensystem& basis, double f,
                                       double J, const channel_rates_result& cr,
                                       picture pic, bool closed_system) {
  instant_generator gen;
  if (pic == picture::schroedinger) gen.h = hamiltonian(f, J);
  if (!closed_system) {
    gen.h += lamb_shift_hamiltonian(basis, cr);
    append_channels(gen, basis, cr);
  }
  return gen;
}

// 16x16 matrix representation over column-major vec(rho).
inline Mat16 build_generator(const instant_generator& gen) {
  Mat16 l = -iu * (spre(gen.h) - spost(gen.h));
  for (int k = 0; k < gen.n_channels; ++k) {
    double rate = gen.channels[k].first;
    if (rate < 0) throw domain_error("inconsistent channel: negative rate supplied");
    const Mat4& f = gen.channels[k].second;
    Mat4 ff = f.adjoint() * f;
    l += rate * (kron4(f.conjugate(), f) - 0.5 * spre(ff) - 0.5 * spost(ff));
  }
  return l;
}

// Apply the generator directly on a 4x4 state (hot path of the evolver).
inline Mat4 apply_generator(const instant_generator& gen, const Mat4& rho) {
  Mat4 out = -iu * (gen.h * rho - rho * gen.h);
  for (int k = 0; k < gen.n_channels; ++k) {
    double rate = gen.channels[k].first;
    const Mat4& f = gen.channels[k].second;
    Mat4 ff = f.adjoint() * f;
    out += rate * (f * rho * f.adjoint() - 0.5 * (ff * rho + rho * ff));
  }
  return out;
}

enum class transform_direction { to_interaction, to_schroedinger };

inline Mat4 picture_transform(const Mat4& rho, const Mat4& u, transform_direction dir) {
  double defect = (u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff();
  if (defect > 1e-8) throw domain_error("picture transform needs a unitary matrix");
  return dir == transform_direction::to_interaction ? Mat4(u.adjoint() * rho * u)
                                                    : Mat4(u * rho * u.adjoint());
}

struct evolve_options {
  picture pic = picture::schroedinger;
  bool closed_system = false;
  int grid = 1000;        // output intervals; points = grid + 1
  double t_final = -1;    // < 0: one protocol period
  double rtol = 1e-10;
  double atol = 1e-12;
};

struct trajectory_point {
  double t = 0;
  Mat4 rho;                       // state in the evolution picture
  double fidelity = 0;            // <target|rho_s|target>
  double p3 = 0;                  // instantaneous <psi3(t)|rho_s|psi3(t)>
  double f = 0, J = 0;
  double gamma32 = 0, gamma24 = 0;
  double alpha32 = 0, alpha24 = 0;
  double xi32_sq = 0, xi24_sq = 0;
  double trace_defect = 0, min_eig = 0;
  std::array<double, 4> alpha{};  // co-integrated LR phases
  double phi23 = 0, phi24 = 0;    // co-integrated coupling phases
  double theta32 = 0, theta24 = 0;
  gvector g;
};

struct trajectory {
  std::vector<trajectory_point> points;
  picture pic = picture::schroedinger;
  bool reversal_seen = false;
  double max_trace_defect = 0;
  double min_eigenvalue = 1;
};

namespace detail {

// 44-component real packing: vec(rho) re/im pairs (32), g (6), LR phases
// alpha_1..4 (4), coupling phases phi23, phi24 (2).
using evolve_state = std::array<double, 44>;

inline void pack_rho(const Mat4& m, evolve_state& y) {
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      int k = 4 * j + i;
      y[2 * k] = m(i, j).real();
      y[2 * k + 1] = m(i, j).imag();
    }
}

inline Mat4 unpack_rho(const evolve_state& y) {
  Mat4 m;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      int k = 4 * j + i;
      m(i, j) = cplx(y[2 * k], y[2 * k + 1]);
    }
  return m;
}

inline gvector unpack_g(const evolve_state& y) {
  return gvector{y[32], y[33], y[34], y[35], y[36], y[37]};
}

}  // namespace detail

// Drive a state through the protocol while co-integrating every phase and
// coefficient on the same adaptive stepper.  rho0 is taken at t = 0, where
// the two pictures agree.
inline trajectory evolve(const control_protocol& proto, const bath_params& bath,
                         const Mat4& rho0, const evolve_options& opt = {}) {
  if (bath.include_lamb_shift && bath.temperature != 0 && !opt.closed_system) {
    throw unsupported_error("level-shift correction is implemented at zero temperature only");
  }
  if (opt.grid < 1) throw validation_error("grid must be at least 1");
  double t_final = opt.t_final >= 0 ? opt.t_final : proto.period;

  gvector g0 = proto.g(0.0);
  lri_eigensystem es0 = eigensystem(g0);
  channel_amplitudes amp0 = xi_phi(es0);

  trajectory out;
  out.pic = opt.pic;
  bool reversal = false;

  auto rhs = [&](double t, const detail::evolve_state& y, detail::evolve_state& dy) {
    gvector g = detail::unpack_g(y);
    double f = proto.f(t), J = proto.J(t);
    gvector gd = g_rhs(g, f, J);
    auto ifv = instantaneous_frequencies(g, f, J);
    channel_rates_result cr;
    if (!opt.closed_system) {
      cr = channel_rates(g, f, J, bath);
      if ((cr.reversed32 && !cr.dead32) || (cr.reversed24 && !cr.dead24)) reversal = true;
    }
    lri_eigensystem basis =
        opt.pic == picture::schroedinger ? eigensystem(g) : es0;
    instant_generator gen = instant_terms(basis, f, J, cr, opt.pic, opt.closed_system);
    Mat4 rho = detail::unpack_rho(y);
    Mat4 rd = apply_generator(gen, rho);
    detail::pack_rho(rd, dy);
    dy[32] = gd.g1; dy[33] = gd.g2; dy[34] = gd.g3;
    dy[35] = gd.g4; dy[36] = gd.g5; dy[37] = gd.g6;
    for (int n = 0; n < 4; ++n) dy[38 + n] = ifv.alpha_dot[n];
    dy[42] = ifv.phi23_dot;
    dy[43] = ifv.phi24_dot;
  };

  detail::evolve_state y{};
  detail::pack_rho(rho0, y);
  y[32] = g0.g1; y[33] = g0.g2; y[34] = g0.g3;
  y[35] = g0.g4; y[36] = g0.g5; y[37] = g0.g6;
  // phases start at their pointwise values so the co-integrated Arg matches
  // the t = 0 matrix elements exactly
  y[42] = amp0.xi23 > 0 ? amp0.phi23 : 0.0;
  y[43] = amp0.xi24 > 0 ? amp0.phi24 : 0.0;

  Vec4 tgt = target_state();
  out.points.reserve(opt.grid + 1);
  rk_options ropt;
  ropt.rtol = opt.rtol;
  ropt.atol = opt.atol;

  auto record = [&](double t, const detail::evolve_state& s) {
    trajectory_point p;
    p.t = t;
    p.rho = detail::unpack_rho(s);
    p.g = detail::unpack_g(s);
    p.f = proto.f(t);
    p.J = proto.J(t);
    for (int n = 0; n < 4; ++n) p.alpha[n] = s[38 + n];
    p.phi23 = s[42];
    p.phi24 = s[43];
    p.theta32 = p.alpha[1] - p.alpha[2] - p.phi23;
    p.theta24 = p.alpha[3] - p.alpha[1] + p.phi24;

    auto ifv = instantaneous_frequencies(p.g, p.f, p.J);
    p.alpha32 = ifv.alpha32;
    p.alpha24 = ifv.alpha24;
    p.xi32_sq = ifv.xi23_sq;
    p.xi24_sq = ifv.xi24_sq;
    if (!opt.closed_system) {
      channel_rates_result cr = channel_rates(p.g, p.f, p.J, bath);
      p.gamma32 = cr.gamma32;
      p.gamma24 = cr.gamma24;
    }

    lri_eigensystem es_t = eigensystem(p.g);
    Mat4 rho_s = p.rho;
    if (opt.pic == picture::interaction) {
      Mat4 u = propagator(es_t, es0, p.alpha);
      rho_s = u * p.rho * u.adjoint();
    }
    p.fidelity = fidelity(rho_s, tgt);
    p.p3 = fidelity(rho_s, Vec4(es_t.states[2]));
    density_report dr = check_density(p.rho, 1e-6);
    p.trace_defect = dr.trace_defect;
    p.min_eig = dr.min_eigenvalue;
    out.max_trace_defect = std::max(out.max_trace_defect, p.trace_defect);
    out.min_eigenvalue = std::min(out.min_eigenvalue, p.min_eig);
    out.points.push_back(std::move(p));
  };

  record(0.0, y);
  double h_carry = 0.0;
  for (int k = 1; k <= opt.grid; ++k) {
    double ta = t_final * (k - 1) / opt.grid;
    double tb = k == opt.grid ? t_final : t_final * k / opt.grid;
    ropt.h_init = h_carry;
    h_carry = rk45_integrate<44>(rhs, ta, tb, y, ropt);
    record(tb, y);
  }
  out.reversal_seen = reversal;
  return out;
}

// ---------------------------------------------------------------------------
// Stationary problem for constant controls.

struct steady_state_report {
  Mat4 rho = Mat4::Zero();        // stationary state over the psi_n(0) basis
  int kernel_dim = 0;             // null-space dimension of the full 16x16 generator
  int sector_kernel_dim = 0;      // null-space dimension within span{2,3,4}
  double residual = 0;            // max |L vec(rho)|
  std::vector<Mat4> kernel_basis; // full null-space basis (matrices)
};

// Null space of the generator.  The full kernel is degenerate (state 1 is
// decoupled), so the physical stationary state is picked as the unique
// trace-one kernel element supported on span{psi2, psi3, psi4}.
inline steady_state_report steady_state(const Mat16& l,
                                        const std::array<Vec4, 4>& basis) {
  double tp = (vectorize(Mat4::Identity()).adjoint() * l).cwiseAbs().maxCoeff();
  if (tp > 1e-8) throw domain_error("generator is not trace preserving");

  steady_state_report rep;
  Eigen::JacobiSVD<Mat16> svd(l, Eigen::ComputeFullV);
  double smax = svd.singularValues()(0);
  double tol = std::max(1e-10, 1e-12 * smax);
  for (int k = 0; k < 16; ++k) {
    if (svd.singularValues()(k) <= tol) {
      ++rep.kernel_dim;
      rep.kernel_basis.push_back(unvectorize(svd.matrixV().col(k)));
    }
  }

  // restriction to the 9-dimensional sector span{|b_i><b_j|, i,j in {2,3,4}}
  Eigen::Matrix<cplx, 9, 9> l9;
  std::array<Mat4, 9> e;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      e[3 * a + b] = basis[a + 1] * basis[b + 1].adjoint();
  for (int col = 0; col < 9; ++col) {
    Mat4 image = unvectorize(l * vectorize(e[col]));
    for (int row = 0; row < 9; ++row) {
      l9(row, col) = (e[row].adjoint() * image).trace();
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 9, 9>> svd9(l9, Eigen::ComputeFullV);
  double smax9 = svd9.singularValues()(0);
  double tol9 = std::max(1e-10, 1e-12 * smax9);
  for (int k = 0; k < 9; ++k) {
    if (svd9.singularValues()(k) <= tol9) ++rep.sector_kernel_dim;
  }
  if (rep.sector_kernel_dim < 1) {
    throw consistency_error("no stationary state found in the coupled sector");
  }

  Mat4 m = Mat4::Zero();
  for (int k = 0; k < 9; ++k) m += svd9.matrixV()(k, 8) * e[k];
  m = 0.5 * (m + m.adjoint());
  cplx tr = m.trace();
  if (std::abs(tr) < 1e-12) throw consistency_error("stationary kernel element is traceless");
  rep.rho = m / tr;
  rep.residual = (l * vectorize(rep.rho)).cwiseAbs().maxCoeff();
  return rep;
}

// Closed-form stationary populations over {psi2, psi3, psi4} for constant
// controls, as functions of the two thermal occupations.
struct steady_populations {
  double p2 = 0, p3 = 0, p4 = 0;
};

inline steady_populations adiabatic_steady_populations(double n32, double n24) {
  if (n32 < 0 || n24 < 0) throw validation_error("occupation numbers must be nonnegative");
  double d = 3 * n32 * n24 + 2 * n32 + n24 + 1;
  return {n32 * (n24 + 1) / d, (n32 + 1) * (n24 + 1) / d, n32 * n24 / d};
}

// Generator for constant controls in the interaction picture.  Occupation
// overrides (>= 0) replace the thermal values; -1 keeps planck_n(alpha, T).
struct adiabatic_generator {
  Mat16 liouvillian = Mat16::Zero();
  std::array<Vec4, 4> basis;
  channel_rates_result rates;
  instant_generator terms;
};

inline adiabatic_generator build_adiabatic_generator(double f, double J,
                                                     const bath_params& bath,
                                                     double n32_override = -1,
                                                     double n24_override = -1) {
  control_protocol cp = constant_fields(f, J);
  gvector g = cp.g(0);
  lri_eigensystem es = eigensystem(g);
  adiabatic_generator out;
  out.basis = es.states;
  out.rates = channel_rates(g, f, J, bath);
  if (n32_override >= 0) out.rates.n32 = n32_override;
  if (n24_override >= 0) out.rates.n24 = n24_override;
  out.terms = instant_terms(es, f, J, out.rates, picture::interaction, false);
  out.liouvillian = build_generator(out.terms);
  return out;
}

// ---------------------------------------------------------------------------
// Dark-state certification.

struct dark_state_report {
  double jump_defect = 0;        // max_k || F_k phi - c_k phi ||
  double drift_defect = 0;       // || (-iH + sum_k r_k F_k^dag F_k) phi - lambda phi ||
  double rate_consistency = 0;   // | sum r_k |c_k|^2 - Re lambda |
  double half_drift_defect = 0;  // same with -(1/2) sum r_k F_k^dag F_k
  double half_consistency = 0;   // | sum r_k |c_k|^2 + 2 Re lambda' |
  bool dark = false;
};

// A state is dark iff it is a joint eigenvector of every jump operator and
// of the drift, with eigenvalues tied by the stated rate sums.  Both the
// plus-sign drift convention and the -(1/2) generator drift are checked.
inline dark_state_report dark_state_check(const Vec4& phi_in,
                                          const adiabatic_generator& gen) {
  Vec4 phi = phi_in.normalized();
  dark_state_report rep;
  Mat4 sum_ff = Mat4::Zero();
  double sum_rc = 0;
  for (int k = 0; k < gen.terms.n_channels; ++k) {
    double r = gen.terms.channels[k].first;
    const Mat4& fop = gen.terms.channels[k].second;
    Vec4 v = fop * phi;
    cplx c = phi.dot(v);
    rep.jump_defect = std::max(rep.jump_defect, (v - c * phi).norm());
    sum_ff += r * (fop.adjoint() * fop);
    sum_rc += r * std::norm(c);
  }
  Mat4 hls = gen.terms.h;  // interaction picture: coherent part is the shift alone
  {
    Mat4 k = -iu * hls + sum_ff;
    Vec4 w = k * phi;
    cplx lam = phi.dot(w);
    rep.drift_defect = (w - lam * phi).norm();
    rep.rate_consistency = std::abs(sum_rc - lam.real());
  }
  {
    Mat4 k = -iu * hls - 0.5 * sum_ff;
    Vec4 w = k * phi;
    cplx lam = phi.dot(w);
    rep.half_drift_defect = (w - lam * phi).norm();
    rep.half_consistency = std::abs(sum_rc + 2 * lam.real());
  }
  rep.dark = rep.jump_defect <= 1e-10 && rep.drift_defect <= 1e-10 &&
             rep.rate_consistency <= 1e-10 && rep.half_drift_defect <= 1e-10 &&
             rep.half_consistency <= 1e-10;
  return rep;
}

// ---------------------------------------------------------------------------
// Decoherence-free structure probes.

struct dfs_report {
  double p1_drift = 0;             // driven protocol, random state: shift of the psi1 population
  double psi1_fidelity_loss = 0;   // driven protocol started in psi1(0)
  double subspace_leakage = 0;     // J = 0 constant protocol from |00>
  double target_stationarity = 0;  // f = 0 constant protocol from the target
  bool ok = false;
};

inline dfs_report dfs_check(const control_protocol& proto, const bath_params& bath) {
  dfs_report rep;
  evolve_options opt;
  opt.grid = 200;

  auto psi1_population = [](const trajectory_point& p) {
    lri_eigensystem es = eigensystem(p.g);
    return std::real(es.states[0].dot(p.rho * es.states[0]));
  };

  {
    std::mt19937 rng(20260816);
    std::normal_distribution<double> nd;
    Mat4 gmat;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) gmat(i, j) = cplx(nd(rng), nd(rng));
    Mat4 rho0 = gmat * gmat.adjoint();
    rho0 /= rho0.trace().real();
    trajectory tr = evolve(proto, bath, rho0, opt);
    double p0 = psi1_population(tr.points.front());
    for (const auto& p : tr.points) {
      rep.p1_drift = std::max(rep.p1_drift, std::abs(psi1_population(p) - p0));
    }
  }
  {
    lri_eigensystem es0 = eigensystem(proto.g(0));
    Mat4 rho0 = es0.states[0] * es0.states[0].adjoint();
    trajectory tr = evolve(proto, bath, rho0, opt);
    for (const auto& p : tr.points) {
      rep.psi1_fidelity_loss =
          std::max(rep.psi1_fidelity_loss, 1.0 - psi1_population(p));
    }
  }
  {
    control_protocol cp = constant_fields(-1.0, 0.0);
    trajectory tr = evolve(cp, bath, ket(0) * ket(0).adjoint(), opt);
    lri_eigensystem es = eigensystem(cp.g(0));
    for (const auto& p : tr.points) {
      double inside = std::real(es.states[0].dot(p.rho * es.states[0])) +
                      std::real(es.states[2].dot(p.rho * es.states[2]));
      rep.subspace_leakage = std::max(rep.subspace_leakage, 1.0 - inside);
    }
  }
  {
    control_protocol cp = constant_fields(0.0, 1.0);
    Vec4 tgt = target_state();
    trajectory tr = evolve(cp, bath, tgt * tgt.adjoint(), opt);
    for (const auto& p : tr.points) {
      rep.target_stationarity =
          std::max(rep.target_stationarity, 1.0 - fidelity(p.rho, tgt));
    }
  }
  rep.ok = rep.p1_drift <= 1e-8 && rep.psi1_fidelity_loss <= 1e-8 &&
           rep.subspace_leakage <= 1e-8 && rep.target_stationarity <= 1e-8;
  return rep;
}

}  // namespace dmme
