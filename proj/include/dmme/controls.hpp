#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "dmme/invariant.hpp"

// Inverse engineering of the control fields f(t), J(t).  Instead of solving
// the coefficient ODE for given controls, an ansatz for (g1, g2) is fixed,
// g6 follows from the conserved sector radius, and the controls are read
// off the ODE:
//   J  = g1'/(2 pi g2),   f = (g1 g1' + g2 g2')/(4 g2 g6),
// with every removable singularity cancelled analytically below.

namespace dmme {

enum class ansatz_variant { cos2, sin3 };
enum class ansatz_orientation { forward, reversed };

struct protocol_params {
  double gamma = 1.0;            // overall invariant scale
  double delta = 0.31622776601683794;  // sqrt(0.1); sin(eta2) at the full-g1 endpoint
  double g2m = 0.02;             // amplitude of the g2 ansatz
  double omega_e = 1.0;          // protocol rate; duration T = pi/(2 omega_e)
  double g3 = 1.0;               // constant odd-sector coefficient
  ansatz_variant variant = ansatz_variant::cos2;
  ansatz_orientation orientation = ansatz_orientation::forward;

  double period() const { return pi / (2 * omega_e); }
};

inline void validate(const protocol_params& p) {
  if (!(p.gamma > 0)) throw validation_error("gamma must be positive");
  if (!(p.delta > 0) || !(p.delta < 1)) throw validation_error("delta must lie in (0,1)");
  if (!(p.g2m > 0)) throw validation_error("g2m must be positive");
  if (!(p.omega_e > 0)) throw validation_error("omega_e must be positive");
  if (!(p.g3 > 0)) throw validation_error("g3 must be positive");
}

// Conserved uv-sector radius (lowest uv eigenvalue is -|lambda3|).
inline double lambda3_of(const protocol_params& p) {
  return -p.gamma / (2 * p.delta * std::sqrt(1 - p.delta * p.delta));
}

// g1 boundary value; the ansatz interpolates between g10 and 0.
inline double g10_of(const protocol_params& p) {
  return (2 * p.delta * p.delta - 1) * p.gamma /
         (2 * p.delta * std::sqrt(1 - p.delta * p.delta));
}

struct boundary_values {
  gvector at_start;
  gvector at_end;
  double lambda3 = 0;
};

inline boundary_values boundary_g(const protocol_params& p) {
  validate(p);
  boundary_values b;
  b.lambda3 = lambda3_of(p);
  double g10 = g10_of(p);
  gvector full{g10, 0, p.g3, 0, 0, p.gamma};
  gvector bare{0, 0, p.g3, 0, 0, -b.lambda3};
  if (p.orientation == ansatz_orientation::forward) {
    b.at_start = full;
    b.at_end = bare;
  } else {
    b.at_start = bare;
    b.at_end = full;
  }
  return b;
}

// Closed-form ansatz trajectory and its exact time derivative.
inline gvector ansatz_g(const protocol_params& p, double t) {
  double l3 = lambda3_of(p);
  double g10 = g10_of(p);
  double w = p.omega_e * t;
  gvector g;
  g.g3 = p.g3;
  g.g2 = p.g2m * std::sin(2 * w);
  double c = std::cos(w), s = std::sin(w);
  switch (p.variant) {
    case ansatz_variant::cos2:
      g.g1 = p.orientation == ansatz_orientation::forward ? g10 * c * c : g10 * s * s;
      break;
    case ansatz_variant::sin3:
      g.g1 = p.orientation == ansatz_orientation::forward ? g10 * c * c * c : g10 * s * s * s;
      break;
  }
  double g6sq = l3 * l3 - g.g1 * g.g1 - g.g2 * g.g2;
  if (g6sq <= 0) throw domain_error("ansatz leaves no room for g6: |(g1,g2)| exceeds |lambda3|");
  g.g6 = std::sqrt(g6sq);
  return g;
}

inline gvector ansatz_g_dot(const protocol_params& p, double t) {
  gvector g = ansatz_g(p, t);
  double g10 = g10_of(p);
  double w = p.omega_e * t;
  double c = std::cos(w), s = std::sin(w);
  gvector d;
  d.g2 = 2 * p.omega_e * p.g2m * std::cos(2 * w);
  switch (p.variant) {
    case ansatz_variant::cos2:
      d.g1 = p.orientation == ansatz_orientation::forward
                 ? -p.omega_e * g10 * std::sin(2 * w)
                 : p.omega_e * g10 * std::sin(2 * w);
      break;
    case ansatz_variant::sin3:
      d.g1 = p.orientation == ansatz_orientation::forward
                 ? -3 * p.omega_e * g10 * c * c * s
                 : 3 * p.omega_e * g10 * s * s * c;
      break;
  }
  d.g6 = -(g.g1 * d.g1 + g.g2 * d.g2) / g.g6;
  return d;
}

struct control_protocol {
  protocol_params params;
  double lambda3 = 0;
  double g10 = 0;
  double period = 0;
  std::function<double(double)> f;
  std::function<double(double)> J;
  std::function<gvector(double)> g;      // closed-form ansatz
  std::function<gvector(double)> g_dot;  // analytic derivative
};

// Synthesize the control fields for the requested ansatz.  All removable
// sin(2 w t) factors are cancelled before evaluation, so f and J are finite
// on the full closed interval [0, T].
inline control_protocol control_fields(const protocol_params& p) {
  validate(p);
  control_protocol cp;
  cp.params = p;
  cp.lambda3 = lambda3_of(p);
  cp.g10 = g10_of(p);
  cp.period = p.period();
  const double g10 = cp.g10, g2m = p.g2m, we = p.omega_e;
  const bool fwd = p.orientation == ansatz_orientation::forward;
  const protocol_params pc = p;

  auto g6_at = [pc](double t) { return ansatz_g(pc, t).g6; };

  if (p.variant == ansatz_variant::cos2) {
    double Jconst = fwd ? -g10 * we / (2 * pi * g2m) : g10 * we / (2 * pi * g2m);
    cp.J = [Jconst](double) { return Jconst; };
    if (fwd) {
      cp.f = [=](double t) {
        double w = we * t, c = std::cos(w);
        return we * (2 * g2m * g2m * std::cos(2 * w) - g10 * g10 * c * c) /
               (4 * g2m * g6_at(t));
      };
    } else {
      cp.f = [=](double t) {
        double w = we * t, s = std::sin(w);
        return we * (g10 * g10 * s * s + 2 * g2m * g2m * std::cos(2 * w)) /
               (4 * g2m * g6_at(t));
      };
    }
  } else {  // sin3
    if (fwd) {
      cp.J = [=](double t) { return -3 * g10 * we * std::cos(we * t) / (4 * pi * g2m); };
      cp.f = [=](double t) {
        double w = we * t, c = std::cos(w);
        return we * (4 * g2m * g2m * std::cos(2 * w) - 3 * g10 * g10 * c * c * c * c) /
               (8 * g2m * g6_at(t));
      };
    } else {
      cp.J = [=](double t) { return 3 * g10 * we * std::sin(we * t) / (4 * pi * g2m); };
      cp.f = [=](double t) {
        double w = we * t, s = std::sin(w);
        return we * (3 * g10 * g10 * s * s * s * s + 4 * g2m * g2m * std::cos(2 * w)) /
               (8 * g2m * g6_at(t));
      };
    }
  }
  cp.g = [pc](double t) { return ansatz_g(pc, t); };
  cp.g_dot = [pc](double t) { return ansatz_g_dot(pc, t); };
  return cp;
}

inline control_protocol control_fields_sin3(protocol_params p) {
  p.variant = ansatz_variant::sin3;
  return control_fields(p);
}

// Constant-control protocol (f, J fixed).  The matching stationary
// invariant has (g1, g6) parallel to the uv Hamiltonian axis.
inline control_protocol constant_fields(double f, double J, double g3 = 1.0) {
  control_protocol cp;
  cp.lambda3 = -std::sqrt(4 * f * f + pi * pi * J * J);
  if (cp.lambda3 == 0) throw validation_error("constant protocol needs f or J nonzero");
  cp.g10 = 2 * f;
  cp.period = pi / 2;
  cp.f = [f](double) { return f; };
  cp.J = [J](double) { return J; };
  gvector g{2 * f, 0, g3, 0, 0, pi * J};
  cp.g = [g](double) { return g; };
  cp.g_dot = [](double) { return gvector{}; };
  return cp;
}

struct admissibility_report {
  bool ok = false;
  double lambda3_sq = 0;
  double max_g12_sq = 0;   // max over t of g1^2 + g2^2
  double margin = 0;       // lambda3^2 - max_g12_sq
  double min_g6 = 0;
};

// The ansatz is realizable iff g1^2 + g2^2 stays below lambda3^2 on [0, T]
// (g6 real and nonzero, f finite).  Dense deterministic scan.
inline admissibility_report admissibility(const protocol_params& p, int samples = 4001) {
  validate(p);
  admissibility_report rep;
  double l3 = lambda3_of(p);
  rep.lambda3_sq = l3 * l3;
  double g10 = g10_of(p);
  double maxm = 0;
  for (int i = 0; i < samples; ++i) {
    double t = p.period() * i / (samples - 1);
    double w = p.omega_e * t;
    double c = std::cos(w), s = std::sin(w);
    double base = p.orientation == ansatz_orientation::forward ? c : s;
    double g1 = p.variant == ansatz_variant::cos2 ? g10 * base * base
                                                  : g10 * base * base * base;
    double g2 = p.g2m * std::sin(2 * w);
    maxm = std::max(maxm, g1 * g1 + g2 * g2);
  }
  rep.max_g12_sq = maxm;
  rep.margin = rep.lambda3_sq - maxm;
  rep.ok = rep.margin > 0;
  rep.min_g6 = rep.ok ? std::sqrt(rep.margin) : 0.0;
  return rep;
}

// Stationary-control reference expressions (constant f, J; Omega is the
// uv-sector Rabi radius).
inline double adiabatic_omega(double f, double J) {
  return std::sqrt(pi * pi * J * J + 4 * f * f);
}

inline double adiabatic_eta2(double f, double J) {
  double om = adiabatic_omega(f, J);
  if (om == 0) throw domain_error("eta2 undefined at f = J = 0");
  return std::acos(std::sqrt(0.5 * (om - 2 * f) / om));
}

struct adiabatic_xi_values {
  double xi23 = 0, xi24 = 0;
};

inline adiabatic_xi_values adiabatic_xi(double f, double J) {
  double e = adiabatic_eta2(f, J);
  adiabatic_xi_values v;
  v.xi23 = std::sqrt(2.0) * std::abs(std::cos(e) - std::sin(e));
  v.xi24 = std::sqrt(2.0) * (std::cos(e) + std::sin(e));
  return v;
}

struct adiabatic_alpha_values {
  double alpha23 = 0, alpha24 = 0;
};

inline adiabatic_alpha_values adiabatic_alphas(double f, double J) {
  double om = adiabatic_omega(f, J);
  return {-(om + pi * J), om - pi * J};
}

}  // namespace dmme
