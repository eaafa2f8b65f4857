#pragma once

#include <array>
#include <cmath>

#include "dmme/invariant.hpp"
#include "dmme/special.hpp"

// Reservoir model and the time-dependent decay channels it opens between
// invariant eigenstates.  The two qubits couple collectively through
// A = sx(1) + sx(2); in the invariant eigenbasis the only nonzero matrix
// elements connect state 2 with states 3 and 4 (and state 1 with 3 and 4
// when the odd sector is tilted).

namespace dmme {

struct bath_params {
  double temperature = 0.0;
  double s32 = 0.1;   // ohmic strength seen by the 3<->2 channel
  double s24 = 0.01;  // ohmic strength seen by the 2<->4 channel
  double kappa = 10.0;  // cutoff multiplier: omega_c = kappa * |alpha|
  bool include_lamb_shift = false;
};

inline double planck_n(double alpha, double temperature) {
  if (!(alpha > 0)) throw domain_error("thermal occupation needs a positive frequency");
  if (temperature < 0) throw validation_error("temperature must be nonnegative");
  if (temperature == 0) return 0.0;
  return 1.0 / std::expm1(alpha / temperature);
}

// Ohmic spectral density with exponential cutoff, J(w) = s w exp(-w/wc).
inline double spectral_density(double alpha, double s, double cutoff) {
  if (!(alpha > 0)) throw domain_error("spectral density evaluated at a nonpositive frequency");
  if (!(cutoff > 0)) throw validation_error("cutoff must be positive");
  return s * alpha * std::exp(-alpha / cutoff);
}

inline double gamma0(double alpha, double s, double cutoff) {
  return 2 * pi * spectral_density(alpha, s, cutoff);
}

// Reservoir-induced level shift at zero temperature,
//   S(alpha) = s [ wc - alpha e^{-alpha/wc} Ei(alpha/wc) ],  wc = kappa*alpha.
// Equals the principal value of \int_0^inf J(w)/(w - alpha) dw.
inline double lamb_shift_s0(double alpha, double s, double kappa) {
  if (!(alpha > 0)) throw domain_error("level shift evaluated at a nonpositive frequency");
  if (!(kappa > 0)) throw validation_error("cutoff multiplier must be positive");
  double wc = kappa * alpha;
  return s * (wc - alpha * std::exp(-alpha / wc) * expint_ei(alpha / wc));
}

// Matrix of coupling elements <psi_m|A|psi_n> in the invariant eigenbasis.
inline Mat4 matrix_elements_a(const lri_eigensystem& es) {
  Mat4 a = bath_coupling();
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = es.states[i].dot(a * es.states[j]);
  return m;
}

// Channel amplitudes pulled from the eigenvectors: xi_mn = |A_mn| and the
// phase phi_mn = Arg A_mn.  Pointwise values; continuous phases come from
// co-integrating the rates below.
struct channel_amplitudes {
  double xi23 = 0, xi24 = 0, xi13 = 0, xi14 = 0;
  double phi23 = 0, phi24 = 0;
};

inline channel_amplitudes xi_phi(const lri_eigensystem& es) {
  Mat4 m = matrix_elements_a(es);
  channel_amplitudes c;
  c.xi23 = std::abs(m(1, 2));
  c.xi24 = std::abs(m(1, 3));
  c.xi13 = std::abs(m(0, 2));
  c.xi14 = std::abs(m(0, 3));
  c.phi23 = c.xi23 > 0 ? std::arg(m(1, 2)) : 0.0;
  c.phi24 = c.xi24 > 0 ? std::arg(m(1, 3)) : 0.0;
  return c;
}

namespace detail {

// Rational channel factors.  With sin(2 eta2)cos(zeta2) = g6/r etc. the
// squared amplitudes are products of sector factors; the "minus" factor is
// computed as (g1^2+g2^2)/(r(r+g6)) which stays fully accurate when
// g1, g2 -> 0 while 1 - g6/r would cancel to zero.
struct sector_factors {
  double r1 = 0, r = 0;
  double dm2 = 0, dp2 = 0;  // 1 -+ sin(2 eta2)cos(zeta2)
  double dm1 = 0, dp1 = 0;  // 1 -+ sin(2 eta1)cos(zeta1)
};

inline sector_factors channel_factors(const gvector& g) {
  sector_factors s;
  s.r1 = std::sqrt(g.g3 * g.g3 + g.g4 * g.g4 + g.g5 * g.g5);
  s.r = std::sqrt(g.g1 * g.g1 + g.g2 * g.g2 + g.g6 * g.g6);
  if (s.r1 < 1e-12 || s.r < 1e-12) throw domain_error("channel factors undefined: degenerate invariant");
  // both protocols keep g6 >= 0 and g3 >= 0, so r + g6 and r1 + g3 never cancel
  s.dm2 = (g.g1 * g.g1 + g.g2 * g.g2) / (s.r * (s.r + g.g6));
  s.dp2 = (s.r + g.g6) / s.r;
  s.dm1 = (g.g4 * g.g4 + g.g5 * g.g5) / (s.r1 * (s.r1 + g.g3));
  s.dp1 = (s.r1 + g.g3) / s.r1;
  return s;
}

}  // namespace detail

struct channel_xi_sq_values {
  double xi23_sq = 0, xi24_sq = 0, xi13_sq = 0, xi14_sq = 0;
};

inline channel_xi_sq_values channel_xi_sq(const gvector& g) {
  auto s = detail::channel_factors(g);
  return {s.dm2 * s.dp1, s.dp2 * s.dp1, s.dm2 * s.dm1, s.dp2 * s.dm1};
}

// Instantaneous transition frequencies alpha_mn = -d(theta_mn)/dt with
// theta_mn = alpha_n - alpha_m + phi_mn.  The phi rates are evaluated in
// the same cancellation-free rational variables; a channel whose amplitude
// vanishes has its phase rate frozen to zero.
struct instantaneous_frequency_values {
  double alpha23 = 0, alpha24 = 0;
  double alpha32 = 0, alpha42 = 0;
  std::array<double, 4> alpha_dot{};  // LR phase rates, part one of the decomposition
  double phi23_dot = 0, phi24_dot = 0;  // coupling-phase rates, part two
  double xi23_sq = 0, xi24_sq = 0;
};

inline instantaneous_frequency_values instantaneous_frequencies(const gvector& g,
                                                                double f, double J) {
  phase_rates pr = lr_phase_rates(g, f, J);
  auto s = detail::channel_factors(g);
  gvector gd = g_rhs(g, f, J);

  instantaneous_frequency_values out;
  out.alpha_dot = pr.alpha_dot;
  out.xi23_sq = s.dm2 * s.dp1;
  out.xi24_sq = s.dp2 * s.dp1;

  double q2 = std::hypot(g.g2, g.g6);
  double q1 = std::hypot(g.g3, g.g5);
  double sinz2_times_etadot = q2 > 0 ? pr.angles.eta2 * (-g.g2 / q2) : 0.0;
  double sinz1_times_etadot = q1 > 0 ? pr.angles.eta1 * (-g.g5 / q1) : 0.0;

  // r - g1 - g6 without cancellation: (g1^2 + g2^2)/(r + g6) - g1
  double r_m_g1_m_g6 = (g.g1 * g.g1 + g.g2 * g.g2) / (s.r + g.g6) - g.g1;
  double num23_2 = sinz2_times_etadot + pr.angles.zeta2 * r_m_g1_m_g6 / (2 * s.r);
  double num24_2 = sinz2_times_etadot + pr.angles.zeta2 * (s.r + g.g1 + g.g6) / (2 * s.r);
  double num_1 = -sinz1_times_etadot -
                 pr.angles.zeta1 * (s.r1 + g.g4 + g.g3) / (2 * s.r1);
  double phi_1 = num_1 / s.dp1;

  out.phi23_dot = out.xi23_sq > 1e-12 ? num23_2 / s.dm2 + phi_1 : 0.0;
  out.phi24_dot = out.xi24_sq > 1e-12 ? num24_2 / s.dp2 + phi_1 : 0.0;

  out.alpha23 = (pr.alpha_dot[1] - pr.alpha_dot[2]) - out.phi23_dot;
  out.alpha24 = (pr.alpha_dot[1] - pr.alpha_dot[3]) - out.phi24_dot;
  out.alpha32 = -out.alpha23;
  out.alpha42 = -out.alpha24;
  return out;
}

// Width of the band around zero frequency treated as a closed channel.
inline constexpr double dead_channel_cutoff = 1e-9;

struct channel_rates_result {
  double alpha32 = 0, alpha24 = 0;  // signed transition frequencies
  double xi32_sq = 0, xi24_sq = 0;
  double gamma32 = 0, gamma24 = 0;  // xi^2 gamma0(|alpha|), 0 for a dead channel
  double n32 = 0, n24 = 0;          // thermal occupation at |alpha|
  double shift32 = 0, shift24 = 0;  // level-shift coefficients S(alpha)
  bool reversed32 = false, reversed24 = false;
  bool dead32 = false, dead24 = false;
};

// Decay data for both channels at one instant.  A negative signed frequency
// flips the preferred direction of the channel (flagged, handled by the
// generator); |alpha| below the dead cutoff closes the channel entirely.
inline channel_rates_result channel_rates(const gvector& g, double f, double J,
                                          const bath_params& bath) {
  auto if_vals = instantaneous_frequencies(g, f, J);
  channel_rates_result r;
  r.alpha32 = if_vals.alpha32;
  r.alpha24 = if_vals.alpha24;
  r.xi32_sq = if_vals.xi23_sq;  // |A_32| = |A_23|
  r.xi24_sq = if_vals.xi24_sq;

  auto one = [&](double alpha, double xisq, double s, double& gamma, double& n,
                 double& shift, bool& reversed, bool& dead) {
    double mag = std::abs(alpha);
    if (mag <= dead_channel_cutoff || xisq <= 1e-12) {
      dead = true;
      return;
    }
    reversed = alpha < 0;
    gamma = xisq * gamma0(mag, s, bath.kappa * mag);
    n = planck_n(mag, bath.temperature);
    if (bath.include_lamb_shift) {
      if (bath.temperature != 0) {
        throw unsupported_error("level-shift correction is implemented at zero temperature only");
      }
      shift = lamb_shift_s0(mag, s, bath.kappa);
    }
  };
  one(r.alpha32, r.xi32_sq, bath.s32, r.gamma32, r.n32, r.shift32, r.reversed32, r.dead32);
  one(r.alpha24, r.xi24_sq, bath.s24, r.gamma24, r.n24, r.shift24, r.reversed24, r.dead24);
  return r;
}

}  // namespace dmme
