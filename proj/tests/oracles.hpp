#pragma once

// Test-side oracles, deliberately independent of the library's own
// implementations: composite-Simpson quadrature, a principal-value
// evaluation of the reservoir shift integral, a long-double power-series
// exponential integral, and deterministic random states.

#include <cmath>
#include <functional>
#include <random>

#include "dmme/algebra.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n /* even */) {
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// PV integral of s w e^{-w/wc} / (w - alpha) over [0, inf), wc = kappa*alpha.
// Split: symmetric interval [0, 2 alpha] with the singularity subtracted,
// plus the regular tail.
inline double pv_shift(double alpha, double s, double kappa) {
  double wc = kappa * alpha;
  auto jd = [&](double w) { return s * w * std::exp(-w / wc); };
  double jd_at = jd(alpha);
  double jslope = s * std::exp(-alpha / wc) * (1.0 - alpha / wc);
  auto reg = [&](double w) {
    double d = w - alpha;
    if (std::abs(d) < 1e-9 * alpha) return jslope;
    return (jd(w) - jd_at) / d;
  };
  double core = simpson(reg, 0.0, 2.0 * alpha, 40000);
  // tail: w = 2 alpha + wc u
  auto tail = [&](double u) {
    double w = 2.0 * alpha + wc * u;
    return jd(w) * wc / (w - alpha);
  };
  double rest = simpson(tail, 0.0, 60.0, 40000);
  return core + rest;
}

// Ei by the everywhere-convergent series in long double; valid for
// 0 < x <= 100 and -1 < x < 0 to far better than 1e-12 relative.
inline long double ei_series_ld(long double x) {
  const long double euler = 0.57721566490153286060651209008240243L;
  long double sum = 0.0L, term = 1.0L;
  for (int k = 1; k < 800; ++k) {
    term *= x / k;
    long double contrib = term / k;
    sum += contrib;
    if (std::abs((double)(contrib / (sum + 1e-300L))) < 1e-24) break;
  }
  return euler + std::log(std::abs((double)x)) + sum;
}

inline dmme::Mat4 random_density(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  dmme::Mat4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = dmme::cplx(nd(rng), nd(rng));
  dmme::Mat4 rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

inline dmme::Vec4 random_state(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  dmme::Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = dmme::cplx(nd(rng), nd(rng));
  return v.normalized();
}

}  // namespace oracle
