#pragma once

#include <cmath>
#include <limits>

#include "dmme/errors.hpp"

namespace dmme {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

// Power series Ei(x) = gamma + ln|x| + sum_k x^k/(k k!), good for |x| <= 40
// on the positive side and |x| < 1 on the negative side.
inline double ei_series(double x) {
  double sum = 0.0, term = 1.0;
  for (int k = 1; k < 400; ++k) {
    term *= x / k;
    double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return euler_gamma + std::log(std::abs(x)) + sum;
}

// Asymptotic expansion Ei(x) ~ e^x/x sum_k k!/x^k for large positive x,
// truncated at the smallest term.
inline double ei_asymptotic(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 200; ++k) {
    double next = term * k / x;
    if (next >= term) break;  // divergent tail reached
    term = next;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return std::exp(x) / x * sum;
}

// E1(x) for x >= 1 via the standard continued fraction (modified Lentz).
inline double e1_continued_fraction(double x) {
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 300; ++k) {
    double a = -static_cast<double>(k) * k;
    b += 2.0;
    d = 1.0 / (b + a * d);
    c = b + a / c;
    double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x);
}

}  // namespace detail

// Exponential integral Ei(x) on the whole real axis minus the origin.
inline double expint_ei(double x) {
  if (x == 0.0) throw domain_error("Ei is singular at x = 0");
  if (x > 0.0) {
    if (x > 700.0) return std::numeric_limits<double>::infinity();
    return x <= 40.0 ? detail::ei_series(x) : detail::ei_asymptotic(x);
  }
  // negative axis: Ei(-y) = -E1(y)
  double y = -x;
  if (y < 1.0) return detail::ei_series(x);
  return -detail::e1_continued_fraction(y);
}

}  // namespace dmme
