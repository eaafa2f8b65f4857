#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "dmme/errors.hpp"

// Adaptive Dormand-Prince 5(4) integrator over fixed-size real state
// vectors.  Deterministic, single-threaded, supports backward integration
// (t1 < t0).  This is the only ODE stepper in the library; every
// trajectory, phase and control quantity is co-integrated through it.

namespace dmme {

struct rk_options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: pick from the interval length
  long max_steps = 4000000;
};

// Returns the magnitude of the last natural (unclipped) step, so a caller
// sampling on a grid can hand it to the next segment as h_init.
template <int N, class RHS>
double rk45_integrate(RHS&& rhs, double t0, double t1, std::array<double, N>& y,
                      const rk_options& opt = {}) {
  if (t0 == t1) return opt.h_init != 0.0 ? std::abs(opt.h_init) : 0.0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double h = opt.h_init != 0.0 ? std::abs(opt.h_init) : std::abs(t1 - t0) / 100.0;
  h *= dir;
  double h_natural = h;

  using state = std::array<double, N>;
  state k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double t = t0;
  rhs(t, y, k1);  // FSAL: k1 carries over between accepted steps

  auto stage = [&](const state& base, double hcoef, const double* coefs,
                   const state* const* ks, int nks, state& out) {
    for (int i = 0; i < N; ++i) {
      double acc = 0.0;
      for (int c = 0; c < nks; ++c) acc += coefs[c] * (*ks[c])[i];
      out[i] = base[i] + hcoef * acc;
    }
  };

  for (long step = 0; step < opt.max_steps; ++step) {
    h_natural = h;
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    {
      const double c2[] = {1.0 / 5};
      const state* ks[] = {&k1};
      stage(y, h, c2, ks, 1, ytmp);
      rhs(t + h / 5, ytmp, k2);
    }
    {
      const double c3[] = {3.0 / 40, 9.0 / 40};
      const state* ks[] = {&k1, &k2};
      stage(y, h, c3, ks, 2, ytmp);
      rhs(t + 3.0 * h / 10, ytmp, k3);
    }
    {
      const double c4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
      const state* ks[] = {&k1, &k2, &k3};
      stage(y, h, c4, ks, 3, ytmp);
      rhs(t + 4.0 * h / 5, ytmp, k4);
    }
    {
      const double c5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
      const state* ks[] = {&k1, &k2, &k3, &k4};
      stage(y, h, c5, ks, 4, ytmp);
      rhs(t + 8.0 * h / 9, ytmp, k5);
    }
    {
      const double c6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656};
      const state* ks[] = {&k1, &k2, &k3, &k4, &k5};
      stage(y, h, c6, ks, 5, ytmp);
      rhs(t + h, ytmp, k6);
    }
    {
      const double c7[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
      const state* ks[] = {&k1, &k2, &k3, &k4, &k5, &k6};
      stage(y, h, c7, ks, 6, ynew);
      rhs(t + h, ynew, k7);
    }

    // embedded 4th-order error estimate
    const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                       e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double r = ei / sc;
      err += r * r;
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      if (dir * (t1 - t) <= 1e-14 * std::max(1.0, std::abs(t1))) {
        return std::abs(h_natural);
      }
    }
    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t))) {
      throw consistency_error("integrator step size underflow");
    }
  }
  throw consistency_error("integrator exceeded max step count");
}

}  // namespace dmme
