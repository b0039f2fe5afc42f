#pragma once

#include "gcs/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gcs {

struct OdeOptions {
  Real rel_tol = 1e-9;
  Real abs_tol = 1e-12;
  Real max_step = std::numeric_limits<Real>::infinity();
  // Called after every accepted step with (t, y); may modify y in place
  // (used for step-local symmetrization of sigma).
  std::function<void(Real, RealVector&)> post_step;
};

namespace detail {
// Dormand-Prince 5(4) coefficients.
inline constexpr Real kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr Real kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr Real kB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
}  // namespace detail

// Adaptive embedded Runge-Kutta (Dormand-Prince) from t0 to t1.
// F: (Real t, const RealVector& y) -> RealVector.
// Throws IntegrationError on step-size underflow.
template <class F>
RealVector dopri5(F&& f, RealVector y, Real t0, Real t1, const OdeOptions& opt = {}) {
  using namespace detail;
  if (t1 <= t0) return y;
  const int n = static_cast<int>(y.size());
  RealVector k[7];
  k[0] = f(t0, y);
  Real t = t0;
  Real h = std::min({(t1 - t0) / 16.0, opt.max_step, 0.1});
  const Real hmin = 1e-14 * std::max(1.0, std::abs(t1));
  bool fsal_valid = true;

  while (t < t1) {
    h = std::min({h, t1 - t, opt.max_step});
    if (h < hmin)
      throw IntegrationError("dopri5: step size underflow", t, "");
    if (!fsal_valid) k[0] = f(t, y);

    for (int s = 1; s < 7; ++s) {
      RealVector ys = y;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * k[j];
      k[s] = f(t + kC[s] * h, ys);
    }
    // 5th-order solution uses the a[6] row; k[6] is f at the new point (FSAL).
    RealVector y5 = y;
    for (int j = 0; j < 6; ++j)
      if (kA[6][j] != 0.0) y5 += (h * kA[6][j]) * k[j];

    Real err = 0.0;
    for (int i = 0; i < n; ++i) {
      Real e4 = 0.0;
      for (int j = 0; j < 7; ++j) e4 += kB4[j] * k[j][i];
      const Real diff = y5[i] - (y[i] + h * e4);
      const Real scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (diff / scale) * (diff / scale);
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      t += h;
      y = std::move(y5);
      if (opt.post_step) {
        opt.post_step(t, y);
        fsal_valid = false;
      } else {
        k[0] = k[6];
        fsal_valid = true;
      }
    } else {
      fsal_valid = false;
    }
    const Real factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return y;
}

// Fixed-step classic RK4 over [t0, t1] with n_steps steps.
template <class F>
RealVector rk4(F&& f, RealVector y, Real t0, Real t1, int n_steps,
               const std::function<void(Real, RealVector&)>& post_step = {}) {
  const Real h = (t1 - t0) / n_steps;
  for (int i = 0; i < n_steps; ++i) {
    const Real t = t0 + i * h;
    const RealVector k1 = f(t, y);
    const RealVector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const RealVector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const RealVector k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (post_step) post_step(t + h, y);
  }
  return y;
}

}  // namespace gcs
