#pragma once

#include "gcs/types.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace gcs {

namespace detail {
// Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (positive half, symmetric).
inline constexpr Real kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr Real kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr Real kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

// One Gauss-Kronrod 15(7) panel. F: Real -> T where T supports scaled
// addition; `err` receives the max-norm of the K15-G7 difference.
template <class T, class F, class Norm>
T gk15_panel(F&& f, Real a, Real b, Real* err, Norm&& norm) {
  using namespace detail;
  const Real half = 0.5 * (b - a);
  const Real mid = 0.5 * (a + b);

  T fc = f(mid);
  T kron = kWgk[7] * fc;
  T gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const Real dx = half * kXgk[i];
    T fl = f(mid - dx);
    T fr = f(mid + dx);
    kron += kWgk[i] * (fl + fr);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fl + fr);
  }
  kron *= half;
  gauss *= half;
  *err = norm(kron - gauss);
  return kron;
}

// Adaptive Gauss-Kronrod on [a, b] to absolute tolerance tol (max-norm for
// matrix-valued integrands; all entries share the subdivision).
template <class T, class F, class Norm>
T adaptive_gk15(F&& f, Real a, Real b, Real tol, Norm&& norm, int max_panels = 2000) {
  struct Panel {
    Real a, b, err;
    T value;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  if (a == b) {
    T v = f(a);
    v *= 0.0;
    return v;
  }
  std::priority_queue<Panel> panels;
  Real err0;
  T total = gk15_panel<T>(f, a, b, &err0, norm);
  panels.push({a, b, err0, total});
  Real total_err = err0;
  int n_panels = 1;
  while (total_err > tol && n_panels < max_panels) {
    Panel worst = panels.top();
    panels.pop();
    const Real mid = 0.5 * (worst.a + worst.b);
    Real e1, e2;
    T v1 = gk15_panel<T>(f, worst.a, mid, &e1, norm);
    T v2 = gk15_panel<T>(f, mid, worst.b, &e2, norm);
    total += v1 + v2 - worst.value;
    total_err += e1 + e2 - worst.err;
    panels.push({worst.a, mid, e1, v1});
    panels.push({mid, worst.b, e2, v2});
    ++n_panels;
  }
  return total;
}

inline Real adaptive_gk15_scalar(const std::function<Real(Real)>& f, Real a, Real b, Real tol) {
  return adaptive_gk15<Real>(f, a, b, tol, [](Real x) { return std::abs(x); });
}

inline RealMatrix adaptive_gk15_matrix(const std::function<RealMatrix(Real)>& f, Real a, Real b,
                                       Real tol) {
  return adaptive_gk15<RealMatrix>(
      f, a, b, tol, [](const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); });
}

}  // namespace gcs
