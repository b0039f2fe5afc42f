#pragma once

#include "gcs/model.hpp"
#include "gcs/state.hpp"
#include "gcs/types.hpp"

#include <vector>

namespace gcs {

struct IntegratorConfig {
  enum class Method { AdaptiveRk, FixedRk4 };
  Method method = Method::AdaptiveRk;
  Real rel_tol = 1e-9;
  Real abs_tol = 1e-12;
  Real max_step = std::numeric_limits<Real>::infinity();
  int fixed_steps_per_unit = 1000;
  Real quadrature_tol = 1e-10;
};

struct Trajectory {
  std::vector<Real> times;
  std::vector<GCSState> states;
};

// Time derivatives of one branch (J, K) under the open operator-valued
// Gaussian dynamics:
//   dsigma = 1/2 [Om (H_J+H_K+2E) s - s (H_J+H_K+2E^T) Om] + D
//            - i/2 [s (H_J-H_K) s + Om (H_J-H_K) Om]
//   dr     = 1/2 [(Om (H_J+H_K+2E) - i s (H_J-H_K)) r
//            + Om (2d - r_J - r_K) + i s (r_J - r_K)]
//   dr0    = -i/2 r^T (H_J-H_K) r + i (r_J-r_K)^T r
//            - i/4 Tr[(H_J-H_K) s] - i (c_J - c_K)
//            + sum_i Gamma_i/2 (j_i k_i - 1)
// With D = E = d = Gamma = 0 this is the unitary set. The -i/2 coefficient
// of the Riccati term is pinned by the Fock oracle and by re-deriving the
// coefficient matching of the characteristic-function PDE.
struct BranchRates {
  ComplexMatrix dsigma;
  ComplexVector dr;
  Complex dr0;
};
BranchRates rhs_open(const HybridModel& model, const BranchLabel& j, const BranchLabel& k,
                     const BranchQuantities& q);

// Numerical integration of all stored branches over an increasing time grid
// starting at state0.time. Each branch system is independent; sigma is
// symmetrized after every accepted step. Normalization drift beyond 1e-9 is
// an error, never silently repaired.
Trajectory integrate(const HybridModel& model, const GCSState& state0,
                     const std::vector<Real>& tau_grid, const IntegratorConfig& cfg = {});

// Closed form for purely linear coupling (all H_q = 0), no noise. Requires
// invertible H_m and a product-form initial state. All branch covariances
// follow the single symplectic transform S_m = exp(tau Om H_m).
GCSState closed_form_linear_unitary(const HybridModel& model, const GCSState& state0, Real tau);

// Closed form for linear coupling with Markovian noise. A = H_m + E must be
// invertible; the Lyapunov integral is evaluated by adaptive Gauss-Kronrod
// to cfg.quadrature_tol. When E = 0 an equivalent symplectic-identity route
// is used (and tested to agree with the general one).
enum class ClosedFormRoute { Auto, General, Symplectic };
GCSState closed_form_linear_open(const HybridModel& model, const GCSState& state0, Real tau,
                                 const IntegratorConfig& cfg = {},
                                 ClosedFormRoute route = ClosedFormRoute::Auto);

// Diagonal branches only, valid for arbitrary quadratic coupling: each key
// (J, J) evolves under its own A_J = H_J + E. Off-diagonal branches of the
// returned state are marked inactive. r0_JJ is constant.
GCSState diagonal_closed_form(const HybridModel& model, const GCSState& state0, Real tau,
                              const IntegratorConfig& cfg = {});

}  // namespace gcs
