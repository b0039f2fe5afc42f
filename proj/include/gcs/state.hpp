#pragma once

#include "gcs/branch.hpp"
#include "gcs/symplectic.hpp"
#include "gcs/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gcs {

// Phase-space data of one branch (J, K): complex symmetric covariance
// sigma_JK, complex first moments r_JK, and the QRDM exponent
// r0_JK = -C + i*phi. Branches with zero QRDM amplitude are inactive and
// excluded from all sums (log 0 is undefined; they stay identically zero
// under diagonal dynamics).
struct BranchQuantities {
  ComplexMatrix sigma;
  ComplexVector r;
  Complex r0{0.0, 0.0};
  bool active = true;

  BranchQuantities conjugated() const;
};

// Gaussian-branched cat state of n modes and N qubits. Only keys with
// J <= K in lexicographic order are stored; the rest follow from
// hermiticity: sigma_KJ = conj(sigma_JK), r_KJ = conj(r_JK),
// r0_KJ = conj(r0_JK).
class GCSState {
 public:
  GCSState() = default;
  GCSState(int n_modes, int n_qubits);

  // Product initial state: a Gaussian (r0, sigma0) shared by every branch,
  // tensored with an arbitrary QRDM. Entries of qrdm0 with zero modulus
  // yield inactive branches.
  static GCSState product(int n_modes, const RealVector& r0, const RealMatrix& sigma0,
                          const ComplexMatrix& qrdm0);

  int n_modes() const { return n_modes_; }
  int n_qubits() const { return n_qubits_; }
  int n_labels() const { return 1 << n_qubits_; }
  double time = 0.0;

  // Branch lookup for arbitrary (J, K); conjugates on the fly when J > K.
  BranchQuantities branch(const BranchLabel& j, const BranchLabel& k) const;
  BranchQuantities branch(const BranchKey& key) const { return branch(key.row, key.col); }

  // Direct access to the stored upper triangle, indexed by label indices
  // a <= b.
  BranchQuantities& stored(int a, int b);
  const BranchQuantities& stored(int a, int b) const;

  std::vector<BranchKey> stored_keys() const;

 private:
  int n_modes_ = 0;
  int n_qubits_ = 0;
  std::vector<BranchQuantities> upper_;
};

// Tracks the sheet of a complex square root along an evaluation sweep:
// principal branch at the first point, then the root closer to the
// previous one. Off-diagonal sigma is complex and the naive principal
// root flips sign across branch cuts.
class SqrtTracker {
 public:
  Complex next(Complex z);
  void reset() { prev_.reset(); }

 private:
  std::optional<Complex> prev_;
};

// chi_JK(r~) = exp(-1/4 r~^T sigma_JK r~ + i r~^T r_JK + r0_JK).
// Inactive branches evaluate to 0.
Complex eval_branched_char(const GCSState& state, const BranchKey& key,
                           const RealVector& r_tilde);

// W_JK(r~) = 2^n exp(r0_JK) / (pi^n sqrt(det sigma_JK))
//            * exp(-(r~ - r_JK)^T sigma_JK^{-1} (r~ - r_JK)).
// Diagonal keys are real and positive and integrate to exp(r0_JJ) in the
// measure dx dp / 2^n. An optional SqrtTracker keeps the determinant root
// continuous along parameter sweeps.
Complex eval_branched_wigner(const GCSState& state, const BranchKey& key,
                             const RealVector& r_tilde, SqrtTracker* tracker = nullptr);

// Qubit reduced density matrix: entries exp(r0_JK) in the sigma_z product
// basis. Hermitian with unit trace for a normalized state.
ComplexMatrix qrdm(const GCSState& state);

// First and second moments of the modes reduced state: the statistical
// mixture of the diagonal Gaussian branches weighted by the QRDM diagonal.
// Returned covariance includes the inter-branch spread:
//   mean  = sum_J p_J r_JJ
//   sigma = sum_J p_J (sigma_JJ + 2 r_JJ r_JJ^T) - 2 mean mean^T.
struct ModesMoments {
  RealVector mean;
  RealMatrix sigma;
};
ModesMoments modes_reduced_moments(const GCSState& state);

struct Violation {
  std::string what;
  std::string key;
  Real magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

// Diagnostics only; never throws. Checks sigma symmetry, reality of
// diagonal branches, trace normalization, the uncertainty bound
// min eig(sigma_JJ + i Omega) >= -tol, and the Cauchy-Schwarz bound
// |exp(r0_JK)| <= sqrt(exp(r0_JJ) exp(r0_KK)) + tol.
ValidationReport validate_state(const GCSState& state, Real tol = kPhysicalityTol);

}  // namespace gcs
