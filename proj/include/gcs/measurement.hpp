#pragma once

#include "gcs/state.hpp"
#include "gcs/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gcs {

// General-dyne measurement covariance. Homodyne limits are handled by exact
// marginalization: `measured` holds the finitely-resolved quadrature
// directions (orthonormal columns) and `degenerate` their conjugates, whose
// variance is formally infinite. Outcomes live on the measured subspace, in
// the column order of `measured`. An empty `degenerate` means a full-rank
// 2n-dimensional general-dyne (e.g. heterodyne) with outcome vector in R^2n.
struct GeneralDyne {
  RealMatrix sigma_m;
  RealMatrix measured;    // 2n x M, empty when full rank
  RealMatrix degenerate;  // 2n x (2n - M), empty when full rank
  bool is_degenerate() const { return degenerate.cols() > 0; }
  int outcome_dim() const {
    return is_degenerate() ? static_cast<int>(measured.cols())
                           : static_cast<int>(sigma_m.rows());
  }
};

// Homodyne of the rotated quadrature cos(phi) x + sin(phi) p on every mode,
// efficiency eta in (0, 1]: measured-direction variance tan(theta)^2 with
// theta = arccos(sqrt(eta)).
GeneralDyne homodyne_cov(Real phi, Real eta, int n_modes);

// Heterodyne: sigma_m = (1 + 2 tan(theta)^2) * Identity.
GeneralDyne heterodyne_cov(Real eta, int n_modes);

// Qubit POVM: positive elements summing to the identity.
struct QubitPOVM {
  std::vector<ComplexMatrix> elements;
  std::vector<std::string> labels;
  void validate(Real tol = 1e-12) const;
};

// Projective measurement of the Pauli axis ('x', 'y' or 'z') on one qubit.
QubitPOVM pauli_povm(char axis, int qubit, int n_qubits);

// CV state after a qubit measurement: a complex-weighted mixture of Gaussian
// components, chi(r~) = sum_l w_l exp(-1/4 r~^T s_l r~ + i r~^T r_l).
struct CVStateMixture {
  struct Component {
    Complex weight;
    ComplexMatrix sigma;
    ComplexVector r;
  };
  int n_modes = 0;
  std::vector<Component> components;

  Complex eval_char(const RealVector& r_tilde) const;
  // Wigner in the 2^n / pi^n vacuum-peak convention; real up to roundoff
  // for physical mixtures.
  Complex eval_wigner(const RealVector& r_tilde) const;
};

struct QubitOutcome {
  std::string label;
  Real probability = 0.0;
  CVStateMixture post;  // empty for zero-probability outcomes
};

// P(i) = sum_KJ M^i_KJ exp(r0_JK); post state carries reweighted branches so
// that chi_post = (1/P) sum_KJ M^i_KJ chi_JK.
std::vector<QubitOutcome> qubit_measure(const GCSState& state, const QubitPOVM& povm);

// P(r_m) = sum_J p_J N(r_JJ, sigma_JJ + sigma_m)(r_m); normalized to unit
// integral over the outcome space.
Real generaldyne_density(const GCSState& state, const GeneralDyne& meas, const RealVector& r_m);

// Regularized full-rank fallback for degenerate (homodyne) measurements:
// replaces the infinite conjugate variance by 1/z2 and marginalizes
// numerically-exactly over the conjugate outcomes. Cross-check only.
Real generaldyne_density_regularized(const GCSState& state, const GeneralDyne& meas,
                                     const RealVector& r_m, Real z2 = 1e-8);

struct PostQrdm {
  ComplexMatrix unnormalized;
  ComplexMatrix normalized;
  Real density = 0.0;
};

// Entrywise overlap of each branch with the measurement Gaussian at outcome
// r_m. normalized is Hermitian with unit trace (flagged via zero density
// when the outcome is in the far tails of every branch).
PostQrdm generaldyne_post_qrdm(const GCSState& state, const GeneralDyne& meas,
                               const RealVector& r_m);

// Joint qubit (x) general-dyne measurement: per-outcome densities
// P^i(r_m) = sum_KJ M^i_KJ [unnormalized post-QRDM]_JK, real within 1e-10,
// summing pointwise to generaldyne_density.
RealVector joint_measurement_density(const GCSState& state, const GeneralDyne& meas,
                                     const QubitPOVM& povm, const RealVector& r_m);

// Sum of |negative eigenvalues| of the partial transpose over qubit 2.
Real negativity_two_qubit(const ComplexMatrix& rho);

// Integral of the 1-D homodyne density over [lo, hi] by adaptive quadrature.
Real postselect_success_probability(const GCSState& state, const GeneralDyne& meas, Real lo,
                                    Real hi, Real tol = 1e-8);

// Weyl-ordered moments <W(r^{k1} ... r^{kn})>_JK from derivatives of the
// branched characteristic function: Gaussian moment recursion with mean r_JK
// and pair covariance sigma_JK / 2, scaled by exp(r0_JK). `joint` contracts
// the diagonal with the identity qubit observable.
struct ExpectationResult {
  ComplexMatrix per_branch;  // (2^N x 2^N), entry (J, K)
  Complex joint;
};
ExpectationResult expectation_product(const GCSState& state, const std::vector<int>& indices);

// Draws from the general-dyne outcome distribution. 1-D homodyne uses
// inverse-CDF sampling; otherwise exact Gaussian-mixture sampling. Rows are
// outcomes. Deterministic for a fixed seed.
RealMatrix sample_generaldyne(const GCSState& state, const GeneralDyne& meas, int n_samples,
                              std::uint64_t seed);

}  // namespace gcs
