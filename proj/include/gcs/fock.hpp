#pragma once

#include "gcs/dynamics.hpp"
#include "gcs/model.hpp"
#include "gcs/types.hpp"

#include <vector>

namespace gcs {

// Ground-truth brute-force simulator in a truncated number basis. Joint
// index ordering: qubit product-basis index (BranchLabel::index) major,
// Fock index minor, i.e. rho = rho_q (x) rho_m for product states.
struct FockConfig {
  int n_max = 32;                    // truncation dimension per mode
  Real convergence_factor = 1e-8;    // tail-population threshold
};

struct FockDensityMatrix {
  int n_qubits = 0;
  int n_modes = 1;
  int n_max = 0;
  ComplexMatrix rho;
  Real time = 0.0;

  int qubit_dim() const { return 1 << n_qubits; }
  int mode_dim() const {
    int d = 1;
    for (int i = 0; i < n_modes; ++i) d *= n_max;
    return d;
  }
  int dim() const { return qubit_dim() * mode_dim(); }

  // Mode-space block <J| rho |K>.
  ComplexMatrix block(int j_index, int k_index) const;

  Real tail_population() const;
};

// Truncated canonical operators on the full mode space.
struct ModeOperators {
  std::vector<ComplexMatrix> x, p, a;
  ComplexMatrix id;
  // Canonical vector ordering (x_1, p_1, x_2, ...).
  const ComplexMatrix& canonical(int index) const { return index % 2 == 0 ? x[index / 2] : p[index / 2]; }
};
ModeOperators build_operators(const FockConfig& cfg, int n_modes = 1);

// <m| D(alpha) |n> for the truncated displacement operator, via stable
// Laguerre recurrences (no matrix exponential).
ComplexMatrix displacement_matrix(Complex alpha, int n_max);

// Gaussian state synthesis: thermal diagonal, then squeeze/rotate/displace
// chosen by Williamson decomposition of sigma0, tensored with qrdm0.
// Multimode sigma0 must be block-diagonal per mode. Throws TruncationError
// if the tail population exceeds cfg.convergence_factor.
FockDensityMatrix build_initial_state(const RealVector& r0, const RealMatrix& sigma0,
                                      const ComplexMatrix& qrdm0, const FockConfig& cfg,
                                      int n_modes = 1);

// Lindblad evolution of the joint density matrix over tau_grid (adaptive RK,
// matrix-free superoperator action). Trace preserved to 1e-8; truncation
// overflow reported as TruncationError.
std::vector<FockDensityMatrix> evolve(const HybridModel& model, const FockDensityMatrix& rho0,
                                      const std::vector<Real>& tau_grid, const FockConfig& cfg,
                                      const IntegratorConfig& icfg = {});

// chi_JK(rbar) = Tr_m[D(-rbar) rho_JK] evaluated in the Fock basis.
Complex fock_char(const FockDensityMatrix& rho, const BranchLabel& j, const BranchLabel& k,
                  const RealVector& rbar);

// Phase-space quantities of one branch. Diagonal keys use exact moments;
// off-diagonal keys fit the quadratic form of log chi_JK on a symmetric
// stencil of radius `stencil_h` (second-order accurate).
struct ExtractedBranch {
  Complex rho_q;
  ComplexVector r;
  ComplexMatrix sigma;
};
ExtractedBranch extract_phase_space(const FockDensityMatrix& rho, const BranchLabel& j,
                                    const BranchLabel& k, Real stencil_h = 1e-2);

// Mode-reduced Wigner function on a grid (single mode). Standard
// normalization: integrates to 1 in dx dp; multiply by 2 for the
// 2^n-convention used by the branched Wigner functions.
RealMatrix wigner_grid(const FockDensityMatrix& rho, const std::vector<Real>& xs,
                       const std::vector<Real>& ps);

// General-dyne applied in the Fock basis: unnormalized post-measurement QRDM
// entries Tr_m[Pi_{r_m} rho_JK] with Pi a displaced Gaussian of covariance
// sigma_m (synthesized like build_initial_state). Normalization convention
// matches generaldyne_post_qrdm after dividing by the trace.
ComplexMatrix fock_generaldyne_post_qrdm(const FockDensityMatrix& rho, const RealMatrix& sigma_m,
                                         const RealVector& r_m, const FockConfig& cfg);

}  // namespace gcs
