#pragma once

#include "gcs/branch.hpp"
#include "gcs/types.hpp"

#include <vector>

namespace gcs {

// Operator-valued Gaussian Hamiltonian plus Markovian noise, all in
// canonical (x, p) ordering and frequency units (hbar = 1, tau = omega t):
//
//   H / (hbar w) = 1/2 r^T H_m r - r_m^T r + d^T r
//                + sum_i (1/2 r^T Hq_i r - rq_i^T r + 1/2 Hq0_i sz_i)
//                + sum_{i<l} zz_il sz_i sz_l
//
// with mode diffusion D (symmetric PSD), drift E (antisymmetric), driving d,
// and per-qubit dephasing rates Gamma_z >= 0. The zz couplings contribute
// branch-constant energies only (they are diagonal in the coupling basis);
// zz defaults to zero.
struct HybridModel {
  int n_modes = 1;
  int n_qubits = 1;

  RealMatrix H_m;                // 2n x 2n symmetric
  RealVector r_m;                // classical force
  std::vector<RealMatrix> H_q;   // per qubit, symmetric
  std::vector<RealVector> r_q;   // per qubit
  RealVector H_q0;               // per-qubit splitting
  RealVector Gamma_z;            // per-qubit dephasing rate, >= 0
  RealMatrix D;                  // diffusion, symmetric PSD
  RealMatrix E;                  // drift, antisymmetric
  RealVector d;                  // driving
  RealMatrix zz;                 // strict upper triangle used

  static HybridModel zero(int n_modes, int n_qubits);

  // Eager validation with symmetry repairs; deviations above `warn_tol`
  // are reported through the returned list.
  std::vector<std::string> validate_and_repair(Real warn_tol = kStructuralTol);

  bool has_quadratic_coupling(Real tol = 0.0) const;
  bool has_noise(Real tol = 0.0) const;

  // Branch-constant energy: 1/2 sum_i Hq0_i j_i + sum_{i<l} zz_il j_i j_l.
  // Enters the QRDM exponent as dr0 = -i (c_J - c_K).
  Real branch_constant(const BranchLabel& j) const;
};

// Branch-resolved Hamiltonian data: H_J = H_m + sum_i j_i Hq_i,
// r_J = r_m + sum_i j_i rq_i, const_J = sum_i j_i Hq0_i.
struct BranchHamiltonian {
  RealMatrix H;
  RealVector r;
  Real constant = 0.0;
};

BranchHamiltonian resolve_branch(const HybridModel& model, const BranchLabel& j);

// Split a Hermitian Lindblad coefficient matrix B = 1/2 Omega^T D Omega - i E
// into diffusion and drift: D = 2 Omega Re(B) Omega^T, E = -Im(B).
struct NoiseMatrices {
  RealMatrix D;
  RealMatrix E;
};
NoiseMatrices noise_from_B(const ComplexMatrix& b);

// Inverse of noise_from_B.
ComplexMatrix b_from_noise(const RealMatrix& d_mat, const RealMatrix& e_mat);

// Noise from a linear bath coupling r_s^T H_C r_in with bath moments
// (r_in, sigma_in): D = Omega H_C sigma_in H_C^T Omega^T,
// E = H_C Omega_m H_C^T / 2, d = H_C r_in. D is PSD by construction.
struct BathNoise {
  RealMatrix D;
  RealMatrix E;
  RealVector d;
};
BathNoise noise_from_bath_coupling(const RealMatrix& h_c, const RealMatrix& sigma_in,
                                   const RealVector& r_in);

// Convert ladder-ordered noise (B_a over (a, a^dag, ...), driving d_a) to the
// canonical basis: B = U^T B_a conj(U), d = U^T d_a with U the ladder
// transform. Photon loss at rate kappa maps to B = kappa/2 (1 - i Omega).
struct CanonicalNoise {
  ComplexMatrix B;
  RealVector d;
};
CanonicalNoise ladder_noise_to_canonical(const ComplexMatrix& b_a, const ComplexVector& d_a);

}  // namespace gcs
