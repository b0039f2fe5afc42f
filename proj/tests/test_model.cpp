#include "gcs/model.hpp"
#include "gcs/symplectic.hpp"

#include <doctest.h>

#include <random>

using namespace gcs;

namespace {

HybridModel random_model(std::mt19937& rng, int n_modes, int n_qubits) {
  std::normal_distribution<Real> g;
  const int d = 2 * n_modes;
  HybridModel m = HybridModel::zero(n_modes, n_qubits);
  auto rand_sym = [&] {
    RealMatrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    return RealMatrix(0.5 * (a + a.transpose()));
  };
  m.H_m = rand_sym();
  for (int i = 0; i < n_qubits; ++i) {
    m.H_q[i] = rand_sym();
    for (int k = 0; k < d; ++k) m.r_q[i][k] = g(rng);
    m.H_q0[i] = g(rng);
  }
  for (int k = 0; k < d; ++k) m.r_m[k] = g(rng);
  return m;
}

}  // namespace

TEST_CASE("resolve_branch examples") {
  std::mt19937 rng(7);
  HybridModel m = random_model(rng, 1, 1);

  const BranchHamiltonian plus = resolve_branch(m, BranchLabel({1}));
  CHECK((plus.H - (m.H_m + m.H_q[0])).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((plus.r - (m.r_m + m.r_q[0])).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(plus.constant == doctest::Approx(m.H_q0[0]));

  // All H_q = 0 gives H_J = H_m for every label.
  HybridModel bare = m;
  bare.H_q[0].setZero();
  for (const auto& label : all_labels(1))
    CHECK((resolve_branch(bare, label).H - m.H_m).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(resolve_branch(m, BranchLabel({1, 1})), DimensionError);
}

TEST_CASE("dispersive two-qubit branch frequencies") {
  const Real omega = 5.0, chi = 1.0;
  HybridModel m = HybridModel::zero(1, 2);
  m.H_m = omega * RealMatrix::Identity(2, 2);
  m.H_q[0] = 0.5 * chi * RealMatrix::Identity(2, 2);
  m.H_q[1] = m.H_q[0];
  std::vector<Real> freqs;
  for (const auto& label : all_labels(2)) freqs.push_back(resolve_branch(m, label).H(0, 0));
  CHECK(freqs[0] == doctest::Approx(omega + chi));  // ++
  CHECK(freqs[1] == doctest::Approx(omega));        // +-
  CHECK(freqs[2] == doctest::Approx(omega));        // -+
  CHECK(freqs[3] == doctest::Approx(omega - chi));  // --
}

TEST_CASE("resolve_branch is linear in the label") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    HybridModel m = random_model(rng, 1 + trial % 2, 2);
    const auto labels = all_labels(2);
    for (const auto& j : labels) {
      for (const auto& k : labels) {
        const RealMatrix lhs =
            resolve_branch(m, j).H + resolve_branch(m, k).H - 2.0 * m.H_m;
        RealMatrix rhs = RealMatrix::Zero(lhs.rows(), lhs.cols());
        for (int i = 0; i < 2; ++i) rhs += (j[i] + k[i]) * m.H_q[i];
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("noise_from_B") {
  const RealMatrix omega = symplectic_form(1);
  const Real kappa = 0.7;

  // Cavity decay.
  const ComplexMatrix b =
      0.5 * kappa * (ComplexMatrix::Identity(2, 2) - kImag * omega.cast<Complex>());
  const NoiseMatrices nm = noise_from_B(b);
  CHECK((nm.D - kappa * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((nm.E - 0.5 * kappa * omega).cwiseAbs().maxCoeff() < 1e-14);

  // Real symmetric B has no drift.
  ComplexMatrix b_real(2, 2);
  b_real << 0.4, 0.1, 0.1, 0.2;
  CHECK(noise_from_B(b_real).E.cwiseAbs().maxCoeff() < 1e-14);

  // Position-coupling dephasing gives momentum diffusion.
  ComplexMatrix b_x = ComplexMatrix::Zero(2, 2);
  b_x(0, 0) = 0.3;
  const NoiseMatrices sg = noise_from_B(b_x);
  CHECK(sg.D(0, 0) == doctest::Approx(0.0));
  CHECK(sg.D(1, 1) == doctest::Approx(0.6));

  CHECK_THROWS(noise_from_B((ComplexMatrix(2, 2) << 1, 1, 0, 1).finished()));
}

TEST_CASE("noise_from_B round-trips with b_from_noise") {
  std::mt19937 rng(3);
  std::normal_distribution<Real> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const int d = 2 * n;
    RealMatrix d_mat(d, d), e_mat(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        d_mat(i, j) = g(rng);
        e_mat(i, j) = g(rng);
      }
    d_mat = (d_mat * d_mat.transpose()).eval();  // PSD
    e_mat = (0.5 * (e_mat - e_mat.transpose())).eval();
    const ComplexMatrix b = b_from_noise(d_mat, e_mat);
    const NoiseMatrices nm = noise_from_B(b);
    CHECK((nm.D - d_mat).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nm.E - e_mat).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("noise_from_bath_coupling") {
  // Zero coupling.
  const BathNoise zero = noise_from_bath_coupling(RealMatrix::Zero(2, 2),
                                                  RealMatrix::Identity(2, 2), RealVector::Zero(2));
  CHECK(zero.D.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.E.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.d.cwiseAbs().maxCoeff() == 0.0);

  // Vacuum bath through a beam-splitter-like coupling.
  const Real kappa = 0.49;
  const RealMatrix h_c = std::sqrt(kappa) * RealMatrix::Identity(2, 2);
  const BathNoise bs = noise_from_bath_coupling(h_c, RealMatrix::Identity(2, 2),
                                                RealVector::Zero(2));
  const RealMatrix omega = symplectic_form(1);
  CHECK((bs.D - kappa * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((bs.E - 0.5 * kappa * omega).cwiseAbs().maxCoeff() < 1e-14);

  // Thermal bath scales D linearly in (1 + 2 Nbar).
  const Real nbar = 1.7;
  const BathNoise th = noise_from_bath_coupling(h_c, (1.0 + 2.0 * nbar) * RealMatrix::Identity(2, 2),
                                                RealVector::Zero(2));
  CHECK((th.D - (1.0 + 2.0 * nbar) * bs.D).cwiseAbs().maxCoeff() < 1e-12);

  // D stays PSD for random couplings.
  std::mt19937 rng(5);
  std::normal_distribution<Real> g;
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix hc(2, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 4; ++j) hc(i, j) = g(rng);
    RealMatrix sin_bath = RealMatrix::Identity(4, 4) * (1.0 + std::abs(g(rng)));
    const BathNoise bn = noise_from_bath_coupling(hc, sin_bath, RealVector::Zero(4));
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(bn.D);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }

  CHECK_THROWS(noise_from_bath_coupling(RealMatrix::Identity(2, 2),
                                        0.1 * RealMatrix::Identity(2, 2), RealVector::Zero(2)));
}

TEST_CASE("ladder noise to canonical basis") {
  // Photon loss at rate kappa on the (a, a^dag) channel.
  const Real kappa = 1.3;
  ComplexMatrix b_a = ComplexMatrix::Zero(2, 2);
  b_a(0, 0) = kappa;
  const CanonicalNoise cn = ladder_noise_to_canonical(b_a, ComplexVector::Zero(2));
  const RealMatrix omega = symplectic_form(1);
  const ComplexMatrix expected =
      0.5 * kappa * (ComplexMatrix::Identity(2, 2) - kImag * omega.cast<Complex>());
  CHECK((cn.B - expected).cwiseAbs().maxCoeff() < 1e-14);

  // Zero maps to zero.
  CHECK(ladder_noise_to_canonical(ComplexMatrix::Zero(2, 2), ComplexVector::Zero(2))
            .B.cwiseAbs()
            .maxCoeff() == 0.0);

  // The produced B always splits into real symmetric D and antisymmetric E.
  const NoiseMatrices nm = noise_from_B(cn.B);
  CHECK((nm.D - kappa * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("validate_and_repair symmetrizes and flags") {
  HybridModel m = HybridModel::zero(1, 1);
  m.H_m << 1.0, 0.1, 0.0, 1.0;  // slightly asymmetric
  const auto warnings = m.validate_and_repair(1e-9);
  CHECK(!warnings.empty());
  CHECK(is_symmetric(m.H_m, 0.0));
  CHECK(m.H_m(0, 1) == doctest::Approx(0.05));

  HybridModel bad = HybridModel::zero(1, 1);
  bad.Gamma_z[0] = -1.0;
  CHECK_THROWS(bad.validate_and_repair());
}
