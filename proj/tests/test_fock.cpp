#include "gcs/fock.hpp"
#include "gcs/state.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace gcs;

namespace {

ComplexMatrix weight_one_qrdm() {
  ComplexMatrix q(2, 2);
  q << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  return q;
}

}  // namespace

TEST_CASE("truncated operators") {
  const FockConfig cfg{20, 1e-8};
  const ModeOperators ops = build_operators(cfg, 1);

  // a|1> = |0>.
  CHECK(ops.a[0](0, 1) == Complex(1.0, 0.0));
  CHECK(ops.a[0](0, 0) == Complex(0.0, 0.0));

  // <0| x^2 |0> = 1/2.
  const ComplexMatrix x2 = ops.x[0] * ops.x[0];
  CHECK(x2(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));

  // Commutator defect is confined to the last Fock level:
  // [x, p] = i 1 except the bottom-right corner, which is i (1 - n_max).
  const ComplexMatrix comm = ops.x[0] * ops.p[0] - ops.p[0] * ops.x[0];
  for (int n = 0; n < cfg.n_max - 1; ++n) CHECK(std::abs(comm(n, n) - kImag) < 1e-12);
  CHECK(std::abs(comm(cfg.n_max - 1, cfg.n_max - 1) -
                 kImag * static_cast<Real>(1 - cfg.n_max)) < 1e-10);
}

TEST_CASE("displacement matrix against the exponential") {
  // Truncation spoils unitarity near the cutoff; well inside the basis the
  // Laguerre construction must match exp(alpha a^dag - alpha* a).
  const int n_max = 40;
  const Complex alpha(0.6, -0.35);
  const ComplexMatrix d_laguerre = displacement_matrix(alpha, n_max);

  ComplexMatrix a = ComplexMatrix::Zero(n_max, n_max);
  for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  const ComplexMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const ComplexMatrix d_exp = gen.exp();
  CHECK((d_laguerre - d_exp).topLeftCorner(15, 15).cwiseAbs().maxCoeff() < 1e-10);

  // First column is the coherent state |alpha>.
  const Real a2 = std::norm(alpha);
  Complex amp = std::exp(-0.5 * a2);
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(d_laguerre(n, 0) - amp) < 1e-12);
    amp *= alpha / std::sqrt(static_cast<Real>(n + 1));
  }

  // Unitary on the well-resolved block.
  const ComplexMatrix prod = d_laguerre.adjoint() * d_laguerre;
  CHECK((prod.topLeftCorner(12, 12) - ComplexMatrix::Identity(12, 12)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("initial state synthesis") {
  const FockConfig cfg{60, 1e-8};

  // Vacuum.
  const FockDensityMatrix vac =
      build_initial_state(RealVector::Zero(2), RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  CHECK(std::abs(vac.block(0, 0)(0, 0) - Complex(1, 0)) < 1e-12);

  // Displaced state has <x> = 2.
  RealVector r0(2);
  r0 << 2.0, 0.0;
  const FockDensityMatrix disp =
      build_initial_state(r0, RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  const ExtractedBranch eb = extract_phase_space(disp, BranchLabel({1}), BranchLabel({1}));
  CHECK(eb.r[0].real() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(eb.r[1]) < 1e-9);

  // Squeezed thermal: recovered sigma = 2.6 diag(2, 1/2).
  RealMatrix sigma0(2, 2);
  sigma0 << 2.6 * 2.0, 0.0, 0.0, 2.6 * 0.5;
  const FockDensityMatrix sq =
      build_initial_state(RealVector::Zero(2), sigma0, weight_one_qrdm(), cfg);
  const ExtractedBranch ebs = extract_phase_space(sq, BranchLabel({1}), BranchLabel({1}));
  CHECK((ebs.sigma.real() - sigma0).cwiseAbs().maxCoeff() < 1e-6);

  // Rotated squeezed covariance (tests the Williamson angle handling).
  const Real th = 0.6;
  RealMatrix rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  RealMatrix sigma_rot = rot * sigma0 * rot.transpose();
  const FockDensityMatrix sq2 =
      build_initial_state(RealVector::Zero(2), sigma_rot, weight_one_qrdm(), cfg);
  const ExtractedBranch eb2 = extract_phase_space(sq2, BranchLabel({1}), BranchLabel({1}));
  CHECK((eb2.sigma.real() - sigma_rot).cwiseAbs().maxCoeff() < 1e-6);

  // Truncation guard.
  RealVector big(2);
  big << 14.0, 0.0;
  CHECK_THROWS_AS(
      build_initial_state(big, RealMatrix::Identity(2, 2), weight_one_qrdm(), FockConfig{20, 1e-8}),
      TruncationError);
}

TEST_CASE("characteristic function matches the Gaussian form") {
  const FockConfig cfg{50, 1e-8};
  RealVector r0(2);
  r0 << 0.8, -0.5;
  RealMatrix sigma0(2, 2);
  sigma0 << 1.7, 0.3, 0.3, 0.9;
  const FockDensityMatrix rho = build_initial_state(r0, sigma0, weight_one_qrdm(), cfg);
  GCSState st = GCSState::product(1, r0, sigma0, weight_one_qrdm());
  const RealMatrix omega = symplectic_form(1);
  for (Real x : {-0.9, 0.3, 1.2}) {
    for (Real p : {-0.4, 0.8}) {
      RealVector rbar(2);
      rbar << x, p;
      const Complex oracle = fock_char(rho, BranchLabel({1}), BranchLabel({1}), rbar);
      const RealVector rt = omega * rbar;
      const Complex ours = eval_branched_char(st, {BranchLabel({1}), BranchLabel({1})}, rt);
      CHECK(std::abs(oracle - ours) < 1e-8);
    }
  }
}

TEST_CASE("vacuum Wigner grid") {
  const FockConfig cfg{30, 1e-8};
  const FockDensityMatrix vac =
      build_initial_state(RealVector::Zero(2), RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  std::vector<Real> xs, ps;
  const int grid = 41;
  const Real half = 5.0;
  for (int i = 0; i < grid; ++i) xs.push_back(-half + 2 * half * i / (grid - 1));
  ps = xs;
  const RealMatrix w = wigner_grid(vac, xs, ps);
  // Standard normalization: peak 1/pi, positive, integrates to 1.
  CHECK(w((grid - 1) / 2, (grid - 1) / 2) == doctest::Approx(1.0 / kPi).epsilon(1e-9));
  CHECK(w.minCoeff() > -1e-12);
  const Real step = 2 * half / (grid - 1);
  CHECK((w.sum() * step * step) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("no dynamics keeps the density matrix constant") {
  const FockConfig cfg{20, 1e-8};
  const FockDensityMatrix rho0 =
      build_initial_state(RealVector::Zero(2), RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  HybridModel m = HybridModel::zero(1, 1);
  const auto rhos = evolve(m, rho0, {0.0, 0.7}, cfg);
  CHECK((rhos.back().rho - rho0.rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("damped coherent state") {
  // Pure cavity decay kappa from a coherent state: <a>(tau) = alpha
  // e^{-kappa tau / 2} e^{-i omega tau}; trace preserved.
  const FockConfig cfg{40, 1e-7};
  const Real kappa = 0.8, omega_c = 1.3, alpha0 = 1.5;
  HybridModel m = HybridModel::zero(1, 1);
  m.H_m = omega_c * RealMatrix::Identity(2, 2);
  const NoiseMatrices nm = noise_from_B(
      0.5 * kappa *
      (ComplexMatrix::Identity(2, 2) - kImag * symplectic_form(1).cast<Complex>()));
  m.D = nm.D;
  m.E = nm.E;

  RealVector r0(2);
  r0 << std::sqrt(2.0) * alpha0, 0.0;
  const FockDensityMatrix rho0 =
      build_initial_state(r0, RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  const Real tau = 0.9;
  const auto rhos = evolve(m, rho0, {tau}, cfg);
  const ExtractedBranch eb = extract_phase_space(rhos.back(), BranchLabel({1}), BranchLabel({1}));
  const Complex a_expected =
      alpha0 * std::exp(-0.5 * kappa * tau) * std::exp(-kImag * omega_c * tau);
  const Complex a_measured = (eb.r[0] + kImag * eb.r[1]) / std::sqrt(2.0);
  CHECK(std::abs(a_measured - a_expected) < 1e-6);
  CHECK(std::abs(rhos.back().rho.trace().real() - 1.0) < 1e-8);
}

TEST_CASE("truncation overflow raises") {
  const FockConfig cfg{12, 1e-6};
  HybridModel m = HybridModel::zero(1, 1);
  m.H_m = RealMatrix::Identity(2, 2);
  m.r_m << 6.0, 0.0;  // strong force pushes population up the ladder
  const FockDensityMatrix rho0 =
      build_initial_state(RealVector::Zero(2), RealMatrix::Identity(2, 2), weight_one_qrdm(), cfg);
  CHECK_THROWS_AS(evolve(m, rho0, {2.0}, cfg), TruncationError);
}
