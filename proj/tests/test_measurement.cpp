#include "gcs/dynamics.hpp"
#include "gcs/measurement.hpp"
#include "gcs/regressions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcs;

namespace {

GCSState plus_vacuum() {
  return GCSState::product(1, RealVector::Zero(2), RealMatrix::Identity(2, 2),
                           ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0)));
}

GCSState sg_state_at(Real tau, Real f_u = 2.0, Real f_q = 0.5, Real n_p = 0.8, Real s = 2.0,
                     Real gx = 0.1, Real gz = 0.8) {
  HybridModel m = HybridModel::zero(1, 1);
  m.H_m = RealMatrix::Identity(2, 2);
  m.r_m << f_u, 0.0;
  m.r_q[0] << f_q, 0.0;
  m.Gamma_z[0] = gz;
  m.D(1, 1) = 2.0 * gx;
  const Real nu = 1.0 + 2.0 * n_p;
  RealMatrix sigma0 = RealMatrix::Zero(2, 2);
  sigma0(0, 0) = nu * s;
  sigma0(1, 1) = nu / s;
  GCSState st = GCSState::product(1, RealVector::Zero(2), sigma0,
                                  ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0)));
  return closed_form_linear_open(m, st, tau);
}

ComplexMatrix random_unitary2(std::mt19937& rng) {
  std::normal_distribution<Real> g;
  ComplexMatrix a(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  return q;
}

}  // namespace

TEST_CASE("pauli POVM construction") {
  for (char axis : {'x', 'y', 'z'}) {
    const QubitPOVM povm = pauli_povm(axis, 0, 2);
    CHECK_NOTHROW(povm.validate());
    CHECK(povm.elements.size() == 2);
    CHECK(povm.elements[0].rows() == 4);
  }
  CHECK_THROWS(pauli_povm('w', 0, 1));
}

TEST_CASE("qubit measurement probabilities") {
  // sigma_z on |+>: both outcomes 1/2 (diagonal QRDM entries).
  GCSState st = plus_vacuum();
  const auto z = qubit_measure(st, pauli_povm('z', 0, 1));
  CHECK(z[0].probability == doctest::Approx(0.5));
  CHECK(z[1].probability == doctest::Approx(0.5));

  // sigma_x on the Stern-Gerlach state follows the interference formula.
  const ParamMap p = {{"f_u", 2.0}, {"f_q", 0.5}, {"N_p", 0.8}, {"s", 2.0},
                      {"Gamma_x", 0.1}, {"Gamma_z", 0.8}, {"omega_q", 0.0}};
  for (Real tau : {0.7, 2.2, kPi}) {
    const auto x = qubit_measure(sg_state_at(tau), pauli_povm('x', 0, 1));
    CHECK(x[0].probability ==
          doctest::Approx(regression_eval("sg-px-plus", p, tau)).epsilon(1e-9));
    CHECK(x[0].probability + x[1].probability == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Post-measurement characteristic function equals the POVM contraction.
  const GCSState sg = sg_state_at(1.3);
  const auto outcomes = qubit_measure(sg, pauli_povm('x', 0, 1));
  RealVector rt(2);
  rt << 0.4, -0.8;
  const Complex direct =
      0.5 *
      (eval_branched_char(sg, {BranchLabel({1}), BranchLabel({1})}, rt) +
       eval_branched_char(sg, {BranchLabel({-1}), BranchLabel({-1})}, rt) +
       eval_branched_char(sg, {BranchLabel({1}), BranchLabel({-1})}, rt) +
       eval_branched_char(sg, {BranchLabel({-1}), BranchLabel({1})}, rt)) /
      outcomes[0].probability;
  CHECK(std::abs(outcomes[0].post.eval_char(rt) - direct) < 1e-12);
}

TEST_CASE("zero-probability outcomes return an empty state") {
  ComplexMatrix qrdm0(2, 2);
  qrdm0 << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  GCSState st = GCSState::product(1, RealVector::Zero(2), RealMatrix::Identity(2, 2), qrdm0);
  const auto outcomes = qubit_measure(st, pauli_povm('z', 0, 1));
  CHECK(outcomes[0].probability == doctest::Approx(1.0));
  CHECK(outcomes[1].probability == 0.0);
  CHECK(outcomes[1].post.components.empty());
}

TEST_CASE("heterodyne of the vacuum") {
  ComplexMatrix one(1, 1);
  one << Complex(1.0, 0.0);
  // Single branch with weight 1: model as a 1-qubit state with inactive rest.
  ComplexMatrix qrdm0(2, 2);
  qrdm0 << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  GCSState vac = GCSState::product(1, RealVector::Zero(2), RealMatrix::Identity(2, 2), qrdm0);
  const GeneralDyne het = heterodyne_cov(1.0, 1);
  RealVector r_m(2);
  r_m << 0.5, -1.0;
  const Real density = generaldyne_density(vac, het, r_m);
  CHECK(density ==
        doctest::Approx(std::exp(-0.5 * r_m.squaredNorm()) / (2.0 * kPi)).epsilon(1e-12));

  // Integrates to one over the outcome plane.
  Real integral = 0.0;
  const int grid = 101;
  const Real half = 8.0;
  const Real step = 2.0 * half / (grid - 1);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      RealVector u(2);
      u << -half + i * step, -half + j * step;
      integral += generaldyne_density(vac, het, u) * step * step;
    }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("homodyne covariance values") {
  const GeneralDyne ideal = homodyne_cov(0.0, 1.0, 1);
  CHECK(ideal.sigma_m.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ideal.is_degenerate());

  const GeneralDyne noisy = homodyne_cov(0.0, 0.6, 1);
  CHECK(noisy.sigma_m(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const GeneralDyne het = heterodyne_cov(0.6, 1);
  CHECK(het.sigma_m(0, 0) == doctest::Approx(1.0 + 2.0 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(!het.is_degenerate());

  CHECK_THROWS(homodyne_cov(0.0, 0.0, 1));
  CHECK_THROWS(homodyne_cov(0.0, 1.5, 1));
}

TEST_CASE("homodyne density integrates to one and matches regularized limit") {
  const GCSState sg = sg_state_at(1.1);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.6, 1);
  Real integral = 0.0;
  const int grid = 3001;
  const Real half = 30.0;
  const Real step = 2.0 * half / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    RealVector u(1);
    u << -half + i * step;
    integral += generaldyne_density(sg, hom, u) * step;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  RealVector u(1);
  u << 0.9;
  CHECK(generaldyne_density(sg, hom, u) ==
        doctest::Approx(generaldyne_density_regularized(sg, hom, u, 1e-8)).epsilon(1e-6));
}

TEST_CASE("two-mode homodyne density normalizes on the measured plane") {
  // One qubit, two modes: outcomes live on the two measured quadratures.
  RealVector r0(4);
  r0 << 0.6, 0.0, -0.4, 0.2;
  RealMatrix sigma0 = RealMatrix::Identity(4, 4);
  sigma0(0, 0) = 1.7;
  sigma0(1, 1) = 1.0 / 1.7;
  GCSState st = GCSState::product(2, r0, sigma0, ComplexMatrix::Constant(2, 2, Complex(0.5, 0)));
  const GeneralDyne hom = homodyne_cov(0.0, 0.7, 2);
  CHECK(hom.outcome_dim() == 2);
  Real integral = 0.0;
  const int grid = 161;
  const Real half = 8.0;
  const Real step = 2.0 * half / (grid - 1);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      RealVector u(2);
      u << -half + i * step, -half + j * step;
      integral += generaldyne_density(st, hom, u) * step * step;
    }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("post-measurement QRDM is physical") {
  const GCSState sg = sg_state_at(2.0);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.8, 1);
  for (Real u : {-2.0, 0.0, 1.5}) {
    RealVector r_m(1);
    r_m << u;
    const PostQrdm post = generaldyne_post_qrdm(sg, hom, r_m);
    CHECK(post.density > 0.0);
    CHECK(is_hermitian(post.normalized, 1e-12));
    CHECK(std::abs(post.normalized.trace().real() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(post.normalized);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }

  // Far-tail outcomes flag zero density.
  RealVector far(1);
  far << 1e6;
  const PostQrdm tail = generaldyne_post_qrdm(sg, hom, far);
  CHECK(tail.density == 0.0);
}

TEST_CASE("joint measurement marginalizes to the general-dyne density") {
  const GCSState sg = sg_state_at(kPi);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.6, 1);
  const QubitPOVM povm = pauli_povm('x', 0, 1);
  for (Real u : {-1.0, 0.0, 0.7, 2.5}) {
    RealVector r_m(1);
    r_m << u;
    const RealVector joint = joint_measurement_density(sg, hom, povm, r_m);
    CHECK(joint.minCoeff() > -1e-10);
    CHECK(joint.sum() == doctest::Approx(generaldyne_density(sg, hom, r_m)).epsilon(1e-10));
  }

  // Identity-only POVM reduces to the plain density.
  QubitPOVM identity;
  identity.elements = {ComplexMatrix::Identity(2, 2)};
  identity.labels = {"1"};
  RealVector r_m(1);
  r_m << 0.3;
  CHECK(joint_measurement_density(sg, hom, identity, r_m)[0] ==
        doctest::Approx(generaldyne_density(sg, hom, r_m)).epsilon(1e-12));
}

TEST_CASE("joint-measurement fringe period is set by the branch separation") {
  // Noiseless interferometer at tau = pi with ideal momentum homodyne: the
  // interference part of the joint densities oscillates in p_m with angular
  // frequency delta X = 4 f_q, i.e. adjacent zeros pi / (4 f_q) apart.
  const Real f_q = 0.5;
  const GCSState sg = sg_state_at(kPi, 2.0, f_q, 0.0, 1.0, 0.0, 0.0);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 1.0, 1);
  const QubitPOVM povm = pauli_povm('x', 0, 1);
  auto interference = [&](Real u) {
    RealVector r_m(1);
    r_m << u;
    const RealVector joint = joint_measurement_density(sg, hom, povm, r_m);
    return joint[0] - joint[1];
  };
  // Bracket two adjacent zeros starting from p_m = 0 and bisect.
  auto find_zero = [&](Real lo, Real hi) {
    for (int it = 0; it < 80; ++it) {
      const Real mid = 0.5 * (lo + hi);
      if (interference(lo) * interference(mid) <= 0.0) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  const Real expected_spacing = kPi / (4.0 * f_q);
  Real prev = NAN, spacing = 0.0;
  Real lo = 0.05;
  for (int n = 0; n < 2; ++n) {
    Real hi = lo + 0.05;
    while (interference(lo) * interference(hi) > 0.0) hi += 0.05;
    const Real zero = find_zero(lo, hi);
    if (!std::isnan(prev)) spacing = zero - prev;
    prev = zero;
    lo = zero + 0.2;
  }
  CHECK(spacing == doctest::Approx(expected_spacing).epsilon(1e-6));
}

TEST_CASE("negativity") {
  // Bell state (|01> + |10>)/sqrt(2).
  ComplexMatrix bell = ComplexMatrix::Zero(4, 4);
  bell(1, 1) = bell(2, 2) = bell(1, 2) = bell(2, 1) = 0.5;
  CHECK(negativity_two_qubit(bell) == doctest::Approx(0.5).epsilon(1e-12));

  // Product state.
  ComplexMatrix prod = ComplexMatrix::Zero(4, 4);
  prod(0, 0) = 1.0;
  CHECK(negativity_two_qubit(prod) == doctest::Approx(0.0));

  // Invariance under local unitaries.
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix u1 = random_unitary2(rng);
    const ComplexMatrix u2 = random_unitary2(rng);
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) u.block(2 * a, 2 * b, 2, 2) = u1(a, b) * u2;
    const ComplexMatrix rotated = u * bell * u.adjoint();
    CHECK(std::abs(negativity_two_qubit(rotated) - 0.5) < 1e-10);
  }

  CHECK_THROWS(negativity_two_qubit((ComplexMatrix(4, 4).setRandom())));
}

TEST_CASE("post-selection probability") {
  const GCSState sg = sg_state_at(1.0);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.6, 1);
  // Whole axis integrates to one; a point region to zero.
  CHECK(postselect_success_probability(sg, hom, -40.0, 40.0) ==
        doctest::Approx(1.0).epsilon(1e-7));
  CHECK(postselect_success_probability(sg, hom, 0.3, 0.3) == 0.0);
}

TEST_CASE("expectation values from the generating function") {
  GCSState vac = plus_vacuum();
  // Order 1 on a centred state vanishes.
  const ExpectationResult first = expectation_product(vac, {0});
  CHECK(std::abs(first.joint) < 1e-15);

  // x^2 on the vacuum: 1/2 per branch weight.
  const ExpectationResult xx = expectation_product(vac, {0, 0});
  CHECK(xx.joint.real() == doctest::Approx(0.5).epsilon(1e-12));

  // Weyl-ordered first/second moments match r and sigma/2 + r r^T.
  RealVector r0(2);
  r0 << 0.8, -0.4;
  RealMatrix sigma0(2, 2);
  sigma0 << 1.5, 0.2, 0.2, 0.8;
  GCSState st = GCSState::product(1, r0, sigma0, ComplexMatrix::Constant(2, 2, Complex(0.5, 0)));
  const ExpectationResult x1 = expectation_product(st, {0});
  CHECK(x1.joint.real() == doctest::Approx(r0[0]).epsilon(1e-12));
  const ExpectationResult xp = expectation_product(st, {0, 1});
  CHECK(xp.joint.real() == doctest::Approx(0.5 * sigma0(0, 1) + r0[0] * r0[1]).epsilon(1e-12));

  // Fourth moment of a centred Gaussian: 3 (sigma_xx / 2)^2.
  GCSState centred = GCSState::product(1, RealVector::Zero(2), sigma0,
                                       ComplexMatrix::Constant(2, 2, Complex(0.5, 0)));
  const ExpectationResult x4 = expectation_product(centred, {0, 0, 0, 0});
  CHECK(x4.joint.real() ==
        doctest::Approx(3.0 * std::pow(0.5 * sigma0(0, 0), 2)).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic and matches the analytic moments") {
  const GCSState sg = sg_state_at(1.4);
  const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.6, 1);
  const RealMatrix s1 = sample_generaldyne(sg, hom, 400, 1234ULL);
  const RealMatrix s2 = sample_generaldyne(sg, hom, 400, 1234ULL);
  CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);

  // Mean within 5 sigma / sqrt(N) of the analytic mixture mean.
  Real mean_analytic = 0.0;
  const int grid = 4001;
  const Real half = 25.0;
  const Real step = 2.0 * half / (grid - 1);
  Real var = 0.0;
  for (int i = 0; i < grid; ++i) {
    RealVector u(1);
    u << -half + i * step;
    const Real p = generaldyne_density(sg, hom, u);
    mean_analytic += u[0] * p * step;
    var += u[0] * u[0] * p * step;
  }
  var -= mean_analytic * mean_analytic;
  const Real sample_mean = s1.col(0).mean();
  CHECK(std::abs(sample_mean - mean_analytic) < 5.0 * std::sqrt(var / 400.0));

  // Heterodyne path (2-D outcomes, mixture sampling).
  const GeneralDyne het = heterodyne_cov(0.9, 1);
  const RealMatrix h1 = sample_generaldyne(sg, het, 100, 7ULL);
  CHECK(h1.cols() == 2);
}
