#include "gcs/measurement.hpp"

#include "gcs/quadrature.hpp"
#include "gcs/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <random>

namespace gcs {

namespace {

Real tan2_theta(Real eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error("efficiency must lie in (0, 1]");
  return (1.0 - eta) / eta;  // tan^2(arccos(sqrt(eta)))
}

// Gaussian overlap kernel
//   exp(log_weight - (mu - u)^T C^{-1} (mu - u)) / (pi^{M/2} sqrt(det C))
// for complex branch covariance C and complex mean mu at real outcome u.
// log_weight is folded into the exponent: with complex mu the quadratic form
// can be large and negative while the weight is tiny, and only the combined
// exponent stays in range.
Complex overlap_kernel(const ComplexVector& mu, const ComplexMatrix& c, const RealVector& u,
                       Complex log_weight, SqrtTracker* tracker = nullptr) {
  const int m = static_cast<int>(u.size());
  Eigen::PartialPivLU<ComplexMatrix> lu(c);
  const Complex det = lu.determinant();
  if (std::abs(det) < 1e-300) throw SingularMatrixError("general-dyne: singular sigma + sigma_m");
  const Complex root = tracker ? tracker->next(det) : std::sqrt(det);
  const ComplexVector dv = mu - u.cast<Complex>();
  const Complex quad = (dv.transpose() * lu.solve(dv))(0);
  return std::exp(log_weight - quad) / (std::pow(kPi, 0.5 * m) * root);
}

// Branch mean/covariance restricted to the outcome space of the measurement.
void restrict_branch(const GeneralDyne& meas, const BranchQuantities& q, ComplexVector* mu,
                     ComplexMatrix* c) {
  if (meas.is_degenerate()) {
    const RealMatrix& em = meas.measured;
    *mu = em.transpose().cast<Complex>() * q.r;
    *c = em.transpose().cast<Complex>() * (q.sigma + meas.sigma_m.cast<Complex>()) *
         em.cast<Complex>();
  } else {
    *mu = q.r;
    *c = q.sigma + meas.sigma_m.cast<Complex>();
  }
}

void check_outcome_dim(const GeneralDyne& meas, const RealVector& r_m) {
  if (r_m.size() != meas.outcome_dim())
    throw DimensionError("general-dyne outcome vector has wrong dimension");
}

}  // namespace

GeneralDyne homodyne_cov(Real phi, Real eta, int n_modes) {
  const Real t2 = tan2_theta(eta);
  GeneralDyne g;
  g.sigma_m = t2 * RealMatrix::Identity(2 * n_modes, 2 * n_modes);
  g.measured = RealMatrix::Zero(2 * n_modes, n_modes);
  g.degenerate = RealMatrix::Zero(2 * n_modes, n_modes);
  for (int i = 0; i < n_modes; ++i) {
    g.measured(2 * i, i) = std::cos(phi);
    g.measured(2 * i + 1, i) = std::sin(phi);
    g.degenerate(2 * i, i) = -std::sin(phi);
    g.degenerate(2 * i + 1, i) = std::cos(phi);
  }
  return g;
}

GeneralDyne heterodyne_cov(Real eta, int n_modes) {
  const Real t2 = tan2_theta(eta);
  GeneralDyne g;
  g.sigma_m = (1.0 + 2.0 * t2) * RealMatrix::Identity(2 * n_modes, 2 * n_modes);
  return g;
}

void QubitPOVM::validate(Real tol) const {
  if (elements.empty()) throw Error("QubitPOVM: no elements");
  const int dim = static_cast<int>(elements[0].rows());
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& m : elements) {
    if (m.rows() != dim || m.cols() != dim) throw DimensionError("QubitPOVM: ragged elements");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.eigenvalues().minCoeff() < -tol) throw Error("QubitPOVM: element not positive");
    sum += m;
  }
  if ((sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol)
    throw Error("QubitPOVM: elements do not sum to the identity");
}

QubitPOVM pauli_povm(char axis, int qubit, int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits) throw Error("pauli_povm: qubit index out of range");
  ComplexMatrix plus(2, 2), minus(2, 2);
  switch (axis) {
    case 'x':
      plus << 0.5, 0.5, 0.5, 0.5;
      minus << 0.5, -0.5, -0.5, 0.5;
      break;
    case 'y':
      plus << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
      minus << 0.5, Complex(0, 0.5), Complex(0, -0.5), 0.5;
      break;
    case 'z':
      plus << 1, 0, 0, 0;
      minus << 0, 0, 0, 1;
      break;
    default:
      throw Error("pauli_povm: axis must be x, y or z");
  }
  auto lift = [&](const ComplexMatrix& m) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int i = 0; i < n_qubits; ++i) {
      const ComplexMatrix& factor = (i == qubit) ? m : ComplexMatrix::Identity(2, 2);
      ComplexMatrix next(out.rows() * 2, out.cols() * 2);
      for (int a = 0; a < out.rows(); ++a)
        for (int b = 0; b < out.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = out(a, b) * factor;
      out = next;
    }
    return out;
  };
  QubitPOVM povm;
  povm.elements = {lift(plus), lift(minus)};
  povm.labels = {std::string(1, axis) + "+", std::string(1, axis) + "-"};
  return povm;
}

Complex CVStateMixture::eval_char(const RealVector& r_tilde) const {
  const ComplexVector rt = r_tilde.cast<Complex>();
  Complex acc(0.0, 0.0);
  for (const auto& c : components) {
    const Complex quad = (rt.transpose() * c.sigma * rt)(0);
    const Complex lin = (rt.transpose() * c.r)(0);
    acc += c.weight * std::exp(-0.25 * quad + kImag * lin);
  }
  return acc;
}

Complex CVStateMixture::eval_wigner(const RealVector& r_tilde) const {
  const int n = n_modes;
  Complex acc(0.0, 0.0);
  for (const auto& c : components) {
    Eigen::PartialPivLU<ComplexMatrix> lu(c.sigma);
    const Complex det = lu.determinant();
    if (std::abs(det) < 1e-300) throw SingularMatrixError("CVStateMixture: singular sigma");
    const ComplexVector dv = r_tilde.cast<Complex>() - c.r;
    const Complex quad = (dv.transpose() * lu.solve(dv))(0);
    acc += c.weight * std::pow(2.0, n) / std::pow(kPi, n) * std::exp(-quad) / std::sqrt(det);
  }
  return acc;
}

std::vector<QubitOutcome> qubit_measure(const GCSState& state, const QubitPOVM& povm) {
  povm.validate();
  const ComplexMatrix rho = qrdm(state);
  const int dim = state.n_labels();
  std::vector<QubitOutcome> outcomes;
  for (size_t i = 0; i < povm.elements.size(); ++i) {
    const ComplexMatrix& m = povm.elements[i];
    if (m.rows() != dim) throw DimensionError("qubit_measure: POVM dimension mismatch");
    QubitOutcome out;
    out.label = i < povm.labels.size() ? povm.labels[i] : std::to_string(i);
    Complex p(0.0, 0.0);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) p += m(b, a) * rho(a, b);
    if (std::abs(p.imag()) > 1e-10) throw Error("qubit_measure: probability not real");
    out.probability = p.real();
    if (out.probability > 1e-300) {
      out.post.n_modes = state.n_modes();
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          if (std::abs(m(b, a)) == 0.0) continue;
          const BranchQuantities q = state.branch(BranchLabel::from_index(state.n_qubits(), a),
                                                  BranchLabel::from_index(state.n_qubits(), b));
          if (!q.active) continue;
          CVStateMixture::Component comp;
          comp.weight = m(b, a) * std::exp(q.r0) / out.probability;
          comp.sigma = q.sigma;
          comp.r = q.r;
          out.post.components.push_back(std::move(comp));
        }
      }
    } else {
      out.probability = std::max(out.probability, 0.0);
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

Real generaldyne_density(const GCSState& state, const GeneralDyne& meas, const RealVector& r_m) {
  check_outcome_dim(meas, r_m);
  Real density = 0.0;
  const int dim = state.n_labels();
  for (int a = 0; a < dim; ++a) {
    const BranchQuantities& q = state.stored(a, a);
    if (!q.active) continue;
    ComplexVector mu;
    ComplexMatrix c;
    restrict_branch(meas, q, &mu, &c);
    const Complex val = overlap_kernel(mu, c, r_m, Complex(q.r0.real(), 0.0));
    density += val.real();
  }
  return density;
}

Real generaldyne_density_regularized(const GCSState& state, const GeneralDyne& meas,
                                     const RealVector& r_m, Real z2) {
  if (!meas.is_degenerate()) return generaldyne_density(state, meas, r_m);
  // Full 2n x 2n covariance with conjugate variance 1/z2, marginalized over
  // the unobserved conjugate outcomes.
  const RealMatrix em = meas.measured;
  const RealMatrix ed = meas.degenerate;
  RealMatrix sigma_full = meas.sigma_m + z2 * em * em.transpose() +
                          (1.0 / z2) * ed * ed.transpose();
  Real density = 0.0;
  for (int a = 0; a < state.n_labels(); ++a) {
    const BranchQuantities& q = state.stored(a, a);
    if (!q.active) continue;
    const RealMatrix c_full = q.sigma.real() + sigma_full;
    // Marginal over measured directions of a Gaussian with covariance-form
    // kernel exp(-v^T C^{-1} v): the block of C on the measured subspace.
    const RealMatrix c_meas = em.transpose() * c_full * em;
    const RealVector mu = em.transpose() * q.r.real();
    const RealVector dv = mu - r_m;
    const int m = static_cast<int>(r_m.size());
    Eigen::PartialPivLU<RealMatrix> lu(c_meas);
    density += std::exp(q.r0.real()) * std::exp(-dv.dot(lu.solve(dv))) /
               (std::pow(kPi, 0.5 * m) * std::sqrt(lu.determinant()));
  }
  return density;
}

PostQrdm generaldyne_post_qrdm(const GCSState& state, const GeneralDyne& meas,
                               const RealVector& r_m) {
  check_outcome_dim(meas, r_m);
  const int dim = state.n_labels();
  PostQrdm out;
  out.unnormalized = ComplexMatrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const BranchQuantities& q = state.stored(a, b);
      if (!q.active) continue;
      ComplexVector mu;
      ComplexMatrix c;
      restrict_branch(meas, q, &mu, &c);
      const Complex val = overlap_kernel(mu, c, r_m, q.r0);
      out.unnormalized(a, b) = val;
      out.unnormalized(b, a) = std::conj(val);
    }
  }
  const Complex tr = out.unnormalized.trace();
  out.density = tr.real();
  if (out.density > 1e-300) {
    out.normalized = out.unnormalized / tr.real();
  } else {
    // Outcome in the far tails of every branch; probabilities numerically 0.
    out.density = 0.0;
    out.normalized = ComplexMatrix::Zero(dim, dim);
  }
  return out;
}

RealVector joint_measurement_density(const GCSState& state, const GeneralDyne& meas,
                                     const QubitPOVM& povm, const RealVector& r_m) {
  povm.validate();
  const PostQrdm post = generaldyne_post_qrdm(state, meas, r_m);
  const int dim = state.n_labels();
  RealVector densities(povm.elements.size());
  for (size_t i = 0; i < povm.elements.size(); ++i) {
    Complex p(0.0, 0.0);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) p += povm.elements[i](b, a) * post.unnormalized(a, b);
    if (std::abs(p.imag()) > 1e-10)
      throw Error("joint_measurement_density: density not real");
    densities[static_cast<int>(i)] = p.real();
  }
  return densities;
}

Real negativity_two_qubit(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw DimensionError("negativity_two_qubit: need a 4x4 density matrix");
  if (!is_hermitian(rho, 1e-9)) throw Error("negativity_two_qubit: input not Hermitian");
  // Partial transpose over qubit 2: (a1 a2),(b1 b2) -> (a1 b2),(b1 a2).
  ComplexMatrix pt(4, 4);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
          pt(2 * a1 + b2, 2 * b1 + a2) = rho(2 * a1 + a2, 2 * b1 + b2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (pt + pt.adjoint()));
  Real neg = 0.0;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()[i] < 0.0) neg -= es.eigenvalues()[i];
  return neg;
}

Real postselect_success_probability(const GCSState& state, const GeneralDyne& meas, Real lo,
                                    Real hi, Real tol) {
  if (meas.outcome_dim() != 1)
    throw Error("postselect_success_probability: needs a 1-D homodyne measurement");
  if (hi <= lo) return 0.0;
  return adaptive_gk15_scalar(
      [&](Real u) {
        RealVector r_m(1);
        r_m[0] = u;
        return generaldyne_density(state, meas, r_m);
      },
      lo, hi, tol);
}

namespace {
// Gaussian Weyl-moment recursion: mean m, pair covariance c.
Complex gaussian_moment(const std::vector<int>& idx, size_t used_mask, const ComplexVector& m,
                        const ComplexMatrix& c) {
  // Find first unused index.
  int first = -1;
  for (size_t i = 0; i < idx.size(); ++i)
    if (!(used_mask & (size_t{1} << i))) {
      first = static_cast<int>(i);
      break;
    }
  if (first < 0) return Complex(1.0, 0.0);
  const size_t mask1 = used_mask | (size_t{1} << first);
  Complex acc = m[idx[first]] * gaussian_moment(idx, mask1, m, c);
  for (size_t i = first + 1; i < idx.size(); ++i) {
    if (used_mask & (size_t{1} << i)) continue;
    acc += c(idx[first], idx[i]) * gaussian_moment(idx, mask1 | (size_t{1} << i), m, c);
  }
  return acc;
}
}  // namespace

ExpectationResult expectation_product(const GCSState& state, const std::vector<int>& indices) {
  const int d = 2 * state.n_modes();
  if (indices.size() > 60) throw Error("expectation_product: too many factors");
  for (int i : indices)
    if (i < 0 || i >= d) throw DimensionError("expectation_product: operator index out of range");
  const int dim = state.n_labels();
  ExpectationResult out;
  out.per_branch = ComplexMatrix::Zero(dim, dim);
  out.joint = Complex(0.0, 0.0);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const BranchQuantities q = state.branch(BranchLabel::from_index(state.n_qubits(), a),
                                              BranchLabel::from_index(state.n_qubits(), b));
      if (!q.active) continue;
      const ComplexMatrix c = 0.5 * q.sigma;
      out.per_branch(a, b) = std::exp(q.r0) * gaussian_moment(indices, 0, q.r, c);
    }
    out.joint += out.per_branch(a, a);
  }
  return out;
}

RealMatrix sample_generaldyne(const GCSState& state, const GeneralDyne& meas, int n_samples,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = meas.outcome_dim();
  RealMatrix samples(n_samples, m);

  // Branch weights and restricted real moments (diagonal keys only).
  std::vector<Real> weights;
  std::vector<RealVector> means;
  std::vector<RealMatrix> chols;
  for (int a = 0; a < state.n_labels(); ++a) {
    const BranchQuantities& q = state.stored(a, a);
    if (!q.active) continue;
    ComplexVector mu;
    ComplexMatrix c;
    restrict_branch(meas, q, &mu, &c);
    weights.push_back(std::exp(q.r0.real()));
    means.push_back(mu.real());
    // Density kernel exp(-v^T C^{-1} v) has covariance C / 2.
    Eigen::LLT<RealMatrix> llt(0.5 * c.real());
    chols.push_back(llt.matrixL());
  }

  if (m == 1) {
    // Inverse-CDF through the erf-based mixture CDF, bisected to 1e-12.
    auto cdf = [&](Real u) {
      Real acc = 0.0;
      for (size_t i = 0; i < weights.size(); ++i) {
        const Real s = chols[i](0, 0);  // std dev of the outcome Gaussian
        acc += weights[i] * 0.5 * std::erfc(-(u - means[i][0]) / (s * std::sqrt(2.0)));
      }
      return acc;
    };
    Real lo = means[0][0], hi = means[0][0], span = 1.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      lo = std::min(lo, means[i][0] - 12.0 * chols[i](0, 0) * std::sqrt(2.0));
      hi = std::max(hi, means[i][0] + 12.0 * chols[i](0, 0) * std::sqrt(2.0));
    }
    span = hi - lo;
    std::uniform_real_distribution<Real> unif(0.0, 1.0);
    for (int s = 0; s < n_samples; ++s) {
      const Real target = unif(rng);
      Real a = lo, b = hi;
      for (int it = 0; it < 100 && (b - a) > 1e-12 * span; ++it) {
        const Real mid = 0.5 * (a + b);
        (cdf(mid) < target ? a : b) = mid;
      }
      samples(s, 0) = 0.5 * (a + b);
    }
    return samples;
  }

  // Exact mixture sampling: pick a branch by weight, then draw the Gaussian.
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<Real> normal(0.0, 1.0);
  for (int s = 0; s < n_samples; ++s) {
    const int i = pick(rng);
    RealVector z(m);
    for (int k = 0; k < m; ++k) z[k] = normal(rng);
    samples.row(s) = (means[i] + chols[i] * z).transpose();
  }
  return samples;
}

}  // namespace gcs
