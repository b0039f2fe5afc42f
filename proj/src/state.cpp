#include "gcs/state.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace gcs {

BranchQuantities BranchQuantities::conjugated() const {
  BranchQuantities out;
  out.sigma = sigma.conjugate();
  out.r = r.conjugate();
  out.r0 = std::conj(r0);
  out.active = active;
  return out;
}

GCSState::GCSState(int n_modes, int n_qubits) : n_modes_(n_modes), n_qubits_(n_qubits) {
  if (n_modes < 1) throw DimensionError("GCSState: need at least one mode");
  if (n_qubits < 1) throw DimensionError("GCSState: need at least one qubit");
  const int dim = 1 << n_qubits;
  upper_.resize(upper_triangle_count(dim));
  for (auto& q : upper_) {
    q.sigma = ComplexMatrix::Zero(2 * n_modes, 2 * n_modes);
    q.r = ComplexVector::Zero(2 * n_modes);
    q.r0 = Complex(0.0, 0.0);
    q.active = false;
  }
}

GCSState GCSState::product(int n_modes, const RealVector& r0, const RealMatrix& sigma0,
                           const ComplexMatrix& qrdm0) {
  if (r0.size() != 2 * n_modes || sigma0.rows() != 2 * n_modes || sigma0.cols() != 2 * n_modes)
    throw DimensionError("GCSState::product: moment dimensions do not match mode count");
  const int dim = static_cast<int>(qrdm0.rows());
  int n_qubits = 0;
  while ((1 << n_qubits) < dim) ++n_qubits;
  if ((1 << n_qubits) != dim || qrdm0.cols() != dim)
    throw DimensionError("GCSState::product: QRDM must be 2^N x 2^N");

  GCSState state(n_modes, n_qubits);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      BranchQuantities& q = state.stored(a, b);
      q.sigma = sigma0.cast<Complex>();
      q.r = r0.cast<Complex>();
      const Complex amp = qrdm0(a, b);
      if (std::abs(amp) == 0.0) {
        q.active = false;
        q.r0 = Complex(kInactiveLogWeight, 0.0);
      } else {
        q.active = true;
        q.r0 = std::log(amp);
      }
    }
  }
  return state;
}

BranchQuantities GCSState::branch(const BranchLabel& j, const BranchLabel& k) const {
  const int a = j.index();
  const int b = k.index();
  if (a <= b) return stored(a, b);
  return stored(b, a).conjugated();
}

BranchQuantities& GCSState::stored(int a, int b) {
  return upper_[upper_triangle_index(a, b, n_labels())];
}

const BranchQuantities& GCSState::stored(int a, int b) const {
  return upper_[upper_triangle_index(a, b, n_labels())];
}

std::vector<BranchKey> GCSState::stored_keys() const {
  std::vector<BranchKey> keys;
  const int dim = n_labels();
  keys.reserve(upper_triangle_count(dim));
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      keys.push_back({BranchLabel::from_index(n_qubits_, a), BranchLabel::from_index(n_qubits_, b)});
  return keys;
}

Complex SqrtTracker::next(Complex z) {
  Complex root = std::sqrt(z);
  if (prev_ && std::abs(-root - *prev_) < std::abs(root - *prev_)) root = -root;
  prev_ = root;
  return root;
}

Complex eval_branched_char(const GCSState& state, const BranchKey& key,
                           const RealVector& r_tilde) {
  if (r_tilde.size() != 2 * state.n_modes())
    throw DimensionError("eval_branched_char: phase-space vector has wrong length");
  const BranchQuantities q = state.branch(key);
  if (!q.active) return Complex(0.0, 0.0);
  const ComplexVector rt = r_tilde.cast<Complex>();
  const Complex quad = rt.dot(q.sigma * rt);  // rt real, dot == transpose product
  const Complex lin = rt.dot(q.r);
  return std::exp(-0.25 * quad + kImag * lin + q.r0);
}

Complex eval_branched_wigner(const GCSState& state, const BranchKey& key,
                             const RealVector& r_tilde, SqrtTracker* tracker) {
  if (r_tilde.size() != 2 * state.n_modes())
    throw DimensionError("eval_branched_wigner: phase-space vector has wrong length");
  const BranchQuantities q = state.branch(key);
  if (!q.active) return Complex(0.0, 0.0);
  const int n = state.n_modes();

  Eigen::PartialPivLU<ComplexMatrix> lu(q.sigma);
  const Complex det = lu.determinant();
  if (std::abs(det) < 1e-300)
    throw SingularMatrixError("eval_branched_wigner: singular sigma for key " + key.str());
  const Complex root = tracker ? tracker->next(det) : std::sqrt(det);

  const ComplexVector dr = r_tilde.cast<Complex>() - q.r;
  const Complex quad = (dr.transpose() * lu.solve(dr))(0);
  const Real prefac = std::pow(2.0, n) / std::pow(kPi, n);
  return prefac * std::exp(q.r0 - quad) / root;
}

ComplexMatrix qrdm(const GCSState& state) {
  const int dim = state.n_labels();
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const BranchQuantities& q = state.stored(a, b);
      if (!q.active) continue;
      rho(a, b) = std::exp(q.r0);
      rho(b, a) = std::conj(rho(a, b));
    }
  }
  return rho;
}

ModesMoments modes_reduced_moments(const GCSState& state) {
  const int d = 2 * state.n_modes();
  RealVector mean = RealVector::Zero(d);
  RealMatrix second = RealMatrix::Zero(d, d);
  for (int a = 0; a < state.n_labels(); ++a) {
    const BranchQuantities& q = state.stored(a, a);
    if (!q.active) continue;
    const Real p = std::exp(q.r0.real());
    const RealVector r = q.r.real();
    mean += p * r;
    second += p * (q.sigma.real() + 2.0 * r * r.transpose());
  }
  ModesMoments out;
  out.mean = mean;
  out.sigma = second - 2.0 * mean * mean.transpose();
  return out;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << v.what << " [" << v.key << "] magnitude " << v.magnitude << "\n";
  return os.str();
}

ValidationReport validate_state(const GCSState& state, Real tol) {
  ValidationReport report;
  const int dim = state.n_labels();
  const RealMatrix omega = symplectic_form(state.n_modes());

  Real trace = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const BranchQuantities& q = state.stored(a, b);
      if (!q.active) continue;
      const BranchKey key{BranchLabel::from_index(state.n_qubits(), a),
                          BranchLabel::from_index(state.n_qubits(), b)};

      const Real asym = (q.sigma - q.sigma.transpose()).cwiseAbs().maxCoeff();
      if (asym > tol) report.violations.push_back({"sigma not symmetric", key.str(), asym});

      if (a == b) {
        const Real im_sigma = q.sigma.imag().cwiseAbs().maxCoeff();
        const Real im_r = q.r.imag().cwiseAbs().maxCoeff();
        const Real im_r0 = std::abs(q.r0.imag());
        if (im_sigma > tol)
          report.violations.push_back({"diagonal sigma not real", key.str(), im_sigma});
        if (im_r > tol) report.violations.push_back({"diagonal r not real", key.str(), im_r});
        if (im_r0 > tol) report.violations.push_back({"diagonal r0 not real", key.str(), im_r0});
        if (q.r0.real() > tol)
          report.violations.push_back({"diagonal weight above one", key.str(), q.r0.real()});
        trace += std::exp(q.r0.real());

        // Heisenberg bound: sigma + i Omega is Hermitian, must be PSD.
        ComplexMatrix heis = q.sigma.real().cast<Complex>() + kImag * omega.cast<Complex>();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(heis);
        const Real min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -tol)
          report.violations.push_back({"uncertainty bound violated", key.str(), -min_eig});
      } else {
        // Cauchy-Schwarz on the QRDM.
        const Real waa = state.stored(a, a).active ? state.stored(a, a).r0.real()
                                                   : kInactiveLogWeight;
        const Real wbb = state.stored(b, b).active ? state.stored(b, b).r0.real()
                                                   : kInactiveLogWeight;
        const Real bound = std::sqrt(std::exp(waa) * std::exp(wbb));
        const Real mag = std::exp(q.r0.real());
        if (mag > bound + tol)
          report.violations.push_back({"Cauchy-Schwarz bound violated", key.str(), mag - bound});
      }
    }
  }
  if (std::abs(trace - 1.0) > tol)
    report.violations.push_back({"trace not normalized", "", std::abs(trace - 1.0)});
  return report;
}

}  // namespace gcs
