#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace gcs {

using Real = double;
using Complex = std::complex<Real>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<Real>;
using RealVector = Vector<Real>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;

inline constexpr Complex kImag{0.0, 1.0};
inline constexpr Real kPi = 3.14159265358979323846;

// Default tolerances: structural checks (symmetry, hermiticity, trace) and
// physicality checks (uncertainty bound, PSD), both user-overridable.
inline constexpr Real kStructuralTol = 1e-9;
inline constexpr Real kPhysicalityTol = 1e-9;

// Branches whose QRDM weight falls below this are frozen as inactive.
inline constexpr Real kInactiveLogWeight = -690.77552789821368;  // log(1e-300)

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

// Step-size underflow or normalization drift during ODE integration.
struct IntegrationError : Error {
  IntegrationError(const std::string& what, double tau_, const std::string& key_)
      : Error(what), tau(tau_), key(key_) {}
  double tau = 0.0;
  std::string key;
};

// Fock-space truncation insufficient for the requested state or evolution.
struct TruncationError : Error {
  using Error::Error;
};

template <class Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, Real tol) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

template <class Derived>
bool is_antisymmetric(const Eigen::MatrixBase<Derived>& m, Real tol) {
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_hermitian(const ComplexMatrix& m, Real tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace gcs
