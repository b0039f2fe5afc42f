#include "gcs/symplectic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace gcs {

RealMatrix symplectic_form(int n_modes) {
  if (n_modes < 1) throw DimensionError("symplectic_form: mode count must be >= 1");
  RealMatrix omega = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

ComplexMatrix ladder_transform(int n_modes) {
  if (n_modes < 1) throw DimensionError("ladder_transform: mode count must be >= 1");
  const Real inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ComplexMatrix u = ComplexMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    u(2 * i, 2 * i) = inv_sqrt2;
    u(2 * i, 2 * i + 1) = Complex(0.0, inv_sqrt2);
    u(2 * i + 1, 2 * i) = inv_sqrt2;
    u(2 * i + 1, 2 * i + 1) = Complex(0.0, -inv_sqrt2);
  }
  return u;
}

RealMatrix symplectic_exp(const RealMatrix& m, Real tau) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw DimensionError("symplectic_exp: matrix must be square with even dimension");
  const RealMatrix omega = symplectic_form(static_cast<int>(m.rows()) / 2);
  return (tau * omega * m).exp();
}

Real symplectic_defect(const RealMatrix& s) {
  const RealMatrix omega = symplectic_form(static_cast<int>(s.rows()) / 2);
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

}  // namespace gcs
