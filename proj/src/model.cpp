#include "gcs/model.hpp"

#include "gcs/symplectic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gcs {

HybridModel HybridModel::zero(int n_modes, int n_qubits) {
  HybridModel m;
  m.n_modes = n_modes;
  m.n_qubits = n_qubits;
  const int d = 2 * n_modes;
  m.H_m = RealMatrix::Zero(d, d);
  m.r_m = RealVector::Zero(d);
  m.H_q.assign(n_qubits, RealMatrix::Zero(d, d));
  m.r_q.assign(n_qubits, RealVector::Zero(d));
  m.H_q0 = RealVector::Zero(n_qubits);
  m.Gamma_z = RealVector::Zero(n_qubits);
  m.D = RealMatrix::Zero(d, d);
  m.E = RealMatrix::Zero(d, d);
  m.d = RealVector::Zero(d);
  m.zz = RealMatrix::Zero(n_qubits, n_qubits);
  return m;
}

std::vector<std::string> HybridModel::validate_and_repair(Real warn_tol) {
  std::vector<std::string> warnings;
  const int dd = 2 * n_modes;
  auto check_dims = [&](const RealMatrix& m, const char* name) {
    if (m.rows() != dd || m.cols() != dd)
      throw DimensionError(std::string("HybridModel: ") + name + " has wrong dimensions");
  };
  check_dims(H_m, "H_m");
  check_dims(D, "D");
  check_dims(E, "E");
  if (static_cast<int>(H_q.size()) != n_qubits || static_cast<int>(r_q.size()) != n_qubits ||
      H_q0.size() != n_qubits || Gamma_z.size() != n_qubits)
    throw DimensionError("HybridModel: per-qubit field count does not match n_qubits");
  if (r_m.size() != dd || d.size() != dd)
    throw DimensionError("HybridModel: force/driving vector has wrong length");

  auto symmetrize = [&](RealMatrix& m, const char* name) {
    const Real dev = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (dev > warn_tol)
      warnings.push_back(std::string(name) + " symmetrized, deviation " + std::to_string(dev));
    m = 0.5 * (m + m.transpose()).eval();
  };
  symmetrize(H_m, "H_m");
  symmetrize(D, "D");
  for (int i = 0; i < n_qubits; ++i) {
    check_dims(H_q[i], "H_q");
    if (r_q[i].size() != dd) throw DimensionError("HybridModel: r_q has wrong length");
    symmetrize(H_q[i], "H_q");
  }
  {
    const Real dev = (E + E.transpose()).cwiseAbs().maxCoeff();
    if (dev > warn_tol)
      warnings.push_back(std::string("E antisymmetrized, deviation ") + std::to_string(dev));
    E = 0.5 * (E - E.transpose()).eval();
  }
  if (zz.size() == 0) zz = RealMatrix::Zero(n_qubits, n_qubits);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(D);
  if (es.eigenvalues().minCoeff() < -warn_tol)
    warnings.push_back("D is not positive semidefinite, min eigenvalue " +
                       std::to_string(es.eigenvalues().minCoeff()));
  for (int i = 0; i < n_qubits; ++i)
    if (Gamma_z[i] < 0.0) throw Error("HybridModel: dephasing rates must be >= 0");
  return warnings;
}

bool HybridModel::has_quadratic_coupling(Real tol) const {
  for (const auto& h : H_q)
    if (h.cwiseAbs().maxCoeff() > tol) return true;
  return false;
}

bool HybridModel::has_noise(Real tol) const {
  return D.cwiseAbs().maxCoeff() > tol || E.cwiseAbs().maxCoeff() > tol ||
         d.cwiseAbs().maxCoeff() > tol || Gamma_z.cwiseAbs().maxCoeff() > tol;
}

Real HybridModel::branch_constant(const BranchLabel& j) const {
  Real c = 0.0;
  for (int i = 0; i < n_qubits; ++i) c += 0.5 * H_q0[i] * j[i];
  if (zz.size() > 0)
    for (int i = 0; i < n_qubits; ++i)
      for (int l = i + 1; l < n_qubits; ++l) c += zz(i, l) * j[i] * j[l];
  return c;
}

BranchHamiltonian resolve_branch(const HybridModel& model, const BranchLabel& j) {
  if (j.n_qubits() != model.n_qubits)
    throw DimensionError("resolve_branch: label length does not match qubit count");
  BranchHamiltonian out;
  out.H = model.H_m;
  out.r = model.r_m;
  out.constant = 0.0;
  for (int i = 0; i < model.n_qubits; ++i) {
    out.H += j[i] * model.H_q[i];
    out.r += j[i] * model.r_q[i];
    out.constant += j[i] * model.H_q0[i];
  }
  return out;
}

NoiseMatrices noise_from_B(const ComplexMatrix& b) {
  if (!is_hermitian(b, 1e-12))
    throw Error("noise_from_B: B must be Hermitian");
  const RealMatrix omega = symplectic_form(static_cast<int>(b.rows()) / 2);
  NoiseMatrices out;
  out.D = 2.0 * omega * b.real() * omega.transpose();
  out.E = -b.imag();
  return out;
}

ComplexMatrix b_from_noise(const RealMatrix& d_mat, const RealMatrix& e_mat) {
  const RealMatrix omega = symplectic_form(static_cast<int>(d_mat.rows()) / 2);
  return (0.5 * omega.transpose() * d_mat * omega).cast<Complex>() -
         kImag * e_mat.cast<Complex>();
}

BathNoise noise_from_bath_coupling(const RealMatrix& h_c, const RealMatrix& sigma_in,
                                   const RealVector& r_in) {
  const int n_bath = static_cast<int>(sigma_in.rows()) / 2;
  const RealMatrix omega_m = symplectic_form(n_bath);
  {
    ComplexMatrix heis = sigma_in.cast<Complex>() + kImag * omega_m.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(heis);
    if (es.eigenvalues().minCoeff() < -1e-9)
      throw Error("noise_from_bath_coupling: bath covariance is unphysical");
  }
  const RealMatrix omega_s = symplectic_form(static_cast<int>(h_c.rows()) / 2);
  BathNoise out;
  out.D = omega_s * h_c * sigma_in * h_c.transpose() * omega_s.transpose();
  out.E = 0.5 * h_c * omega_m * h_c.transpose();
  out.d = h_c * r_in;
  return out;
}

CanonicalNoise ladder_noise_to_canonical(const ComplexMatrix& b_a, const ComplexVector& d_a) {
  if (b_a.rows() != b_a.cols() || b_a.rows() != d_a.size())
    throw DimensionError("ladder_noise_to_canonical: inconsistent dimensions");
  if (!is_hermitian(b_a, 1e-12))
    throw Error("ladder_noise_to_canonical: B_a must be Hermitian");
  const ComplexMatrix u = ladder_transform(static_cast<int>(b_a.rows()) / 2);
  CanonicalNoise out;
  out.B = u.transpose() * b_a * u.conjugate();
  const ComplexVector d_c = u.transpose() * d_a;
  if (d_c.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw Error("ladder_noise_to_canonical: driving does not map to a real vector");
  out.d = d_c.real();
  return out;
}

}  // namespace gcs
