#include "gcs/fock.hpp"

#include "gcs/ode.hpp"
#include "gcs/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace gcs {

namespace {

ComplexMatrix annihilation(int n_max) {
  ComplexMatrix a = ComplexMatrix::Zero(n_max, n_max);
  for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  return a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Lift a mode-space operator to the joint space (identity on the qubits).
ComplexMatrix lift_mode(const ComplexMatrix& op, int qubit_dim) {
  return kron(ComplexMatrix::Identity(qubit_dim, qubit_dim), op);
}

}  // namespace

ComplexMatrix FockDensityMatrix::block(int j_index, int k_index) const {
  const int md = mode_dim();
  return rho.block(j_index * md, k_index * md, md, md);
}

Real FockDensityMatrix::tail_population() const {
  // Population of the top Fock level of each mode, summed over qubits.
  const int md = mode_dim();
  Real tail = 0.0;
  for (int q = 0; q < qubit_dim(); ++q) {
    for (int f = 0; f < md; ++f) {
      int rem = f;
      bool top = false;
      for (int m = 0; m < n_modes; ++m) {
        if (rem % n_max == n_max - 1) top = true;
        rem /= n_max;
      }
      if (top) tail += rho(q * md + f, q * md + f).real();
    }
  }
  return tail;
}

ModeOperators build_operators(const FockConfig& cfg, int n_modes) {
  if (cfg.n_max < 2) throw Error("FockConfig: n_max must be >= 2");
  ModeOperators ops;
  const ComplexMatrix a1 = annihilation(cfg.n_max);
  const ComplexMatrix id1 = ComplexMatrix::Identity(cfg.n_max, cfg.n_max);
  ops.id = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < n_modes; ++i) ops.id = kron(ops.id, id1);
  for (int i = 0; i < n_modes; ++i) {
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (int m = 0; m < n_modes; ++m) op = kron(op, m == i ? a1 : id1);
    ops.a.push_back(op);
    ops.x.push_back((op + op.adjoint()) / std::sqrt(2.0));
    ops.p.push_back((op - op.adjoint()) / (kImag * std::sqrt(2.0)));
  }
  return ops;
}

ComplexMatrix displacement_matrix(Complex alpha, int n_max) {
  const Real y = std::norm(alpha);
  const Real pref = std::exp(-0.5 * y);
  ComplexMatrix d = ComplexMatrix::Zero(n_max, n_max);
  // Offset diag recurrences: for m >= n, <m|D|n> = sqrt(n!/m!) alpha^{m-n}
  // e^{-y/2} L_n^{(m-n)}(y); below-diagonal from D(-alpha) symmetry.
  for (int off = 0; off < n_max; ++off) {
    // amp(n) = sqrt(n!/(n+off)!) alpha^off, built incrementally.
    Complex amp_upper = 1.0;  // for (-conj(alpha))^off variant
    Complex amp_lower = 1.0;
    for (int k = 1; k <= off; ++k) {
      amp_lower *= alpha / std::sqrt(static_cast<Real>(k));
      amp_upper *= -std::conj(alpha) / std::sqrt(static_cast<Real>(k));
    }
    Real lag_prev = 0.0, lag = 1.0;  // L_0^{(off)}(y) = 1
    for (int n = 0; n + off < n_max; ++n) {
      if (n > 0) {
        const Real next =
            ((2.0 * (n - 1) + 1.0 + off - y) * lag - (n - 1.0 + off) * lag_prev) / n;
        lag_prev = lag;
        lag = next;
      }
      d(n + off, n) = amp_lower * pref * lag;
      d(n, n + off) = amp_upper * pref * lag;
      // Rescale amplitude ratio sqrt(n!/(m)!): step n -> n+1 multiplies by
      // sqrt((n+1)/(n+1+off)).
      const Real ratio = std::sqrt((n + 1.0) / (n + 1.0 + off));
      amp_lower *= ratio;
      amp_upper *= ratio;
    }
  }
  return d;
}

namespace {

// Single-mode Gaussian state in the Fock basis from Williamson parameters.
ComplexMatrix single_mode_gaussian(Real x0, Real p0, const RealMatrix& sigma0, int n_max) {
  const Real det = sigma0.determinant();
  if (det < 1.0 - 1e-9) throw Error("build_initial_state: sigma0 is unphysical");
  const Real nu = std::sqrt(std::max(det, 1.0));
  const Real nbar = 0.5 * (nu - 1.0);

  // Thermal diagonal.
  ComplexMatrix rho = ComplexMatrix::Zero(n_max, n_max);
  if (nbar < 1e-14) {
    rho(0, 0) = 1.0;
  } else {
    const Real q = nbar / (1.0 + nbar);
    Real w = 1.0 - q;
    for (int n = 0; n < n_max; ++n) {
      rho(n, n) = w;
      w *= q;
    }
    const Real tr = rho.real().trace();
    rho /= tr;
  }

  // sigma0 / nu = L L^T with L symmetric-positive sqrt, det 1 => symplectic.
  RealMatrix m = sigma0 / nu;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  RealMatrix q_rot = es.eigenvectors();
  if (q_rot.determinant() < 0.0) q_rot.col(0) *= -1.0;
  const RealVector lam = es.eigenvalues().cwiseSqrt();

  // Rotation angle and squeeze strength of L = Q diag(lam) Q^T. The Fock
  // rotation R(theta) = e^{-i theta a^dag a} maps state moments by
  // e^{theta Omega} = rotation by -theta, hence theta = -phi below; the
  // squeeze S(r) = exp(r/2 (a^2 - a^dag a^dag)) maps (x, p) to
  // (x e^{-r}, p e^{r}).
  const Real phi = std::atan2(q_rot(1, 0), q_rot(0, 0));
  const Real theta = -phi;
  const Real r_sq = -std::log(lam[0]);

  const ComplexMatrix a = annihilation(n_max);
  const ComplexMatrix num = a.adjoint() * a;
  const ComplexMatrix rot_pos = (-kImag * theta * num).exp();
  const ComplexMatrix rot_neg = (kImag * theta * num).exp();
  const ComplexMatrix squeeze = (0.5 * r_sq * (a * a - a.adjoint() * a.adjoint())).exp();
  const ComplexMatrix u = rot_pos * squeeze * rot_neg;
  rho = u * rho * u.adjoint();

  const Complex alpha((x0) / std::sqrt(2.0), (p0) / std::sqrt(2.0));
  const ComplexMatrix disp = displacement_matrix(alpha, n_max);
  rho = disp * rho * disp.adjoint();
  return rho;
}

}  // namespace

FockDensityMatrix build_initial_state(const RealVector& r0, const RealMatrix& sigma0,
                                      const ComplexMatrix& qrdm0, const FockConfig& cfg,
                                      int n_modes) {
  if (r0.size() != 2 * n_modes || sigma0.rows() != 2 * n_modes)
    throw DimensionError("build_initial_state: moment dimensions do not match n_modes");
  for (int i = 0; i < n_modes; ++i)
    for (int j = 0; j < n_modes; ++j) {
      if (i == j) continue;
      if (sigma0.block(2 * i, 2 * j, 2, 2).cwiseAbs().maxCoeff() > 0.0)
        throw Error("build_initial_state: multimode sigma0 must be block-diagonal per mode");
    }

  ComplexMatrix rho_m = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < n_modes; ++i) {
    rho_m = kron(rho_m, single_mode_gaussian(r0[2 * i], r0[2 * i + 1],
                                             sigma0.block(2 * i, 2 * i, 2, 2), cfg.n_max));
  }

  FockDensityMatrix out;
  out.n_modes = n_modes;
  out.n_max = cfg.n_max;
  int n_qubits = 0;
  while ((1 << n_qubits) < qrdm0.rows()) ++n_qubits;
  if ((1 << n_qubits) != qrdm0.rows()) throw DimensionError("build_initial_state: QRDM not 2^N");
  out.n_qubits = n_qubits;
  out.rho = kron(qrdm0, rho_m);

  const Real trace_defect = std::abs(out.rho.trace().real() - 1.0);
  if (trace_defect > cfg.convergence_factor || out.tail_population() > cfg.convergence_factor)
    throw TruncationError("build_initial_state: truncation insufficient for requested state");
  return out;
}

namespace {

struct Liouvillian {
  ComplexMatrix H;                  // full Hamiltonian including label-diagonal parts
  std::vector<ComplexMatrix> r_ops; // lifted canonical operators
  ComplexMatrix B;                  // noise coefficients in canonical basis
  ComplexMatrix G;                  // sum_mn B_mn r_n r_m
  std::vector<ComplexMatrix> sz;    // lifted per-qubit sigma_z
  RealVector gamma;
  bool have_B = false;

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix drho = -kImag * (H * rho - rho * H);
    if (have_B) {
      ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
      const int d = static_cast<int>(r_ops.size());
      for (int m = 0; m < d; ++m) {
        ComplexMatrix left = r_ops[m] * rho;
        for (int n = 0; n < d; ++n) {
          if (std::abs(B(m, n)) == 0.0) continue;
          acc += B(m, n) * (left * r_ops[n]);
        }
      }
      drho += acc - 0.5 * (G * rho + rho * G);
    }
    for (size_t i = 0; i < sz.size(); ++i) {
      if (gamma[static_cast<int>(i)] == 0.0) continue;
      drho += 0.5 * gamma[static_cast<int>(i)] * (sz[i] * rho * sz[i] - rho);
    }
    return drho;
  }
};

Liouvillian make_liouvillian(const HybridModel& model, const FockDensityMatrix& ref,
                             const FockConfig& cfg) {
  const int qd = ref.qubit_dim();
  const ModeOperators ops = build_operators(cfg, model.n_modes);
  const int d = 2 * model.n_modes;

  Liouvillian li;
  li.H = ComplexMatrix::Zero(ref.dim(), ref.dim());

  // Quadratic + linear mode parts, per branch label (diagonal in the qubit
  // product basis), plus driving d^T r and branch-constant energies.
  std::vector<ComplexMatrix> canon;
  for (int i = 0; i < d; ++i) canon.push_back(ops.canonical(i));
  for (int q = 0; q < qd; ++q) {
    const BranchLabel label = BranchLabel::from_index(model.n_qubits, q);
    const BranchHamiltonian bh = resolve_branch(model, label);
    ComplexMatrix h_mode = ComplexMatrix::Zero(ops.id.rows(), ops.id.cols());
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j)
        if (bh.H(i, j) != 0.0) h_mode += 0.5 * bh.H(i, j) * canon[i] * canon[j];
      h_mode -= bh.r[i] * canon[i];
      h_mode += model.d[i] * canon[i];
    }
    h_mode += model.branch_constant(label) * ops.id;
    li.H.block(q * ops.id.rows(), q * ops.id.rows(), ops.id.rows(), ops.id.cols()) = h_mode;
  }

  for (int i = 0; i < d; ++i) li.r_ops.push_back(lift_mode(canon[i], qd));

  li.B = b_from_noise(model.D, model.E);
  li.have_B = li.B.cwiseAbs().maxCoeff() > 0.0;
  if (li.have_B) {
    ComplexMatrix g = ComplexMatrix::Zero(ref.dim(), ref.dim());
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        if (std::abs(li.B(m, n)) != 0.0) g += li.B(m, n) * (li.r_ops[n] * li.r_ops[m]);
    li.G = g;
  }

  li.gamma = model.Gamma_z;
  for (int i = 0; i < model.n_qubits; ++i) {
    ComplexMatrix szq = ComplexMatrix::Zero(qd, qd);
    for (int q = 0; q < qd; ++q)
      szq(q, q) = BranchLabel::from_index(model.n_qubits, q)[i];
    li.sz.push_back(kron(szq, ops.id));
  }
  return li;
}

RealVector pack_rho(const ComplexMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  RealVector y(2 * d * d);
  Eigen::Map<RealMatrix>(y.data(), d, d) = rho.real();
  Eigen::Map<RealMatrix>(y.data() + d * d, d, d) = rho.imag();
  return y;
}

ComplexMatrix unpack_rho(const RealVector& y, int d) {
  ComplexMatrix rho(d, d);
  rho.real() = Eigen::Map<const RealMatrix>(y.data(), d, d);
  rho.imag() = Eigen::Map<const RealMatrix>(y.data() + d * d, d, d);
  return rho;
}

}  // namespace

std::vector<FockDensityMatrix> evolve(const HybridModel& model, const FockDensityMatrix& rho0,
                                      const std::vector<Real>& tau_grid, const FockConfig& cfg,
                                      const IntegratorConfig& icfg) {
  if (tau_grid.empty()) throw Error("evolve: empty grid");
  const Liouvillian li = make_liouvillian(model, rho0, cfg);
  const int dim = rho0.dim();

  auto rhs = [&](Real, const RealVector& y) -> RealVector {
    return pack_rho(li.apply(unpack_rho(y, dim)));
  };

  OdeOptions opt;
  opt.rel_tol = std::max(icfg.rel_tol, 1e-10);
  opt.abs_tol = std::max(icfg.abs_tol, 1e-12);

  std::vector<FockDensityMatrix> out;
  RealVector y = pack_rho(rho0.rho);
  Real t = rho0.time;
  for (Real target : tau_grid) {
    if (target > t) {
      y = dopri5(rhs, y, t, target, opt);
      t = target;
    }
    FockDensityMatrix snap = rho0;
    snap.time = t;
    snap.rho = unpack_rho(y, dim);
    // Hermitize roundoff and verify trace preservation / truncation health.
    snap.rho = 0.5 * (snap.rho + snap.rho.adjoint()).eval();
    const Real tr = snap.rho.real().trace();
    if (std::abs(tr - 1.0) > 1e-8)
      throw IntegrationError("evolve: trace drift " + std::to_string(tr - 1.0), t, "");
    if (snap.tail_population() > cfg.convergence_factor)
      throw TruncationError("evolve: population reached the Fock truncation at tau=" +
                            std::to_string(t));
    out.push_back(std::move(snap));
  }
  return out;
}

Complex fock_char(const FockDensityMatrix& rho, const BranchLabel& j, const BranchLabel& k,
                  const RealVector& rbar) {
  if (rho.n_modes != 1) throw Error("fock_char: single mode only");
  const ComplexMatrix blk = rho.block(j.index(), k.index());
  const Complex alpha(rbar[0] / std::sqrt(2.0), rbar[1] / std::sqrt(2.0));
  const ComplexMatrix d = displacement_matrix(alpha, rho.n_max);
  // chi(rbar) = Tr[rho_JK D(alpha(rbar))] with D(alpha(rbar)) = D_{-rbar}.
  return (blk * d).trace();
}

ExtractedBranch extract_phase_space(const FockDensityMatrix& rho, const BranchLabel& j,
                                    const BranchLabel& k, Real stencil_h) {
  if (rho.n_modes != 1) throw Error("extract_phase_space: single mode only");
  const ComplexMatrix blk = rho.block(j.index(), k.index());
  ExtractedBranch out;
  out.rho_q = blk.trace();
  if (std::abs(out.rho_q) < 1e-12)
    throw Error("extract_phase_space: branch weight below 1e-12; quantities undefined");

  const FockConfig cfg{rho.n_max, 1.0};
  const ModeOperators ops = build_operators(cfg, 1);
  const int d = 2;

  if (j.index() == k.index()) {
    // Physical moments.
    out.r = ComplexVector(d);
    for (int i = 0; i < d; ++i) out.r[i] = (blk * ops.canonical(i)).trace() / out.rho_q;
    out.sigma = ComplexMatrix(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Complex m2 =
            (blk * (ops.canonical(a) * ops.canonical(b) + ops.canonical(b) * ops.canonical(a)))
                .trace() /
            out.rho_q;
        out.sigma(a, b) = m2 - 2.0 * out.r[a] * out.r[b];
      }
    return out;
  }

  // Off-diagonal: fit log chi(r~) = r0 + i r~.r - 1/4 r~^T sigma r~ on a
  // symmetric stencil. chi is evaluated at rbar = -Omega r~.
  auto chi_tilde = [&](const RealVector& rt) {
    RealVector rbar(2);
    rbar[0] = -rt[1];
    rbar[1] = rt[0];  // rbar = -Omega r~
    return fock_char(rho, j, k, rbar);
  };
  const Complex log0 = std::log(out.rho_q);
  auto logchi = [&](Real ax, Real ap) {
    RealVector rt(2);
    rt[0] = ax;
    rt[1] = ap;
    // Branch-safe log relative to the center value.
    return std::log(chi_tilde(rt) / out.rho_q) + log0;
  };

  const Real h = stencil_h;
  out.r = ComplexVector(2);
  out.sigma = ComplexMatrix(2, 2);
  const Complex lxp = logchi(h, 0), lxm = logchi(-h, 0);
  const Complex lpp = logchi(0, h), lpm = logchi(0, -h);
  const Complex lc = log0;
  out.r[0] = (lxp - lxm) / (2.0 * h * kImag);
  out.r[1] = (lpp - lpm) / (2.0 * h * kImag);
  out.sigma(0, 0) = -2.0 * (lxp + lxm - 2.0 * lc) / (h * h);
  out.sigma(1, 1) = -2.0 * (lpp + lpm - 2.0 * lc) / (h * h);
  const Complex ld = logchi(h, h) + logchi(-h, -h) - 2.0 * lc;
  // (e_x + e_p)^T sigma (e_x + e_p) = sxx + spp + 2 sxp.
  const Complex sum_quad = -2.0 * ld / (h * h);
  out.sigma(0, 1) = 0.5 * (sum_quad - out.sigma(0, 0) - out.sigma(1, 1));
  out.sigma(1, 0) = out.sigma(0, 1);
  return out;
}

RealMatrix wigner_grid(const FockDensityMatrix& rho, const std::vector<Real>& xs,
                       const std::vector<Real>& ps) {
  if (rho.n_modes != 1) throw Error("wigner_grid: single mode only");
  // Mode-reduced density matrix.
  ComplexMatrix rho_m = ComplexMatrix::Zero(rho.mode_dim(), rho.mode_dim());
  for (int q = 0; q < rho.qubit_dim(); ++q) rho_m += rho.block(q, q);

  // W(x, p) = (1/pi) Tr[rho D(2 alpha) Pi], Pi the parity operator.
  RealVector parity(rho.n_max);
  for (int n = 0; n < rho.n_max; ++n) parity[n] = (n % 2 == 0) ? 1.0 : -1.0;

  RealMatrix w(xs.size(), ps.size());
  for (size_t ix = 0; ix < xs.size(); ++ix) {
    for (size_t ip = 0; ip < ps.size(); ++ip) {
      const Complex alpha((xs[ix]) / std::sqrt(2.0), (ps[ip]) / std::sqrt(2.0));
      const ComplexMatrix d2 = displacement_matrix(2.0 * alpha, rho.n_max);
      Complex val(0.0, 0.0);
      for (int m = 0; m < rho.n_max; ++m)
        for (int n = 0; n < rho.n_max; ++n) val += rho_m(m, n) * d2(n, m) * parity[m];
      w(static_cast<int>(ix), static_cast<int>(ip)) = val.real() / kPi;
    }
  }
  return w;
}

ComplexMatrix fock_generaldyne_post_qrdm(const FockDensityMatrix& rho, const RealMatrix& sigma_m,
                                         const RealVector& r_m, const FockConfig& cfg) {
  if (rho.n_modes != 1) throw Error("fock_generaldyne_post_qrdm: single mode only");
  // Pi_{r_m} up to normalization: Gaussian state of covariance sigma_m
  // displaced to r_m.
  const ComplexMatrix one = ComplexMatrix::Identity(1, 1);
  const FockDensityMatrix proj = build_initial_state(r_m, sigma_m, one, cfg, 1);
  const int qd = rho.qubit_dim();
  ComplexMatrix out(qd, qd);
  for (int a = 0; a < qd; ++a)
    for (int b = 0; b < qd; ++b) out(a, b) = (proj.rho * rho.block(a, b)).trace();
  return out;
}

}  // namespace gcs
