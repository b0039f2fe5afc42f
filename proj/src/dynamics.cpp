#include "gcs/dynamics.hpp"

#include "gcs/ode.hpp"
#include "gcs/quadrature.hpp"
#include "gcs/symplectic.hpp"

#include <Eigen/LU>

#include <cmath>

namespace gcs {

namespace {

ComplexMatrix to_c(const RealMatrix& m) { return m.cast<Complex>(); }

// Bilinear (non-conjugating) quadratic form v^T M v.
Complex bilinear(const ComplexVector& v, const ComplexMatrix& m) {
  return (v.transpose() * m * v)(0);
}

// Per-key constants of the branch ODEs, precomputed once per integration.
struct BranchContext {
  ComplexMatrix om_hs;     // Omega (H_J + H_K + 2E)
  ComplexMatrix hs_om;     // (H_J + H_K + 2E^T) Omega
  ComplexMatrix hd;        // H_J - H_K
  ComplexMatrix om_hd_om;  // Omega (H_J - H_K) Omega
  ComplexMatrix D;
  ComplexVector force;     // Omega (2d - r_J - r_K)
  ComplexVector r_diff;    // r_J - r_K
  Real dephasing;          // sum_i Gamma_i/2 (j_i k_i - 1)
  Real const_diff;         // c_J - c_K
  bool diagonal;
};

BranchContext make_context(const HybridModel& model, const BranchLabel& j,
                           const BranchLabel& k) {
  const BranchHamiltonian bj = resolve_branch(model, j);
  const BranchHamiltonian bk = resolve_branch(model, k);
  const RealMatrix omega = symplectic_form(model.n_modes);
  const RealMatrix h_sum = bj.H + bk.H + 2.0 * model.E;
  BranchContext ctx;
  ctx.om_hs = to_c(omega * h_sum);
  ctx.hs_om = to_c(h_sum.transpose() * omega);
  ctx.hd = to_c(bj.H - bk.H);
  ctx.om_hd_om = to_c(omega * (bj.H - bk.H) * omega);
  ctx.D = to_c(model.D);
  ctx.force = (omega * (2.0 * model.d - bj.r - bk.r)).cast<Complex>();
  ctx.r_diff = (bj.r - bk.r).cast<Complex>();
  ctx.dephasing = 0.0;
  for (int i = 0; i < model.n_qubits; ++i)
    ctx.dephasing += 0.5 * model.Gamma_z[i] * (j[i] * k[i] - 1);
  ctx.const_diff = model.branch_constant(j) - model.branch_constant(k);
  ctx.diagonal = j.index() == k.index();
  return ctx;
}

BranchRates rates_from_context(const BranchContext& ctx, const BranchQuantities& q) {
  BranchRates out;
  out.dsigma = 0.5 * (ctx.om_hs * q.sigma - q.sigma * ctx.hs_om) + ctx.D;
  out.dr = 0.5 * (ctx.om_hs * q.r + ctx.force);
  out.dr0 = Complex(ctx.dephasing, 0.0) - kImag * ctx.const_diff;
  if (!ctx.diagonal) {
    // Riccati term carries the same 1/2 prefactor as the commutator part;
    // verified against the Fock oracle (the printed tables drop it, which is
    // invisible when sigma = 1).
    out.dsigma -= 0.5 * kImag * (q.sigma * ctx.hd * q.sigma + ctx.om_hd_om);
    out.dr += 0.5 * kImag * (q.sigma * (ctx.r_diff - ctx.hd * q.r));
    out.dr0 += -0.5 * kImag * bilinear(q.r, ctx.hd) +
               kImag * (ctx.r_diff.transpose() * q.r)(0) -
               0.25 * kImag * (ctx.hd * q.sigma).trace();
  }
  return out;
}

// Flat layout per branch: [Re sigma, Im sigma, Re r, Im r, Re r0, Im r0].
int flat_size(int d) { return 2 * d * d + 2 * d + 2; }

RealVector pack(const BranchQuantities& q) {
  const int d = static_cast<int>(q.r.size());
  RealVector y(flat_size(d));
  int at = 0;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) {
      y[at] = q.sigma(r, c).real();
      y[at + d * d] = q.sigma(r, c).imag();
      ++at;
    }
  at = 2 * d * d;
  for (int i = 0; i < d; ++i) {
    y[at + i] = q.r[i].real();
    y[at + d + i] = q.r[i].imag();
  }
  y[at + 2 * d] = q.r0.real();
  y[at + 2 * d + 1] = q.r0.imag();
  return y;
}

BranchQuantities unpack(const RealVector& y, int d) {
  BranchQuantities q;
  q.sigma.resize(d, d);
  q.r.resize(d);
  int at = 0;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) {
      q.sigma(r, c) = Complex(y[at], y[at + d * d]);
      ++at;
    }
  at = 2 * d * d;
  for (int i = 0; i < d; ++i) q.r[i] = Complex(y[at + i], y[at + d + i]);
  q.r0 = Complex(y[at + 2 * d], y[at + 2 * d + 1]);
  q.active = true;
  return q;
}

void symmetrize_flat(RealVector& y, int d) {
  for (int part = 0; part < 2; ++part) {
    const int base = part * d * d;
    for (int c = 0; c < d; ++c)
      for (int r = c + 1; r < d; ++r) {
        const Real avg = 0.5 * (y[base + c * d + r] + y[base + r * d + c]);
        y[base + c * d + r] = avg;
        y[base + r * d + c] = avg;
      }
  }
}

void check_product_form(const GCSState& state) {
  const int dim = state.n_labels();
  const BranchQuantities* ref = nullptr;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      const BranchQuantities& q = state.stored(a, b);
      if (!q.active) continue;
      if (!ref) {
        ref = &q;
        continue;
      }
      if ((q.sigma - ref->sigma).cwiseAbs().maxCoeff() > 1e-10 ||
          (q.r - ref->r).cwiseAbs().maxCoeff() > 1e-10)
        throw Error(
            "closed form requires a product-form initial state "
            "(all branches sharing one Gaussian)");
    }
  if (!ref) throw Error("closed form: state has no active branches");
}

struct LinearClosedForm {
  RealMatrix S;        // S_A(tau)
  RealMatrix SmI;      // S_A - 1
  RealMatrix P1;       // int_0^tau S_A(u) D S_A(u)^T du
  RealMatrix P2;       // int_0^tau S_A(u) D du  (exact)
  RealMatrix sigma_u;  // S_A sigma0 S_A^T
  RealMatrix sigma;    // sigma_u + P1
  RealMatrix A_inv;
  RealMatrix omega;
  bool use_symplectic_route = false;  // E = 0 alternative evaluation
};

LinearClosedForm prepare_linear(const HybridModel& model, const RealMatrix& sigma0, Real tau,
                                Real quad_tol) {
  LinearClosedForm cf;
  const RealMatrix A = model.H_m + model.E;
  Eigen::FullPivLU<RealMatrix> lu(A);
  if (!lu.isInvertible())
    throw SingularMatrixError(
        "closed_form_linear: A = H_m + E is singular; use integrate() instead");
  cf.A_inv = lu.inverse();
  cf.omega = symplectic_form(model.n_modes);
  cf.S = symplectic_exp(A, tau);
  cf.SmI = cf.S - RealMatrix::Identity(A.rows(), A.cols());
  const bool have_D = model.D.cwiseAbs().maxCoeff() > 0.0;
  if (have_D && tau != 0.0) {
    cf.P1 = adaptive_gk15_matrix(
        [&](Real u) {
          const RealMatrix s = symplectic_exp(A, u);
          return RealMatrix(s * model.D * s.transpose());
        },
        0.0, tau, quad_tol);
  } else {
    cf.P1 = RealMatrix::Zero(A.rows(), A.cols());
  }
  // int_0^tau S_A(u) du = -A^{-1} Omega (S_A(tau) - 1), exact.
  cf.P2 = -cf.A_inv * cf.omega * cf.SmI * model.D;
  cf.sigma_u = cf.S * sigma0 * cf.S.transpose();
  cf.sigma = cf.sigma_u + cf.P1;
  cf.use_symplectic_route = model.E.cwiseAbs().maxCoeff() == 0.0;
  return cf;
}

// Shared Gaussian data of the product-form initial state.
struct InitialGaussian {
  RealVector r0;
  RealMatrix sigma0;
};

InitialGaussian initial_gaussian(const GCSState& state) {
  check_product_form(state);
  for (const auto& key : state.stored_keys()) {
    const BranchQuantities q = state.branch(key);
    if (q.active) return {q.r.real(), q.sigma.real()};
  }
  throw Error("closed form: state has no active branches");
}

}  // namespace

BranchRates rhs_open(const HybridModel& model, const BranchLabel& j, const BranchLabel& k,
                     const BranchQuantities& q) {
  return rates_from_context(make_context(model, j, k), q);
}

Trajectory integrate(const HybridModel& model, const GCSState& state0,
                     const std::vector<Real>& tau_grid, const IntegratorConfig& cfg) {
  if (tau_grid.empty()) throw Error("integrate: empty time grid");
  for (size_t i = 1; i < tau_grid.size(); ++i)
    if (tau_grid[i] <= tau_grid[i - 1]) throw Error("integrate: grid must be increasing");
  if (tau_grid.front() < state0.time - 1e-12)
    throw Error("integrate: grid starts before the initial state time");

  const int d = 2 * model.n_modes;
  const int dim = state0.n_labels();

  Trajectory traj;
  traj.times = tau_grid;
  traj.states.assign(tau_grid.size(), state0);
  for (size_t s = 0; s < tau_grid.size(); ++s) traj.states[s].time = tau_grid[s];

  const Real initial_trace = [&] {
    Real tr = 0.0;
    for (int a = 0; a < dim; ++a)
      if (state0.stored(a, a).active) tr += std::exp(state0.stored(a, a).r0.real());
    return tr;
  }();

  // Branch systems are uncoupled; integrate each key independently across
  // the grid.
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const BranchQuantities& q0 = state0.stored(a, b);
      if (!q0.active) continue;
      const BranchLabel j = BranchLabel::from_index(state0.n_qubits(), a);
      const BranchLabel k = BranchLabel::from_index(state0.n_qubits(), b);
      const BranchContext ctx = make_context(model, j, k);
      const BranchKey key{j, k};

      auto rhs = [&](Real, const RealVector& y) -> RealVector {
        const BranchQuantities q = unpack(y, d);
        const BranchRates rt = rates_from_context(ctx, q);
        BranchQuantities dq;
        dq.sigma = rt.dsigma;
        dq.r = rt.dr;
        dq.r0 = rt.dr0;
        return pack(dq);
      };

      OdeOptions opt;
      // The requested tolerance bounds the global error on desk-scale
      // horizons; local error control gets a safety factor.
      opt.rel_tol = 0.01 * cfg.rel_tol;
      opt.abs_tol = 0.01 * cfg.abs_tol;
      opt.max_step = cfg.max_step;
      opt.post_step = [&](Real, RealVector& y) { symmetrize_flat(y, d); };

      RealVector y = pack(q0);
      Real t = state0.time;
      for (size_t s = 0; s < tau_grid.size(); ++s) {
        const Real target = tau_grid[s];
        if (target > t) {
          try {
            if (cfg.method == IntegratorConfig::Method::AdaptiveRk) {
              y = dopri5(rhs, y, t, target, opt);
            } else {
              const int steps =
                  std::max(1, static_cast<int>(std::ceil((target - t) * cfg.fixed_steps_per_unit)));
              y = rk4(rhs, y, t, target, steps, opt.post_step);
            }
          } catch (const IntegrationError& e) {
            throw IntegrationError(std::string(e.what()) + " for key " + key.str(), e.tau,
                                   key.str());
          }
          t = target;
        }
        BranchQuantities q = unpack(y, d);
        // Freeze branches whose weight underflowed.
        if (q.r0.real() < kInactiveLogWeight) q.active = false;
        traj.states[s].stored(a, b) = q;
      }
    }
  }

  // Trace conservation check per snapshot; drift is an error, not repaired.
  for (size_t s = 0; s < traj.states.size(); ++s) {
    Real tr = 0.0;
    for (int a = 0; a < dim; ++a)
      if (traj.states[s].stored(a, a).active) tr += std::exp(traj.states[s].stored(a, a).r0.real());
    if (std::abs(tr - initial_trace) > 1e-9)
      throw IntegrationError("integrate: normalization drift " + std::to_string(tr - initial_trace),
                             traj.times[s], "");
  }
  return traj;
}

GCSState closed_form_linear_unitary(const HybridModel& model, const GCSState& state0, Real tau) {
  if (model.has_quadratic_coupling())
    throw Error("closed_form_linear_unitary: model has quadratic coupling");
  if (model.has_noise()) throw Error("closed_form_linear_unitary: model has noise terms");
  return closed_form_linear_open(model, state0, tau, IntegratorConfig{});
}

GCSState closed_form_linear_open(const HybridModel& model, const GCSState& state0, Real tau,
                                 const IntegratorConfig& cfg, ClosedFormRoute route) {
  if (model.has_quadratic_coupling())
    throw Error("closed_form_linear_open: model has quadratic coupling; use integrate()");
  const InitialGaussian init = initial_gaussian(state0);
  LinearClosedForm cf = prepare_linear(model, init.sigma0, tau, cfg.quadrature_tol);
  if (route == ClosedFormRoute::General) cf.use_symplectic_route = false;
  if (route == ClosedFormRoute::Symplectic) {
    if (model.E.cwiseAbs().maxCoeff() != 0.0)
      throw Error("closed_form_linear_open: symplectic route requires E = 0");
    cf.use_symplectic_route = true;
  }
  const RealMatrix& omega = cf.omega;
  const RealMatrix A_invT = cf.A_inv.transpose();

  GCSState out = state0;
  out.time = state0.time + tau;

  // P3 = int_0^tau (S_A(u) - 1) D (S_A(u)^T - 1) du, assembled from P1 and
  // the exact P2 pieces.
  const RealMatrix P3 =
      cf.P1 - cf.P2 - cf.P2.transpose() + tau * model.D;

  const int dim = state0.n_labels();
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      BranchQuantities& q = out.stored(a, b);
      if (!q.active) continue;
      const BranchLabel j = BranchLabel::from_index(state0.n_qubits(), a);
      const BranchLabel k = BranchLabel::from_index(state0.n_qubits(), b);
      const BranchHamiltonian bj = resolve_branch(model, j);
      const BranchHamiltonian bk = resolve_branch(model, k);
      const RealVector r_diff = bj.r - bk.r;
      const RealVector m = cf.A_inv * (model.d - 0.5 * (bj.r + bk.r));
      const RealVector w = omega * A_invT * r_diff;

      q.sigma = cf.sigma.cast<Complex>();

      // First moments.
      const RealVector re_part = cf.S * init.r0 + cf.SmI * m;
      RealVector im_part;
      if (cf.use_symplectic_route) {
        // E = 0: sigma(tau) Omega (S - 1) route plus the D(tau - t) integral.
        const RealVector delta = cf.SmI * (cf.A_inv * r_diff);
        im_part = -0.5 * cf.sigma * omega * delta;
        if (model.D.cwiseAbs().maxCoeff() > 0.0 && tau != 0.0) {
          const RealVector corr = adaptive_gk15_matrix(
              [&](Real u) {
                const RealMatrix s = symplectic_exp(model.H_m + model.E, u);
                return RealMatrix((s * model.D * s.transpose()) * omega * (s - cf.S) *
                                  (cf.A_inv * r_diff));
              },
              0.0, tau, cfg.quadrature_tol);
          im_part += -0.5 * corr;
        }
      } else {
        im_part = 0.5 * (cf.S * init.sigma0 * cf.SmI.transpose() + cf.P1 - cf.P2) * w;
      }

      q.r = re_part.cast<Complex>() + kImag * im_part.cast<Complex>();

      // Contrast and phase increments.
      const Real c_inc = 0.25 * w.dot(cf.SmI * init.sigma0 * cf.SmI.transpose() * w) +
                         0.25 * w.dot(P3 * w) - tau * [&] {
                           Real deph = 0.0;
                           for (int i = 0; i < model.n_qubits; ++i)
                             deph += 0.5 * model.Gamma_z[i] * (j[i] * k[i] - 1);
                           return deph;
                         }();
      const Real const_diff = model.branch_constant(j) - model.branch_constant(k);
      const Real phi_inc = -r_diff.dot(cf.A_inv * omega * cf.SmI * (init.r0 + m)) -
                           tau * r_diff.dot(m) - tau * const_diff;

      q.r0 += Complex(-c_inc, phi_inc);
    }
  }
  return out;
}

GCSState diagonal_closed_form(const HybridModel& model, const GCSState& state0, Real tau,
                              const IntegratorConfig& cfg) {
  const InitialGaussian init = initial_gaussian(state0);
  GCSState out(state0.n_modes(), state0.n_qubits());
  out.time = state0.time + tau;

  const int dim = state0.n_labels();
  for (int a = 0; a < dim; ++a) {
    const BranchQuantities& q0 = state0.stored(a, a);
    if (!q0.active) continue;
    const BranchLabel j = BranchLabel::from_index(state0.n_qubits(), a);
    const BranchHamiltonian bj = resolve_branch(model, j);

    HybridModel branch_model = model;
    branch_model.H_m = bj.H;
    branch_model.r_m = bj.r;
    const LinearClosedForm cf =
        prepare_linear(branch_model, init.sigma0, tau, cfg.quadrature_tol);

    BranchQuantities q;
    q.active = true;
    q.sigma = cf.sigma.cast<Complex>();
    const RealVector m = cf.A_inv * (model.d - bj.r);
    q.r = (cf.S * init.r0 + cf.SmI * m).cast<Complex>();
    q.r0 = q0.r0;  // diagonal weights are constants of motion
    out.stored(a, a) = q;
  }
  return out;
}

}  // namespace gcs
