#include "gcs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace gcs {

namespace {

std::vector<Real> linspace(Real lo, Real hi, int n) {
  std::vector<Real> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

std::string fmt(Real x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

ParamMap with_defaults(ParamMap defaults, const ParamMap& overrides) {
  for (const auto& [k, v] : overrides) {
    if (!defaults.count(k)) throw Error("unknown scenario parameter '" + k + "'");
    defaults[k] = v;
  }
  return defaults;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw Error("cannot open output file '" + path + "'");
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }
  void row(const std::vector<Real>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace

std::vector<std::string> builtin_scenarios() {
  return {"stern-gerlach", "dispersive-entanglement"};
}

ScenarioConfig scenario_stern_gerlach(const ParamMap& overrides) {
  const ParamMap p = with_defaults({{"f_q", 0.5},
                                    {"f_u", 2.0},
                                    {"s", 2.0},
                                    {"N_p", 0.8},
                                    {"Gamma_x", 0.1},
                                    {"Gamma_z", 0.8},
                                    {"omega_q", 0.0},
                                    {"tau_max", 2.0 * kPi},
                                    {"points", 200},
                                    {"eta", 1.0}},
                                   overrides);
  ScenarioConfig sc;
  sc.name = "stern-gerlach";
  sc.params = p;

  HybridModel m = HybridModel::zero(1, 1);
  m.H_m = RealMatrix::Identity(2, 2);
  m.r_m << p.at("f_u"), 0.0;
  m.r_q[0] << p.at("f_q"), 0.0;
  m.H_q0[0] = p.at("omega_q");
  m.Gamma_z[0] = p.at("Gamma_z");
  m.D(1, 1) = 2.0 * p.at("Gamma_x");
  sc.model = m;

  const Real nu = 1.0 + 2.0 * p.at("N_p");
  sc.r0 = RealVector::Zero(2);
  sc.sigma0 = RealMatrix::Zero(2, 2);
  sc.sigma0(0, 0) = nu * p.at("s");
  sc.sigma0(1, 1) = nu / p.at("s");
  sc.qrdm0 = ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0));

  sc.tau_grid = linspace(0.0, p.at("tau_max"), static_cast<int>(p.at("points")));
  sc.engine = Engine::ClosedForm;
  sc.qubit_axis = 'x';
  sc.homodyne_enabled = true;
  sc.homodyne_phi = 0.5 * kPi;  // momentum quadrature
  sc.homodyne_eta = p.at("eta");
  sc.out_trajectory = true;
  sc.out_wigner = true;
  sc.wigner_center_x = 2.0 * p.at("f_u");
  sc.fock.n_max = 64;
  return sc;
}

ScenarioConfig scenario_dispersive(const ParamMap& overrides) {
  const ParamMap p = with_defaults({{"chi", 1.0},
                                    {"kappa", 3.0},
                                    {"eta", 0.6},
                                    {"x0", 20.0},
                                    {"s", 1.0},
                                    {"Gamma_z", 0.0},
                                    {"omega", 0.0},
                                    {"points", 120},
                                    {"rotating_frame", 1.0},
                                    {"include_zz_phase", 0.0}},
                                   overrides);
  ScenarioConfig sc;
  sc.name = "dispersive-entanglement";
  sc.params = p;
  sc.rotating_frame = p.at("rotating_frame") != 0.0;
  sc.include_zz_phase = p.at("include_zz_phase") != 0.0;

  HybridModel m = HybridModel::zero(1, 2);
  const Real omega_lab = sc.rotating_frame ? 0.0 : p.at("omega");
  m.H_m = omega_lab * RealMatrix::Identity(2, 2);
  m.H_q[0] = 0.5 * p.at("chi") * RealMatrix::Identity(2, 2);
  m.H_q[1] = m.H_q[0];
  m.Gamma_z[0] = p.at("Gamma_z");
  m.Gamma_z[1] = p.at("Gamma_z");
  // Cavity decay: B = kappa/2 (1 - i Omega).
  const RealMatrix omega2 = symplectic_form(1);
  const NoiseMatrices nm = noise_from_B(
      0.5 * p.at("kappa") * (ComplexMatrix::Identity(2, 2) - kImag * omega2.cast<Complex>()));
  m.D = nm.D;
  m.E = nm.E;
  if (sc.include_zz_phase) m.zz(0, 1) = -0.5 * p.at("chi");
  sc.model = m;

  sc.r0 = RealVector::Zero(2);
  sc.r0[0] = p.at("x0");
  sc.sigma0 = RealMatrix::Zero(2, 2);
  sc.sigma0(0, 0) = p.at("s");
  sc.sigma0(1, 1) = 1.0 / p.at("s");
  // |+>|+> on both qubits.
  sc.qrdm0 = ComplexMatrix::Constant(4, 4, Complex(0.25, 0.0));

  const Real tau_max = regression_eval("disp-tau-max", p);
  sc.tau_grid = linspace(0.0, tau_max, static_cast<int>(p.at("points")));
  sc.engine = Engine::Ode;
  sc.homodyne_enabled = true;
  sc.homodyne_phi = 0.5 * kPi;
  sc.homodyne_eta = p.at("eta");
  sc.out_trajectory = true;
  sc.out_density = true;
  sc.out_negativity = true;
  sc.outcome_halfwidth = 2.0 * p.at("x0") * std::exp(-0.5 * p.at("kappa") * tau_max) + 10.0;
  sc.fock.n_max = 48;
  return sc;
}

ScenarioConfig scenario_from_config(const Config& cfg) {
  const std::string name = cfg.get_string_or("scenario", "name", "custom");

  ParamMap overrides;
  for (const std::string& key : cfg.keys("params"))
    overrides[key] = cfg.get_real("params", key);

  ScenarioConfig sc;
  if (name == "stern-gerlach") {
    sc = scenario_stern_gerlach(overrides);
  } else if (name == "dispersive-entanglement") {
    sc = scenario_dispersive(overrides);
  } else if (name == "custom") {
    sc.name = name;
    const int n_modes = cfg.get_int("model", "n_modes");
    const int n_qubits = cfg.get_int("model", "n_qubits");
    HybridModel m = HybridModel::zero(n_modes, n_qubits);
    if (cfg.has("model", "H_m")) m.H_m = cfg.get_matrix("model", "H_m");
    if (cfg.has("model", "r_m")) m.r_m = cfg.get_vector("model", "r_m");
    if (cfg.has("model", "D")) m.D = cfg.get_matrix("model", "D");
    if (cfg.has("model", "E")) m.E = cfg.get_matrix("model", "E");
    if (cfg.has("model", "d")) m.d = cfg.get_vector("model", "d");
    for (int i = 0; i < n_qubits; ++i) {
      const std::string suffix = "." + std::to_string(i + 1);
      if (cfg.has("model", "H_q" + suffix)) m.H_q[i] = cfg.get_matrix("model", "H_q" + suffix);
      if (cfg.has("model", "r_q" + suffix)) m.r_q[i] = cfg.get_vector("model", "r_q" + suffix);
      if (cfg.has("model", "H_q0" + suffix)) m.H_q0[i] = cfg.get_real("model", "H_q0" + suffix);
      if (cfg.has("model", "Gamma_z" + suffix))
        m.Gamma_z[i] = cfg.get_real("model", "Gamma_z" + suffix);
    }
    sc.model = m;

    const std::string preset = cfg.get_string_or("initial", "preset", "vacuum");
    const int d = 2 * n_modes;
    sc.r0 = RealVector::Zero(d);
    sc.sigma0 = RealMatrix::Identity(d, d);
    if (preset == "vacuum") {
    } else if (preset == "squeezed-thermal") {
      const Real nu = 1.0 + 2.0 * cfg.get_real("initial", "N_p");
      const Real s = cfg.get_real("initial", "s");
      for (int i = 0; i < n_modes; ++i) {
        sc.sigma0(2 * i, 2 * i) = nu * s;
        sc.sigma0(2 * i + 1, 2 * i + 1) = nu / s;
      }
    } else if (preset == "displaced-squeezed") {
      const Real s = cfg.get_real("initial", "s");
      for (int i = 0; i < n_modes; ++i) {
        sc.r0[2 * i] = cfg.get_real("initial", "x0");
        sc.sigma0(2 * i, 2 * i) = s;
        sc.sigma0(2 * i + 1, 2 * i + 1) = 1.0 / s;
      }
    } else if (preset == "custom") {
      sc.r0 = cfg.get_vector("initial", "r0");
      sc.sigma0 = cfg.get_matrix("initial", "sigma0");
    } else {
      throw ConfigError("unknown initial preset '" + preset + "'");
    }

    const std::string qrdm = cfg.get_string_or("initial", "qrdm", "plus");
    const int qd = 1 << n_qubits;
    if (qrdm == "plus") {
      sc.qrdm0 = ComplexMatrix::Constant(qd, qd, Complex(1.0 / qd, 0.0));
    } else if (qrdm == "custom") {
      const RealMatrix re = cfg.get_matrix("initial", "qrdm_re");
      const RealMatrix im = cfg.has("initial", "qrdm_im")
                                ? cfg.get_matrix("initial", "qrdm_im")
                                : RealMatrix::Zero(qd, qd).eval();
      sc.qrdm0 = re.cast<Complex>() + kImag * im.cast<Complex>();
    } else {
      throw ConfigError("unknown initial qrdm '" + qrdm + "'");
    }

    const Real tau_max = cfg.get_real("schedule", "tau_max");
    const int points = cfg.get_int_or("schedule", "points", 100);
    sc.tau_grid = linspace(0.0, tau_max, points);
    sc.engine = Engine::Ode;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }

  // Common overriding sections.
  if (cfg.has("schedule", "tau_max") && name != "custom") {
    const Real tau_max = cfg.get_real("schedule", "tau_max");
    const int points = cfg.get_int_or("schedule", "points", static_cast<int>(sc.tau_grid.size()));
    sc.tau_grid = linspace(0.0, tau_max, points);
  }
  const std::string engine = cfg.get_string_or("engine", "type", "");
  if (engine == "closed-form") sc.engine = Engine::ClosedForm;
  else if (engine == "ode") sc.engine = Engine::Ode;
  else if (engine == "oracle") sc.engine = Engine::Oracle;
  else if (!engine.empty()) throw ConfigError("unknown engine '" + engine + "'");
  sc.integ.rel_tol = cfg.get_real_or("engine", "rel_tol", sc.integ.rel_tol);
  sc.integ.abs_tol = cfg.get_real_or("engine", "abs_tol", sc.integ.abs_tol);
  sc.integ.quadrature_tol = cfg.get_real_or("engine", "quadrature_tol", sc.integ.quadrature_tol);

  if (cfg.has("measurements", "qubit_povm")) {
    const std::string axis = cfg.get_string("measurements", "qubit_povm");
    if (axis.size() != 1 || (axis != "x" && axis != "y" && axis != "z"))
      throw ConfigError("qubit_povm must be one of x, y, z");
    sc.qubit_axis = axis[0];
    sc.qubit_index = cfg.get_int_or("measurements", "qubit_index", 0);
  }
  if (cfg.has("measurements", "homodyne_phi") || cfg.has("measurements", "homodyne_eta")) {
    sc.homodyne_enabled = true;
    sc.homodyne_phi = cfg.get_real_or("measurements", "homodyne_phi", sc.homodyne_phi);
    sc.homodyne_eta = cfg.get_real_or("measurements", "homodyne_eta", sc.homodyne_eta);
  }

  sc.out_trajectory = cfg.get_bool_or("outputs", "trajectory", sc.out_trajectory);
  sc.out_density = cfg.get_bool_or("outputs", "density", sc.out_density);
  sc.out_negativity = cfg.get_bool_or("outputs", "negativity", sc.out_negativity);
  sc.out_wigner = cfg.get_bool_or("outputs", "wigner", sc.out_wigner);
  sc.n_samples = cfg.get_int_or("outputs", "samples", sc.n_samples);
  sc.outcome_points = cfg.get_int_or("outputs", "outcome_points", sc.outcome_points);
  sc.outcome_halfwidth = cfg.get_real_or("outputs", "outcome_halfwidth", sc.outcome_halfwidth);
  sc.wigner_points = cfg.get_int_or("outputs", "wigner_points", sc.wigner_points);
  sc.wigner_halfwidth = cfg.get_real_or("outputs", "wigner_halfwidth", sc.wigner_halfwidth);

  sc.seed = static_cast<std::uint64_t>(cfg.get_int_or("run", "seed", static_cast<int>(sc.seed)));
  sc.fock.n_max = cfg.get_int_or("oracle", "n_max", sc.fock.n_max);
  sc.with_oracle = cfg.get_bool_or("oracle", "enabled", sc.with_oracle);
  return sc;
}

namespace {

// Oracle-side engine: evolve the truncated joint density matrix and extract
// phase-space quantities for every stored key.
std::vector<GCSState> oracle_states(const ScenarioConfig& sc) {
  const FockDensityMatrix rho0 =
      build_initial_state(sc.r0, sc.sigma0, sc.qrdm0, sc.fock, sc.model.n_modes);
  const std::vector<FockDensityMatrix> rhos = evolve(sc.model, rho0, sc.tau_grid, sc.fock);
  std::vector<GCSState> states;
  states.reserve(rhos.size());
  const int dim = 1 << sc.model.n_qubits;
  for (const auto& rho : rhos) {
    GCSState st(sc.model.n_modes, sc.model.n_qubits);
    st.time = rho.time;
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        const ExtractedBranch eb =
            extract_phase_space(rho, BranchLabel::from_index(sc.model.n_qubits, a),
                                BranchLabel::from_index(sc.model.n_qubits, b));
        BranchQuantities q;
        q.active = true;
        q.sigma = eb.sigma;
        q.r = eb.r;
        q.r0 = std::log(eb.rho_q);
        st.stored(a, b) = q;
      }
    }
    states.push_back(std::move(st));
  }
  return states;
}

}  // namespace

std::vector<GCSState> compute_states(const ScenarioConfig& sc) {
  HybridModel model = sc.model;
  for (const std::string& warning : model.validate_and_repair())
    std::fprintf(stderr, "model warning: %s\n", warning.c_str());
  const GCSState s0 = GCSState::product(model.n_modes, sc.r0, sc.sigma0, sc.qrdm0);

  switch (sc.engine) {
    case Engine::ClosedForm: {
      if (model.has_quadratic_coupling())
        throw EngineError(
            "closed-form engine requires linear coupling; "
            "use the ode engine (diagonal quantities still use closed forms)");
      std::vector<GCSState> states;
      states.reserve(sc.tau_grid.size());
      for (Real tau : sc.tau_grid)
        states.push_back(closed_form_linear_open(model, s0, tau, sc.integ));
      return states;
    }
    case Engine::Ode: {
      Trajectory traj = integrate(model, s0, sc.tau_grid, sc.integ);
      return std::move(traj.states);
    }
    case Engine::Oracle:
      return oracle_states(sc);
  }
  throw Error("compute_states: unreachable");
}

namespace {

struct RegressionCheck {
  Real max_dev = 0.0;
  void update(Real dev) { max_dev = std::max(max_dev, std::abs(dev)); }
};

void validate_builtin(const ScenarioConfig& sc, const std::vector<GCSState>& states,
                      std::map<std::string, Real>* summary) {
  if (sc.engine == Engine::Oracle) return;  // truncation/stencil error budget differs
  const Real tol = sc.regression_tol();
  RegressionCheck check;
  if (sc.name == "stern-gerlach") {
    const Real w0 = std::log(0.5);
    const QubitPOVM povm = pauli_povm('x', 0, 1);
    for (size_t i = 0; i < states.size(); ++i) {
      const Real tau = sc.tau_grid[i] ;
      const GCSState& st = states[i];
      const BranchQuantities off = st.stored(0, 1);
      const Real c_eng = -(off.r0.real() - w0);
      const Real phi_eng = off.r0.imag();
      check.update(c_eng - regression_eval("sg-contrast", sc.params, tau));
      check.update(phi_eng - regression_eval("sg-phase", sc.params, tau));
      const auto outcomes = qubit_measure(st, povm);
      check.update(outcomes[0].probability - regression_eval("sg-px-plus", sc.params, tau));
      check.update(outcomes[1].probability - regression_eval("sg-px-minus", sc.params, tau));
      const RealMatrix sig = st.stored(0, 0).sigma.real();
      check.update(sig(0, 0) - regression_eval("sg-sigma-xx", sc.params, tau));
      check.update(sig(0, 1) - regression_eval("sg-sigma-xp", sc.params, tau));
      check.update(sig(1, 1) - regression_eval("sg-sigma-pp", sc.params, tau));
      const ComplexVector roff = off.r;
      check.update(roff[0].real() - regression_eval("sg-roff-re-x", sc.params, tau));
      check.update(roff[0].imag() - regression_eval("sg-roff-im-x", sc.params, tau));
      check.update(roff[1].real() - regression_eval("sg-roff-re-p", sc.params, tau));
      check.update(roff[1].imag() - regression_eval("sg-roff-im-p", sc.params, tau));
    }
  } else if (sc.name == "dispersive-entanglement") {
    if (!sc.rotating_frame) return;  // closed-form displays hold in the rotating frame
    const Real t2 = (1.0 - sc.homodyne_eta) / sc.homodyne_eta;
    for (size_t i = 0; i < states.size(); ++i) {
      const Real tau = sc.tau_grid[i];
      const GCSState& st = states[i];
      // Odd-subspace keys: label indices 1 (+-) and 2 (-+); even: 0 and 3.
      const Real so_eng = st.stored(1, 1).sigma.real()(1, 1) + t2;
      const Real se_eng = st.stored(0, 0).sigma.real()(1, 1) + t2;
      check.update(so_eng - regression_eval("disp-sigma-odd", sc.params, tau));
      check.update(se_eng - regression_eval("disp-sigma-even", sc.params, tau));
      const Real rp_eng = std::abs(st.stored(0, 0).r.real()[1]);
      check.update(rp_eng - regression_eval("disp-rp", sc.params, tau));
    }
  } else {
    return;
  }
  (*summary)["regression_max_dev"] = check.max_dev;
  if (check.max_dev > tol)
    throw RegressionError(sc.name + ": regression deviation " + std::to_string(check.max_dev) +
                          " exceeds tolerance " + std::to_string(tol));
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& sc, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  RunResult result;
  result.out_dir = out_dir;

  const std::vector<GCSState> states = compute_states(sc);
  const GCSState& final_state = states.back();
  const int n_qubits = sc.model.n_qubits;
  const int dim = 1 << n_qubits;

  auto label_of = [&](int idx) { return BranchLabel::from_index(n_qubits, idx).str(); };
  const GeneralDyne gd = homodyne_cov(sc.homodyne_phi, sc.homodyne_eta, sc.model.n_modes);

  if (sc.out_trajectory) {
    std::vector<std::string> cols = {"tau"};
    for (int a = 0; a < dim; ++a) {
      cols.push_back("p_" + label_of(a));
      for (int i = 0; i < 2 * sc.model.n_modes; ++i)
        cols.push_back("r_" + label_of(a) + "_" + std::to_string(i));
    }
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        cols.push_back("C_" + label_of(a) + label_of(b));
        cols.push_back("phi_" + label_of(a) + label_of(b));
        for (int i = 0; i < 2 * sc.model.n_modes; ++i) {
          const std::string stem = "r_" + label_of(a) + label_of(b) + "_" + std::to_string(i);
          cols.push_back(stem + ".re");
          cols.push_back(stem + ".im");
        }
      }
    if (sc.qubit_axis) {
      cols.push_back(std::string("P_") + sc.qubit_axis + "_plus");
      cols.push_back(std::string("P_") + sc.qubit_axis + "_minus");
    }
    const std::string path = out_dir + "/trajectory.csv";
    CsvWriter csv(path, cols);
    for (size_t i = 0; i < states.size(); ++i) {
      const GCSState& st = states[i];
      std::vector<Real> row = {sc.tau_grid[i]};
      for (int a = 0; a < dim; ++a) {
        const BranchQuantities& q = st.stored(a, a);
        row.push_back(q.active ? std::exp(q.r0.real()) : 0.0);
        for (int k = 0; k < 2 * sc.model.n_modes; ++k) row.push_back(q.r[k].real());
      }
      for (int a = 0; a < dim; ++a)
        for (int b = a + 1; b < dim; ++b) {
          const BranchQuantities& q = st.stored(a, b);
          const BranchQuantities& q0 = states.front().stored(a, b);
          row.push_back(q.active ? -(q.r0.real() - q0.r0.real()) : INFINITY);
          row.push_back(q.active ? q.r0.imag() - q0.r0.imag() : 0.0);
          for (int k = 0; k < 2 * sc.model.n_modes; ++k) {
            row.push_back(q.r[k].real());
            row.push_back(q.r[k].imag());
          }
        }
      if (sc.qubit_axis) {
        const auto outcomes = qubit_measure(st, pauli_povm(sc.qubit_axis, sc.qubit_index, n_qubits));
        row.push_back(outcomes[0].probability);
        row.push_back(outcomes[1].probability);
      }
      csv.row(row);
    }
    result.files.push_back("trajectory.csv");
  }

  if ((sc.out_density || sc.out_negativity) && gd.outcome_dim() != 1)
    throw EngineError("density/negativity outputs require a one-dimensional homodyne outcome");

  if (sc.out_density) {
    if (!sc.homodyne_enabled) throw EngineError("density output requires a homodyne measurement");
    const std::string path = out_dir + "/density.csv";
    CsvWriter csv(path, {"p_m", "P"});
    for (int i = 0; i < sc.outcome_points; ++i) {
      const Real u =
          -sc.outcome_halfwidth + 2.0 * sc.outcome_halfwidth * i / (sc.outcome_points - 1);
      RealVector r_m(1);
      r_m[0] = u;
      csv.row({u, generaldyne_density(final_state, gd, r_m)});
    }
    result.files.push_back("density.csv");
  }

  if (sc.out_negativity) {
    if (n_qubits != 2) throw EngineError("negativity output requires exactly two qubits");
    const std::string path = out_dir + "/negativity.csv";
    CsvWriter csv(path, {"p_m", "negativity", "P"});
    for (int i = 0; i < sc.outcome_points; ++i) {
      const Real u =
          -sc.outcome_halfwidth + 2.0 * sc.outcome_halfwidth * i / (sc.outcome_points - 1);
      RealVector r_m(1);
      r_m[0] = u;
      const PostQrdm post = generaldyne_post_qrdm(final_state, gd, r_m);
      const Real neg = post.density > 0.0 ? negativity_two_qubit(post.normalized) : 0.0;
      csv.row({u, neg, post.density});
    }
    result.files.push_back("negativity.csv");
  }

  if (sc.out_wigner) {
    // Post-measurement Wigner functions (or the unconditional one when no
    // qubit measurement is requested) at the final time, long format.
    const std::string path = out_dir + "/wigner.csv";
    std::vector<CVStateMixture> mixtures;
    std::vector<std::string> cols = {"x", "p"};
    if (sc.qubit_axis) {
      const auto outcomes =
          qubit_measure(final_state, pauli_povm(sc.qubit_axis, sc.qubit_index, n_qubits));
      for (const auto& o : outcomes) {
        mixtures.push_back(o.post);
        cols.push_back("W_" + o.label);
      }
    } else {
      CVStateMixture mix;
      mix.n_modes = sc.model.n_modes;
      for (int a = 0; a < dim; ++a) {
        const BranchQuantities& q = final_state.stored(a, a);
        if (!q.active) continue;
        mix.components.push_back({std::exp(q.r0), q.sigma, q.r});
      }
      mixtures.push_back(mix);
      cols.push_back("W");
    }
    CsvWriter csv(path, cols);
    for (int ix = 0; ix < sc.wigner_points; ++ix) {
      const Real x = sc.wigner_center_x - sc.wigner_halfwidth +
                     2.0 * sc.wigner_halfwidth * ix / (sc.wigner_points - 1);
      for (int ip = 0; ip < sc.wigner_points; ++ip) {
        const Real p = -sc.wigner_halfwidth + 2.0 * sc.wigner_halfwidth * ip / (sc.wigner_points - 1);
        RealVector rt(2);
        rt << x, p;
        std::vector<Real> row = {x, p};
        for (const auto& mix : mixtures) row.push_back(mix.eval_wigner(rt).real());
        csv.row(row);
      }
    }
    result.files.push_back("wigner.csv");
  }

  if (sc.n_samples > 0) {
    const std::string path = out_dir + "/samples.csv";
    const RealMatrix samples = sample_generaldyne(final_state, gd, sc.n_samples, sc.seed);
    std::vector<std::string> cols;
    for (int j = 0; j < samples.cols(); ++j) cols.push_back("u" + std::to_string(j));
    CsvWriter csv(path, cols);
    for (int i = 0; i < samples.rows(); ++i) {
      std::vector<Real> row;
      for (int j = 0; j < samples.cols(); ++j) row.push_back(samples(i, j));
      csv.row(row);
    }
    result.files.push_back("samples.csv");
  }

  if (sc.with_oracle && sc.engine != Engine::Oracle) {
    ScenarioConfig osc = sc;
    osc.engine = Engine::Oracle;
    const std::vector<GCSState> oracle = oracle_states(osc);
    const std::string path = out_dir + "/oracle_compare.csv";
    CsvWriter csv(path, {"tau", "d_qrdm_max", "d_r_max", "d_sigma_max"});
    Real worst = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
      Real dq = 0.0, dr = 0.0, ds = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
          const BranchQuantities& qe = states[i].stored(a, b);
          const BranchQuantities& qo = oracle[i].stored(a, b);
          if (!qe.active || !qo.active) continue;
          dq = std::max(dq, std::abs(std::exp(qe.r0) - std::exp(qo.r0)));
          dr = std::max(dr, (qe.r - qo.r).cwiseAbs().maxCoeff());
          ds = std::max(ds, (qe.sigma - qo.sigma).cwiseAbs().maxCoeff());
        }
      csv.row({sc.tau_grid[i], dq, dr, ds});
      worst = std::max({worst, dq, dr, ds});
    }
    result.files.push_back("oracle_compare.csv");
    result.summary["oracle_max_abs_diff"] = worst;
  }

  validate_builtin(sc, states, &result.summary);

  const auto t_end = std::chrono::steady_clock::now();
  const Real wall = std::chrono::duration<Real>(t_end - t_start).count();
  result.summary["wall_time_s"] = wall;

  std::ofstream manifest(out_dir + "/run.manifest");
  manifest << "scenario = " << sc.name << "\n";
  manifest << "version = 1.0.0\n";
  manifest << "engine = "
           << (sc.engine == Engine::ClosedForm ? "closed-form"
                                               : sc.engine == Engine::Ode ? "ode" : "oracle")
           << "\n";
  manifest << "seed = " << sc.seed << "\n";
  manifest << "rel_tol = " << fmt(sc.integ.rel_tol) << "\n";
  manifest << "abs_tol = " << fmt(sc.integ.abs_tol) << "\n";
  manifest << "quadrature_tol = " << fmt(sc.integ.quadrature_tol) << "\n";
  manifest << "tau_points = " << sc.tau_grid.size() << "\n";
  manifest << "tau_max = " << fmt(sc.tau_grid.back()) << "\n";
  for (const auto& [k, v] : sc.params) manifest << "param." << k << " = " << fmt(v) << "\n";
  for (const auto& f : result.files) manifest << "output = " << f << "\n";
  for (const auto& [k, v] : result.summary) manifest << k << " = " << fmt(v) << "\n";
  result.files.push_back("run.manifest");
  return result;
}

}  // namespace gcs
