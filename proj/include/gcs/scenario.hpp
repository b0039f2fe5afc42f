#pragma once

#include "gcs/config.hpp"
#include "gcs/dynamics.hpp"
#include "gcs/fock.hpp"
#include "gcs/measurement.hpp"
#include "gcs/model.hpp"
#include "gcs/regressions.hpp"
#include "gcs/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gcs {

// Requested engine is incompatible with the model or outputs (exit code 3).
struct EngineError : Error {
  using Error::Error;
};

// A built-in scenario's simulated quantities deviated from its registered
// closed-form expressions (exit code 4).
struct RegressionError : Error {
  using Error::Error;
};

enum class Engine { ClosedForm, Ode, Oracle };

struct ScenarioConfig {
  std::string name = "custom";
  HybridModel model;

  RealVector r0;
  RealMatrix sigma0;
  ComplexMatrix qrdm0;

  std::vector<Real> tau_grid;

  Engine engine = Engine::Ode;
  IntegratorConfig integ;

  // Measurements (ordered: qubit measurement, then general-dyne).
  char qubit_axis = 0;  // 0 = none
  int qubit_index = 0;
  bool homodyne_enabled = false;
  Real homodyne_phi = 0.5 * kPi;
  Real homodyne_eta = 1.0;

  // Outputs.
  bool out_trajectory = true;
  bool out_density = false;
  bool out_negativity = false;
  bool out_wigner = false;
  int n_samples = 0;

  int outcome_points = 201;
  Real outcome_halfwidth = 8.0;
  int wigner_points = 101;
  Real wigner_halfwidth = 5.0;
  Real wigner_center_x = 0.0;

  std::uint64_t seed = 1;
  bool rotating_frame = true;     // dispersive scenario
  bool include_zz_phase = false;  // dispersive scenario

  bool with_oracle = false;
  FockConfig fock;

  // Parameters seen by the regression registry; filled by the built-ins.
  ParamMap params;
  // Regression tolerance: 1e-6 closed-form engine, 1e-4 ODE engine.
  Real regression_tol() const { return engine == Engine::ClosedForm ? 1e-6 : 1e-4; }
};

// Built-in scenarios with their default parameter sets; `overrides` replaces
// individual named parameters.
ScenarioConfig scenario_stern_gerlach(const ParamMap& overrides = {});
ScenarioConfig scenario_dispersive(const ParamMap& overrides = {});
std::vector<std::string> builtin_scenarios();

// Builds a scenario from a parsed config file: either a named built-in with
// parameter overrides or a fully custom model.
ScenarioConfig scenario_from_config(const Config& cfg);

// Engine dispatch: GCS states on the configured grid.
std::vector<GCSState> compute_states(const ScenarioConfig& sc);

struct RunResult {
  std::string out_dir;
  std::vector<std::string> files;
  std::map<std::string, Real> summary;  // includes regression deviations
};

// Executes the scenario, writes one CSV per requested observable plus a
// run.manifest, and re-evaluates the built-in regression set (throws
// RegressionError past tolerance). Outputs are deterministic for a fixed
// seed and engine.
RunResult run_scenario(const ScenarioConfig& sc, const std::string& out_dir);

}  // namespace gcs
