#include "gcs/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

// Exit codes: 0 success, 2 config error, 3 engine incompatibility,
// 4 regression failure, 5 numerical failure.
int run_command(const std::string& target, const std::string& engine, bool oracle,
                const std::string& out_dir, long seed) {
  gcs::ScenarioConfig sc;
  const auto builtins = gcs::builtin_scenarios();
  if (std::find(builtins.begin(), builtins.end(), target) != builtins.end()) {
    sc = target == "stern-gerlach" ? gcs::scenario_stern_gerlach() : gcs::scenario_dispersive();
  } else {
    sc = gcs::scenario_from_config(gcs::Config::parse_file(target));
  }
  if (engine == "closed-form") sc.engine = gcs::Engine::ClosedForm;
  else if (engine == "ode") sc.engine = gcs::Engine::Ode;
  else if (engine == "oracle") sc.engine = gcs::Engine::Oracle;
  else if (!engine.empty()) throw gcs::ConfigError("unknown engine '" + engine + "'");
  if (oracle) sc.with_oracle = true;
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);

  std::string dir = out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("GCS_OUT_DIR");
    dir = env ? std::string(env) + "/" + sc.name : "out/" + sc.name;
  }
  const gcs::RunResult result = gcs::run_scenario(sc, dir);
  std::cout << "wrote " << result.out_dir << ":\n";
  for (const auto& f : result.files) std::cout << "  " << f << "\n";
  for (const auto& [k, v] : result.summary) std::cout << k << " = " << v << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for hybrid qubit-oscillator systems with Gaussian branches"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario (built-in name or config file)");
  std::string target, engine, out_dir;
  bool oracle = false;
  long seed = -1;
  run->add_option("scenario", target, "Built-in scenario name or config file path")->required();
  run->add_option("--engine", engine, "closed-form | ode | oracle");
  run->add_flag("--oracle", oracle, "Also run the Fock oracle and emit a comparison CSV");
  run->add_option("--out", out_dir, "Output directory (default $GCS_OUT_DIR/<name>)");
  run->add_option("--seed", seed, "Sampling seed");

  auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

  auto* eval = app.add_subcommand("eval", "Evaluate a closed-form regression expression");
  std::string reg_name;
  std::vector<std::string> kvs;
  eval->add_option("name", reg_name, "Regression name (see list below)");
  eval->add_option("args", kvs, "key=value parameters; 'x' is the sweep variable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(target, engine, oracle, out_dir, seed);
    if (list->parsed()) {
      for (const auto& name : gcs::builtin_scenarios()) std::cout << name << "\n";
      return 0;
    }
    if (eval->parsed()) {
      if (reg_name.empty()) {
        for (const auto& name : gcs::regression_names())
          std::cout << name << ": " << gcs::regression_describe(name) << "\n";
        return 0;
      }
      gcs::ParamMap params;
      gcs::Real x = 0.0;
      for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw gcs::ConfigError("expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const gcs::Real value = std::stod(kv.substr(eq + 1));
        if (key == "x") x = value;
        else params[key] = value;
      }
      std::cout << gcs::regression_eval(reg_name, params, x) << "\n";
      return 0;
    }
  } catch (const gcs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gcs::EngineError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return 3;
  } catch (const gcs::RegressionError& e) {
    std::cerr << "regression failure: " << e.what() << "\n";
    return 4;
  } catch (const gcs::IntegrationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 5;
  } catch (const gcs::TruncationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
