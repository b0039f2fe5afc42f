#include "gcs/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gcs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string text = R"(
# comment
[model]
n_modes = 1
n_qubits = 1
H_m = 1 0 ; 0 1
r_m = 2 0
flag = true
)";
  const Config cfg = Config::parse_string(text);
  CHECK(cfg.get_int("model", "n_modes") == 1);
  CHECK(cfg.get_matrix("model", "H_m").rows() == 2);
  CHECK(cfg.get_vector("model", "r_m")[0] == 2.0);
  CHECK(cfg.get_bool("model", "flag"));
  CHECK(cfg.get_real_or("model", "absent", 7.0) == 7.0);

  CHECK_THROWS_AS(cfg.get_real("model", "missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[unterminated\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[a]\nk = 1\nk = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[a]\nm = 1 2 ; 3\n").get_matrix("a", "m"), ConfigError);
}

TEST_CASE("regression evaluation") {
  // tau_max(chi = 1, kappa = 3) = arctan(2/3).
  CHECK(regression_eval("disp-tau-max", {{"chi", 1.0}, {"kappa", 3.0}}) ==
        doctest::Approx(std::atan(2.0 / 3.0)).epsilon(1e-12));
  // sigma_odd(s = 1) = 1/eta at any time.
  CHECK(regression_eval("disp-sigma-odd",
                        {{"s", 1.0}, {"eta", 0.6}, {"kappa", 3.0}, {"chi", 1.0}}, 0.4) ==
        doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  // C(2 pi) with f_q = 0.5, Gamma_x = 0.1: 6 pi 0.25 0.1.
  CHECK(regression_eval("sg-contrast",
                        {{"f_q", 0.5}, {"Gamma_x", 0.1}, {"Gamma_z", 0.0}, {"N_p", 0.0},
                         {"s", 1.0}},
                        2.0 * kPi) == doctest::Approx(6.0 * kPi * 0.25 * 0.1).epsilon(1e-12));
  CHECK_THROWS(regression_eval("no-such-formula", {}));
}

TEST_CASE("stern-gerlach builtin run validates and is deterministic") {
  ScenarioConfig sc = scenario_stern_gerlach({{"points", 40}});
  sc.out_wigner = false;  // keep the test snappy
  const std::string dir1 = "test_out/sg1";
  const std::string dir2 = "test_out/sg2";
  std::filesystem::remove_all("test_out");
  const RunResult r1 = run_scenario(sc, dir1);
  const RunResult r2 = run_scenario(sc, dir2);
  CHECK(r1.summary.at("regression_max_dev") < 1e-6);
  CHECK(slurp(dir1 + "/trajectory.csv") == slurp(dir2 + "/trajectory.csv"));
  CHECK(!slurp(dir1 + "/run.manifest").empty());
}

TEST_CASE("stern-gerlach ode engine agrees within the looser tolerance") {
  ScenarioConfig sc = scenario_stern_gerlach({{"points", 25}});
  sc.engine = Engine::Ode;
  sc.out_wigner = false;
  const RunResult r = run_scenario(sc, "test_out/sg_ode");
  CHECK(r.summary.at("regression_max_dev") < 1e-4);
}

TEST_CASE("dispersive builtin at reduced size validates") {
  // Reduced x0 keeps the Riccati integration quick in unit tests.
  ScenarioConfig sc = scenario_dispersive({{"x0", 3.0}, {"points", 25}});
  sc.out_negativity = true;
  const RunResult r = run_scenario(sc, "test_out/disp");
  CHECK(r.summary.at("regression_max_dev") < 1e-4);
  CHECK(std::filesystem::exists("test_out/disp/negativity.csv"));
  CHECK(std::filesystem::exists("test_out/disp/density.csv"));
}

TEST_CASE("engine incompatibility is reported") {
  ScenarioConfig sc = scenario_dispersive({{"x0", 2.0}, {"points", 10}});
  sc.engine = Engine::ClosedForm;  // quadratic coupling
  CHECK_THROWS_AS(run_scenario(sc, "test_out/bad"), EngineError);
}

TEST_CASE("scenario from config with overrides") {
  const std::string text = R"(
[scenario]
name = stern-gerlach
[params]
f_q = 0.25
points = 12
[engine]
type = closed-form
[outputs]
wigner = false
)";
  const ScenarioConfig sc = scenario_from_config(Config::parse_string(text));
  CHECK(sc.params.at("f_q") == 0.25);
  CHECK(sc.tau_grid.size() == 12);
  CHECK(sc.engine == Engine::ClosedForm);
  CHECK(!sc.out_wigner);
  CHECK_NOTHROW(run_scenario(sc, "test_out/override"));

  CHECK_THROWS_AS(scenario_from_config(Config::parse_string("[scenario]\nname = nope\n")),
                  ConfigError);
  CHECK_THROWS_AS(scenario_from_config(Config::parse_string(
                      "[scenario]\nname = stern-gerlach\n[params]\nbogus = 1\n")),
                  Error);
}

TEST_CASE("zz phase toggle: negligible for well-separated peaks only") {
  // The qubit-qubit exchange term reduces to a sigma_z sigma_z phase. For
  // the default x0 = 20 the post-measurement state is
  // block-diagonal in the even/odd subspaces to high accuracy and the phase
  // drops out of the conditional negativity; at small x0 the subspace
  // coherences survive and the phase matters.
  auto negativity_at = [](Real x0, bool zz, Real u) {
    ScenarioConfig sc = scenario_dispersive(
        {{"s", 1.0}, {"x0", x0}, {"include_zz_phase", zz ? 1.0 : 0.0}, {"points", 2}});
    GCSState st = GCSState::product(1, sc.r0, sc.sigma0, sc.qrdm0);
    Trajectory traj = integrate(sc.model, st, sc.tau_grid, sc.integ);
    const GeneralDyne hom = homodyne_cov(0.5 * kPi, 0.6, 1);
    RealVector r_m(1);
    r_m << u;
    return negativity_two_qubit(
        generaldyne_post_qrdm(traj.states.back(), hom, r_m).normalized);
  };
  CHECK(std::abs(negativity_at(20.0, true, 0.0) - negativity_at(20.0, false, 0.0)) < 1e-5);
  CHECK(std::abs(negativity_at(2.0, true, 0.0) - negativity_at(2.0, false, 0.0)) > 1e-2);
}

TEST_CASE("custom scenario from explicit model sections") {
  const std::string text = R"(
[scenario]
name = custom
[model]
n_modes = 1
n_qubits = 1
H_m = 1 0 ; 0 1
r_q.1 = 0.4 0
[initial]
preset = vacuum
qrdm = plus
[schedule]
tau_max = 1.0
points = 6
[engine]
type = ode
[outputs]
trajectory = true
)";
  const ScenarioConfig sc = scenario_from_config(Config::parse_string(text));
  CHECK(sc.model.r_q[0][0] == 0.4);
  const RunResult r = run_scenario(sc, "test_out/custom");
  CHECK(std::filesystem::exists("test_out/custom/trajectory.csv"));
}
