#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dualprox/run_config.hpp"

using namespace dualprox;

namespace {

std::string write_temp(const std::string& contents) {
  static int counter = 0;
  std::string path = "harness_test_" + std::to_string(counter++) + ".cfg";
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("config file parsing") {
  const std::string path = write_temp(
      "# comment line\n"
      "problem = example2\n"
      "n = 20\n"
      "alpha = 1e-4\n"
      "R = 2.5\n"
      "mode = variational\n"
      "alphas = 1e-3, 1e-4\n"
      "ns = 8,16\n"
      "globalized = off\n"
      "delta_tol = 1e-10\n"
      "output = out.csv   # trailing comment\n");
  const RunConfig cfg = parse_config_file(path);
  CHECK(cfg.problem.name == ProblemSpec::Name::Example2);
  CHECK(cfg.problem.n == 20);
  CHECK(cfg.problem.alpha == 1e-4);
  CHECK(cfg.problem.bound == 2.5);
  CHECK(cfg.problem.mode == ControlMode::Variational);
  CHECK(cfg.alpha_list == std::vector<double>{1e-3, 1e-4});
  CHECK(cfg.mesh_list == std::vector<int>{8, 16});
  CHECK_FALSE(cfg.solver.globalized);
  CHECK(cfg.solver.delta_tol == 1e-10);
  CHECK(cfg.output_path == "out.csv");
  std::remove(path.c_str());
}

TEST_CASE("config errors carry the line number") {
  const std::string path = write_temp("problem = example1\nnô = 3\n");
  try {
    parse_config_file(path);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
  }
  std::remove(path.c_str());

  const std::string bad_value = write_temp("alpha = fast\n");
  try {
    parse_config_file(bad_value);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
  std::remove(bad_value.c_str());

  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("overrides") {
  RunConfig cfg;
  apply_override(cfg, "problem=quadratic");
  apply_override(cfg, "n=8");
  apply_override(cfg, "inexact_rule=paper");
  apply_override(cfg, "eta=0.5");
  CHECK(cfg.problem.name == ProblemSpec::Name::Quadratic);
  CHECK(cfg.problem.n == 8);
  CHECK(cfg.solver.inexact_rule == InexactRule::Paper);
  CHECK(cfg.solver.eta == 0.5);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "mode=p3"), ConfigError);
}

TEST_CASE("csv output: header, formatting, determinism") {
  RunConfig cfg;
  cfg.problem.name = ProblemSpec::Name::Quadratic;
  cfg.problem.n = 8;
  cfg.problem.alpha = 1e-2;
  cfg.solver.inexact_rule = InexactRule::Paper;  // exact solves: one clean step
  const auto rows = run_single(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].key == 1e-2);

  std::ostringstream a, b;
  write_csv(a, "alpha", rows);
  write_csv(b, "alpha", rows);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string header, data;
  std::getline(lines, header);
  std::getline(lines, data);
  CHECK(header == "alpha,it,cg,inactive_l1,phi,gap,residual,stop_reason");
  CHECK(data.find("1.000000e-02") == 0);  // %.6e key formatting
  CHECK(data.find("residual_tol") != std::string::npos);
}

TEST_CASE("sweep runners and exit codes") {
  RunConfig cfg;
  cfg.problem.name = ProblemSpec::Name::Quadratic;
  cfg.problem.alpha = 1e-2;
  cfg.mesh_list = {4, 8};
  const auto rows = run_mesh_sweep(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == doctest::Approx(std::sqrt(2.0) / 4));
  CHECK(rows[1].key == doctest::Approx(std::sqrt(2.0) / 8));
  CHECK(exit_code_for(rows) == 0);

  // a run that exhausts its iteration budget is reported, not fatal
  RunConfig hard;
  hard.problem.name = ProblemSpec::Name::Example1;
  hard.problem.n = 8;
  hard.problem.alpha = 1e-5;
  hard.solver.max_outer = 1;
  const auto degraded = run_single(hard);
  CHECK(degraded[0].report.stop_reason == StopReason::MaxIter);
  CHECK(exit_code_for(degraded) == 2);

  SUBCASE("missing lists are config errors") {
    RunConfig none;
    CHECK_THROWS_AS(run_mesh_sweep(none), ConfigError);
    CHECK_THROWS_AS(run_alpha_sweep(none), ConfigError);
    CHECK_THROWS_AS(run_continuation(none), ConfigError);
  }
  SUBCASE("desk-scale cap") {
    RunConfig big;
    big.problem.n = 500;
    CHECK_THROWS_AS(run_single(big), ConfigError);
    big.allow_large = true;  // explicitly opted in; not executed here
  }
}

TEST_CASE("alpha sweep shares the assembled mesh and continuation warm-starts") {
  RunConfig cfg;
  cfg.problem.name = ProblemSpec::Name::Example1;
  cfg.problem.n = 12;
  cfg.alpha_list = {1e-3, 1e-4};
  const auto cold = run_alpha_sweep(cfg);
  const auto warm = run_continuation(cfg);
  REQUIRE(cold.size() == 2);
  REQUIRE(warm.size() == 2);
  CHECK(cold[0].report.phi_final == warm[0].report.phi_final);
  int cold_cg = cold[0].report.cg_total + cold[1].report.cg_total;
  int warm_cg = warm[0].report.cg_total + warm[1].report.cg_total;
  CHECK(warm_cg <= cold_cg);
}
