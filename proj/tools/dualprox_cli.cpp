#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "dualprox/checks.hpp"
#include "dualprox/run_config.hpp"

using namespace dualprox;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_path;
  std::string mode;
  bool unglobalized = false;
  bool allow_large = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--set", args.overrides, "override a config key (repeatable)")
      ->type_name("key=value");
  cmd->add_option("--output", args.output_path, "CSV output path");
  cmd->add_option("--mode", args.mode, "control discretization")
      ->check(CLI::IsMember({"p0", "variational"}));
  cmd->add_flag("--unglobalized", args.unglobalized,
                "full Newton steps, no linesearch");
  cmd->add_flag("--allow-large", args.allow_large,
                "permit meshes beyond the desk-scale cap (n > 200)");
}

RunConfig load_config(const CommonArgs& args, RunConfig cfg = {}) {
  if (!args.config_path.empty())
    cfg = parse_config_file(args.config_path, std::move(cfg));
  for (const std::string& assignment : args.overrides)
    apply_override(cfg, assignment);
  if (!args.mode.empty()) apply_override(cfg, "mode=" + args.mode);
  if (args.unglobalized) cfg.solver.globalized = false;
  if (!args.output_path.empty()) cfg.output_path = args.output_path;
  if (args.allow_large) cfg.allow_large = true;
  return cfg;
}

// verification subcommands default to a coarse mesh with thresholds inside
// the range of S*xi/alpha at the seeded test point, so the checks run
// across actual prox kinks
RunConfig check_defaults() {
  RunConfig cfg;
  cfg.problem.n = 16;
  cfg.problem.alpha = 1e-2;
  cfg.problem.beta = 2e-4;
  cfg.problem.bound = 0.02;
  return cfg;
}

int emit(const RunConfig& cfg, const std::string& key_name,
         const std::vector<ResultRow>& rows) {
  print_table(std::cout, key_name, rows);
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) {
      std::cerr << "error: cannot write '" << cfg.output_path << "'\n";
      return 1;
    }
    write_csv(out, key_name, rows);
    std::cout << "wrote " << cfg.output_path << "\n";
  }
  return exit_code_for(rows);
}

DualProblem check_problem(const RunConfig& cfg) {
  ProblemSpec spec = cfg.problem;
  return build_problem(spec);
}

Eigen::VectorXd seeded_direction(const DiscreteOperators& fem, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd h(fem.mesh().num_nodes());
  for (int i = 0; i < h.size(); ++i)
    h[i] = fem.mesh().boundary[i] ? 0.0 : dist(rng);
  return h;
}

int run_check_gradient(const RunConfig& cfg) {
  const DualProblem pb = check_problem(cfg);
  const DiscreteOperators& fem = pb.fem();
  const Eigen::VectorXd xi = seeded_direction(fem, 11);
  const DualEvaluation ev = evaluate(pb, xi);
  std::printf("%12s %14s\n", "t", "max rel dev");
  double best = 1e300;
  for (double t : {1e-3, 1e-4, 1e-5, 1e-6}) {
    double worst = 0.0;
    for (unsigned seed = 0; seed < 10; ++seed) {
      const Eigen::VectorXd h = seeded_direction(fem, 100 + seed);
      const double fd = (phi(pb, xi + t * h) - phi(pb, xi - t * h)) / (2.0 * t);
      const double exact = fem.inner_y(ev.grad, h);
      worst = std::max(worst,
                       std::abs(fd - exact) / std::max(1e-14, std::abs(exact)));
    }
    best = std::min(best, worst);
    std::printf("%12.3e %14.6e\n", t, worst);
  }
  const bool pass = best <= 1e-6;
  std::printf("gradient check: %s (best %.3e, threshold 1e-06)\n",
              pass ? "PASS" : "FAIL", best);
  return pass ? 0 : 1;
}

int run_check_semismooth(const RunConfig& cfg) {
  const DualProblem pb = check_problem(cfg);
  const DiscreteOperators& fem = pb.fem();
  const Eigen::VectorXd xi = seeded_direction(fem, 21);
  const Eigen::VectorXd h = seeded_direction(fem, 22);
  const std::vector<double> ts = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  const auto rows = semismooth_taylor_check(pb, xi, h, ts);
  std::printf("%12s %14s %14s\n", "t", "r1", "r2");
  for (const TaylorRow& row : rows)
    std::printf("%12.3e %14.6e %14.6e\n", row.t, row.r1, row.r2);
  bool pass = true;
  for (size_t k = 0; k + 1 < rows.size(); ++k) {
    pass = pass && rows[k + 1].r1 <= 1.1 * rows[k].r1 + 1e-9;
    pass = pass && rows[k + 1].r2 <= 1.1 * rows[k].r2 + 1e-9;
  }
  std::printf("taylor remainder decrease: %s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

int run_properties() {
  const auto results = checks::run_all();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : " -- ", r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%zu checks, %d failures\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual semismooth Newton solver for Poisson-constrained control"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "single solve");
  CLI::App* mesh_cmd = app.add_subcommand("sweep-mesh", "solve over ns=<list>");
  CLI::App* alpha_cmd =
      app.add_subcommand("sweep-alpha", "cold-started solves over alphas=<list>");
  CLI::App* cont_cmd = app.add_subcommand(
      "continuation", "warm-started solves over a descending alphas=<list>");
  CLI::App* grad_cmd =
      app.add_subcommand("check-gradient", "finite-difference gradient check");
  CLI::App* semi_cmd = app.add_subcommand(
      "check-semismooth", "second-order Taylor remainder decrease check");
  CLI::App* prop_cmd =
      app.add_subcommand("properties", "run the full property suite");
  for (CLI::App* cmd :
       {solve_cmd, mesh_cmd, alpha_cmd, cont_cmd, grad_cmd, semi_cmd, prop_cmd})
    add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (prop_cmd->parsed()) return run_properties();
    if (grad_cmd->parsed())
      return run_check_gradient(load_config(args, check_defaults()));
    if (semi_cmd->parsed())
      return run_check_semismooth(load_config(args, check_defaults()));
    RunConfig cfg = load_config(args);
    if (solve_cmd->parsed()) return emit(cfg, "alpha", run_single(cfg));
    if (mesh_cmd->parsed()) return emit(cfg, "h", run_mesh_sweep(cfg));
    if (alpha_cmd->parsed()) return emit(cfg, "alpha", run_alpha_sweep(cfg));
    if (cont_cmd->parsed()) return emit(cfg, "alpha", run_continuation(cfg));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
