#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dualprox/problems.hpp"
#include "dualprox/ssn.hpp"

namespace dualprox {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration for the experiment runner. Documented keys:
// problem, n, alpha, beta, R, mode, sigma, backtrack, eta, tau, delta_tol,
// inexact_rule, globalized, alphas, ns, output.
struct RunConfig {
  ProblemSpec problem;
  SolverConfig solver;
  std::vector<double> alpha_list;  // alphas=1e-4,1e-5,...
  std::vector<int> mesh_list;      // ns=32,64,128
  std::string output_path;
  bool allow_large = false;  // permits n > 200 (long runtimes)
};

RunConfig parse_config_file(const std::string& path, RunConfig base = {});
// apply a single `key=value` override (the --set flag)
void apply_override(RunConfig& cfg, const std::string& assignment);

struct ResultRow {
  double key = 0.0;  // h or alpha
  SolveReport report;
};

// one line per solve: key,it,cg,inactive_l1,phi,gap,residual,stop_reason
void write_csv(std::ostream& os, const std::string& key_name,
               const std::vector<ResultRow>& rows);
void print_table(std::ostream& os, const std::string& key_name,
                 const std::vector<ResultRow>& rows);

// runners; each returns the rows in sweep order. Sweep entries run
// concurrently up to the DUALPROX_THREADS cap (default 1).
std::vector<ResultRow> run_single(const RunConfig& cfg);
std::vector<ResultRow> run_mesh_sweep(const RunConfig& cfg);
std::vector<ResultRow> run_alpha_sweep(const RunConfig& cfg);
std::vector<ResultRow> run_continuation(const RunConfig& cfg);

// 0 if all rows stopped cleanly, 2 if any hit max_iter / linesearch_stall
int exit_code_for(const std::vector<ResultRow>& rows);

int sweep_thread_cap();

}  // namespace dualprox
