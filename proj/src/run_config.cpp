#include "dualprox/run_config.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace dualprox {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("value of '" + key + "' is not a number: '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("value of '" + key + "' is not an integer: '" + value + "'");
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("value of '" + key + "' is not a flag (on/off): '" + value +
                    "'");
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "problem") {
    cfg.problem.name = problem_name_from_string(value);
  } else if (key == "n") {
    cfg.problem.n = parse_int(key, value);
  } else if (key == "alpha") {
    cfg.problem.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.problem.beta = parse_double(key, value);
  } else if (key == "R") {
    cfg.problem.bound = parse_double(key, value);
  } else if (key == "mode") {
    if (value == "p0")
      cfg.problem.mode = ControlMode::P0;
    else if (value == "variational")
      cfg.problem.mode = ControlMode::Variational;
    else
      throw ConfigError("mode must be p0 or variational, got '" + value + "'");
  } else if (key == "sigma") {
    cfg.solver.sigma = parse_double(key, value);
  } else if (key == "backtrack") {
    cfg.solver.backtrack = parse_double(key, value);
  } else if (key == "eta") {
    cfg.solver.eta = parse_double(key, value);
  } else if (key == "tau") {
    cfg.solver.tau = parse_double(key, value);
  } else if (key == "delta_tol") {
    cfg.solver.delta_tol = parse_double(key, value);
  } else if (key == "max_outer") {
    cfg.solver.max_outer = parse_int(key, value);
  } else if (key == "inexact_rule") {
    if (value == "paper")
      cfg.solver.inexact_rule = InexactRule::Paper;
    else if (value == "implemented")
      cfg.solver.inexact_rule = InexactRule::Implemented;
    else
      throw ConfigError("inexact_rule must be paper or implemented, got '" +
                        value + "'");
  } else if (key == "globalized") {
    cfg.solver.globalized = parse_flag(key, value);
  } else if (key == "alphas") {
    cfg.alpha_list.clear();
    for (const std::string& part : split(value, ','))
      cfg.alpha_list.push_back(parse_double(key, part));
  } else if (key == "ns") {
    cfg.mesh_list.clear();
    for (const std::string& part : split(value, ','))
      cfg.mesh_list.push_back(parse_int(key, part));
  } else if (key == "output") {
    cfg.output_path = value;
  } else if (key == "allow_large") {
    cfg.allow_large = parse_flag(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void check_scale(const RunConfig& cfg, int n) {
  if (n > 200 && !cfg.allow_large)
    throw ConfigError("n=" + std::to_string(n) +
                      " exceeds the desk-scale cap (200); pass --allow-large "
                      "or set allow_large=on to run it");
  if (n > 200)
    std::fprintf(stderr,
                 "warning: n=%d is beyond desk scale; expect long runtimes\n", n);
}

}  // namespace

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig cfg = std::move(base);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    try {
      assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void write_csv(std::ostream& os, const std::string& key_name,
               const std::vector<ResultRow>& rows) {
  os << key_name << ",it,cg,inactive_l1,phi,gap,residual,stop_reason\n";
  char buf[256];
  for (const ResultRow& row : rows) {
    const SolveReport& r = row.report;
    std::snprintf(buf, sizeof(buf), "%.6e,%d,%d,%.6e,%.6e,%.6e,%.6e,%s\n",
                  row.key, r.iterations, r.cg_total, r.inactive_l1, r.phi_final,
                  r.gap_final, r.residual_final,
                  to_string(r.stop_reason).c_str());
    os << buf;
  }
}

void print_table(std::ostream& os, const std::string& key_name,
                 const std::vector<ResultRow>& rows) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%12s %4s %6s %12s %12s %12s %12s  %s\n",
                key_name.c_str(), "it", "cg", "|dprox|_L1", "phi", "gap",
                "residual", "stop");
  os << buf;
  for (const ResultRow& row : rows) {
    const SolveReport& r = row.report;
    std::snprintf(buf, sizeof(buf),
                  "%12.6e %4d %6d %12.6e %12.6e %12.6e %12.6e  %s\n", row.key,
                  r.iterations, r.cg_total, r.inactive_l1, r.phi_final,
                  r.gap_final, r.residual_final,
                  to_string(r.stop_reason).c_str());
    os << buf;
  }
}

int sweep_thread_cap() {
  if (const char* env = std::getenv("DUALPROX_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

namespace {

// runs jobs[0..count) concurrently with at most `cap` workers, preserving
// result order by index
template <class Job>
void run_indexed(int count, int cap, Job&& job) {
  if (cap <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(cap, count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<ResultRow> run_single(const RunConfig& cfg) {
  check_scale(cfg, cfg.problem.n);
  const DualProblem pb = build_problem(cfg.problem);
  ResultRow row;
  row.key = cfg.problem.alpha;
  row.report = solve(pb, cfg.solver);
  return {row};
}

std::vector<ResultRow> run_mesh_sweep(const RunConfig& cfg) {
  if (cfg.mesh_list.empty())
    throw ConfigError("mesh sweep requires ns=<list> in the config");
  for (int n : cfg.mesh_list) check_scale(cfg, n);
  std::vector<ResultRow> rows(cfg.mesh_list.size());
  run_indexed(static_cast<int>(cfg.mesh_list.size()), sweep_thread_cap(),
              [&](int i) {
                ProblemSpec spec = cfg.problem;
                spec.n = cfg.mesh_list[i];
                const DualProblem pb = build_problem(spec);
                rows[i].key = pb.fem().mesh().h;
                rows[i].report = solve(pb, cfg.solver);
              });
  return rows;
}

std::vector<ResultRow> run_alpha_sweep(const RunConfig& cfg) {
  if (cfg.alpha_list.empty())
    throw ConfigError("alpha sweep requires alphas=<list> in the config");
  check_scale(cfg, cfg.problem.n);
  const auto ops = assemble(build_mesh(cfg.problem.n));
  std::vector<ResultRow> rows(cfg.alpha_list.size());
  run_indexed(static_cast<int>(cfg.alpha_list.size()), sweep_thread_cap(),
              [&](int i) {
                ProblemSpec spec = cfg.problem;
                spec.alpha = cfg.alpha_list[i];
                const DualProblem pb = build_problem(spec, ops);
                rows[i].key = spec.alpha;
                rows[i].report = solve(pb, cfg.solver);
              });
  return rows;
}

std::vector<ResultRow> run_continuation(const RunConfig& cfg) {
  if (cfg.alpha_list.empty())
    throw ConfigError("continuation requires alphas=<list> in the config");
  check_scale(cfg, cfg.problem.n);
  ProblemSpec spec = cfg.problem;
  spec.alpha = cfg.alpha_list.front();
  const DualProblem base = build_problem(spec);
  const auto reports = continuation_solve(base, cfg.alpha_list, cfg.solver);
  std::vector<ResultRow> rows(reports.size());
  for (size_t i = 0; i < reports.size(); ++i)
    rows[i] = {cfg.alpha_list[i], reports[i]};
  return rows;
}

int exit_code_for(const std::vector<ResultRow>& rows) {
  for (const ResultRow& row : rows) {
    if (row.report.stop_reason == StopReason::MaxIter ||
        row.report.stop_reason == StopReason::LinesearchStall)
      return 2;
  }
  return 0;
}

}  // namespace dualprox
