// Acceptance suite: desk-scale reproduction of the reference results plus
// the structural property checks. Prints one line per criterion; the exit
// code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "dualprox/checks.hpp"
#include "dualprox/problems.hpp"
#include "dualprox/ssn.hpp"

using namespace dualprox;

namespace {

int g_failures = 0;

void criterion(int num, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n        %s\n", pass ? "PASS" : "FAIL", num,
              name, detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

Eigen::VectorXd seeded_interior(const DiscreteOperators& fem, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(fem.mesh().num_nodes());
  for (int i = 0; i < v.size(); ++i)
    v[i] = fem.mesh().boundary[i] ? 0.0 : dist(rng);
  return v;
}

void criterion_1_mesh_family() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> ns = {32, 64, 128};
  const std::vector<int> cg_ref = {98, 98, 99};
  const std::vector<double> phi_ref = {-3.06, -3.41, -3.60};
  bool pass = true;
  std::ostringstream detail;
  for (size_t i = 0; i < ns.size(); ++i) {
    const SolveReport rep = solve(build_example1(ns[i], 1e-5), {});
    const bool it_ok = std::abs(rep.iterations - 8) <= 2;
    const bool cg_ok = std::abs(rep.cg_total - cg_ref[i]) <= 0.25 * cg_ref[i];
    const bool phi_ok = within(rep.phi_final, phi_ref[i], 0.02);
    const bool res_ok = rep.residual_final <= 1e-8;
    const bool gap_ok = std::abs(rep.gap_final) <= 1e-12;
    pass = pass && it_ok && cg_ok && phi_ok && res_ok && gap_ok;
    detail << "n=" << ns[i] << ": it=" << rep.iterations << " cg=" << rep.cg_total
           << " phi=" << fmt(rep.phi_final) << " res=" << fmt(rep.residual_final)
           << " gap=" << fmt(rep.gap_final) << "; ";
  }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 60.0;
  detail << "runtime " << fmt(secs) << "s (cap 60s)";
  criterion(1, "mesh family reproduction (it, cg, phi, residual, gap)", pass,
            detail.str());
}

std::vector<SolveReport> sweep(ControlMode mode,
                               std::shared_ptr<const DiscreteOperators> ops) {
  std::vector<SolveReport> reps;
  for (double a : {1e-4, 1e-5, 1e-6, 1e-7})
    reps.push_back(solve(build_example1(100, a, mode, 1e-2, 1000.0, ops), {}));
  return reps;
}

void criterion_2_and_3() {
  auto ops = assemble(build_mesh(100));
  const auto p0 = sweep(ControlMode::P0, ops);
  const auto var = sweep(ControlMode::Variational, ops);

  {
    bool monotone = true;
    for (size_t i = 0; i + 1 < p0.size(); ++i)
      monotone = monotone && p0[i].iterations <= p0[i + 1].iterations;
    const bool it_ok = std::abs(p0[0].iterations - 5) <= 2;
    const bool inact_ok = within(p0[0].inactive_l1, 0.457, 0.15);
    const bool phi_ok = within(p0[0].phi_final, -4.70, 0.03);
    std::ostringstream detail;
    detail << "it(alpha)=";
    for (const auto& r : p0) detail << r.iterations << " ";
    detail << "(nondecreasing=" << monotone << "), it@1e-4=" << p0[0].iterations
           << ", inactive=" << fmt(p0[0].inactive_l1) << " (target 0.457+-15%)"
           << ", phi=" << fmt(p0[0].phi_final) << " (target -4.70+-3%"
           << (phi_ok ? "" : "; coarse-mesh value, see notes") << ")";
    criterion(2, "regularization sweep trend at n=100",
              monotone && it_ok && inact_ok && phi_ok, detail.str());
  }
  {
    bool le_plus_one = true;
    for (size_t i = 0; i < var.size(); ++i)
      le_plus_one = le_plus_one && var[i].iterations <= p0[i].iterations + 1;
    const bool strict = var.back().iterations < p0.back().iterations;
    std::ostringstream detail;
    detail << "variational it=";
    for (const auto& r : var) detail << r.iterations << " ";
    detail << "vs p0 it=";
    for (const auto& r : p0) detail << r.iterations << " ";
    detail << "(<=p0+1: " << le_plus_one << ", strict win at 1e-7: " << strict
           << ")";
    criterion(3, "variational vs p0 iteration counts at n=100",
              le_plus_one && strict, detail.str());
  }
}

void criterion_4_and_5() {
  auto ops = assemble(build_mesh(40));
  {
    const SolveReport a4 = solve(build_example2(40, 1e-4, ControlMode::P0, 1.0, ops), {});
    const SolveReport a5 = solve(build_example2(40, 1e-5, ControlMode::P0, 1.0, ops), {});
    const bool res_ok = a4.residual_final <= 1e-8 && a5.residual_final <= 1e-8;
    const bool phi_ok = within(a4.phi_final, -4.61e-5, 0.10);
    const bool growth = a5.iterations > a4.iterations;
    std::ostringstream detail;
    detail << "it=" << a4.iterations << "," << a5.iterations
           << " res=" << fmt(a4.residual_final) << "," << fmt(a5.residual_final)
           << " phi@1e-4=" << fmt(a4.phi_final) << " (target -4.61e-05+-10%)";
    criterion(4, "perturbation-countering problem at n=40", res_ok && phi_ok && growth,
              detail.str());
  }
  {
    const std::vector<double> alphas = {1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    const DualProblem base = build_example2(40, 1e-4, ControlMode::P0, 1.0, ops);
    const auto warm = continuation_solve(base, alphas, {});
    int warm_cg = 0, cold_cg = 0, max_it = 0;
    for (const auto& r : warm) {
      warm_cg += r.cg_total;
      max_it = std::max(max_it, r.iterations);
    }
    for (double a : alphas) cold_cg += solve(base.with_alpha(a), {}).cg_total;
    std::ostringstream detail;
    detail << "per-alpha it=";
    for (const auto& r : warm) detail << r.iterations << " ";
    detail << "(cap 10), warm cg=" << warm_cg << " < cold cg=" << cold_cg;
    criterion(5, "continuation beats cold starts", max_it <= 10 && warm_cg < cold_cg,
              detail.str());
  }
}

void criterion_6_globalization() {
  const DualProblem pb = build_example1(32, 1e-5);
  SolverConfig plain;
  plain.globalized = false;
  plain.max_outer = 50;
  const SolveReport unglob = solve(pb, plain);
  const SolveReport glob = solve(pb, {});
  const bool unglob_fails = !(unglob.residual_final <= 1e-12);
  const bool glob_works = glob.residual_final <= 1e-8;
  std::ostringstream detail;
  detail << "unglobalized res=" << fmt(unglob.residual_final) << " after "
         << unglob.iterations << " it (stop=" << to_string(unglob.stop_reason)
         << "); globalized res=" << fmt(glob.residual_final);
  criterion(6, "globalization necessity", unglob_fails && glob_works, detail.str());
}

void criterion_7_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = checks::run_all();
  int failures = 0;
  std::ostringstream detail;
  for (const auto& r : results) {
    if (!r.pass) {
      ++failures;
      detail << "FAILED: " << r.name << " (" << r.detail << "); ";
    }
  }
  const double secs = seconds_since(t0);
  detail << results.size() << " checks, " << failures << " failures, "
         << fmt(secs) << "s (cap 120s)";
  criterion(7, "property suite", failures == 0 && secs <= 120.0, detail.str());
}

void criterion_8_taylor() {
  auto ops = assemble(build_mesh(16));
  const Eigen::VectorXd xi = seeded_interior(*ops, 21);
  const Eigen::VectorXd h = seeded_interior(*ops, 22);
  const std::vector<double> ts = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  const Eigen::VectorXd target =
      build_example1(16, 1e-2, ControlMode::P0, 1e-2, 1000.0, ops).target;

  bool pass = true;
  std::ostringstream detail;
  // box and soft-threshold families: remainders decrease monotonically
  // (10% allowance on top of the stated 1e-9 noise floor)
  struct Case {
    const char* name;
    ProxFamily family;
    ControlMode mode;
  };
  const std::vector<Case> cases = {
      {"box/p0", ProxFamily::box(0.02), ControlMode::P0},
      {"box/var", ProxFamily::box(0.02), ControlMode::Variational},
      {"l1/p0", ProxFamily::l1(2e-4), ControlMode::P0},
      {"l1/var", ProxFamily::l1(2e-4), ControlMode::Variational},
  };
  for (const Case& c : cases) {
    const DualProblem pb(ops, target, 1e-2, c.family, c.mode);
    const auto rows = semismooth_taylor_check(pb, xi, h, ts);
    bool mono = true;
    for (size_t k = 0; k + 1 < rows.size(); ++k) {
      mono = mono && rows[k + 1].r1 <= 1.1 * rows[k].r1 + 1e-9;
      mono = mono && rows[k + 1].r2 <= 1.1 * rows[k].r2 + 1e-9;
    }
    pass = pass && mono;
    detail << c.name << " mono=" << mono << " (r1 " << fmt(rows.front().r1)
           << "->" << fmt(rows.back().r1) << "); ";
  }
  // quadratic family: both remainders at roundoff
  {
    const DualProblem pb = build_quadratic(16, 1e-2, ControlMode::P0, ops);
    const auto rows = semismooth_taylor_check(pb, xi, h, ts);
    double worst = 0.0;
    for (const TaylorRow& r : rows) worst = std::max({worst, r.r1, r.r2});
    pass = pass && worst <= 1e-10;
    detail << "zero family max remainder " << fmt(worst) << " (cap 1e-10)";
  }
  criterion(8, "second-order Taylor remainder decrease", pass, detail.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_mesh_family();
  criterion_2_and_3();
  criterion_4_and_5();
  criterion_6_globalization();
  criterion_7_properties();
  criterion_8_taylor();
  std::printf("%s: %d of 8 criteria failed (%.1fs total)\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failures,
              seconds_since(t0));
  return g_failures;
}
