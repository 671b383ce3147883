#include "dualprox/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dualprox/cg.hpp"
#include "dualprox/problems.hpp"
#include "dualprox/ssn.hpp"

namespace dualprox::checks {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CheckResult result(const std::string& name, bool pass, const std::string& detail) {
  return {name, pass, detail};
}

std::vector<ScaledProx> test_families() {
  return {ScaledProx(ProxFamily::zero(), 1.0),
          ScaledProx(ProxFamily::box(1.0), 1.0),
          ScaledProx(ProxFamily::l1(0.5), 1.0),
          ScaledProx(ProxFamily::box_l1(0.5, 1.0), 1.0)};
}

// brute-force minimizer of 0.5 (x - v)^2 + gtilde(x)/alpha on a grid
struct GridMin {
  double arg;
  double value;
};

GridMin grid_minimize(const ScaledProx& sp, double v, double lo, double hi,
                      double step) {
  const ProxFamily& fam = sp.family();
  GridMin best{0.0, std::numeric_limits<double>::infinity()};
  const long count = std::lround((hi - lo) / step);
  for (long i = 0; i <= count; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if ((fam.kind == ProxKind::Box || fam.kind == ProxKind::BoxL1) &&
        std::abs(x) > fam.bound)
      continue;
    const double val = 0.5 * (x - v) * (x - v) + sp.penalty(x);
    if (val < best.value) best = {x, val};
  }
  return best;
}

Eigen::VectorXd random_nodal(const DiscreteOperators& fem, std::mt19937& rng,
                             bool interior_only = true) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(fem.mesh().num_nodes());
  for (int i = 0; i < v.size(); ++i) {
    v[i] = dist(rng);
    if (interior_only && fem.mesh().boundary[i]) v[i] = 0.0;
  }
  return v;
}

// interpolation onto the mesh with doubled resolution; fine nodes sit on
// coarse nodes, edge midpoints or diagonal midpoints
Eigen::VectorXd prolong(const Mesh& coarse, const Eigen::VectorXd& y,
                        const Mesh& fine) {
  const int n = coarse.n;
  const int nnc = n + 1;
  const int nnf = 2 * n + 1;
  auto coarse_at = [&](int i, int j) { return y[j * nnc + i]; };
  Eigen::VectorXd out(fine.num_nodes());
  for (int j = 0; j < nnf; ++j) {
    for (int i = 0; i < nnf; ++i) {
      double val = 0.0;
      if (i % 2 == 0 && j % 2 == 0) {
        val = coarse_at(i / 2, j / 2);
      } else if (i % 2 == 1 && j % 2 == 0) {
        val = 0.5 * (coarse_at(i / 2, j / 2) + coarse_at(i / 2 + 1, j / 2));
      } else if (i % 2 == 0 && j % 2 == 1) {
        val = 0.5 * (coarse_at(i / 2, j / 2) + coarse_at(i / 2, j / 2 + 1));
      } else {
        // center of a coarse square lies on the split diagonal
        val = 0.5 * (coarse_at(i / 2, j / 2) + coarse_at(i / 2 + 1, j / 2 + 1));
      }
      out[j * nnf + i] = val;
    }
  }
  return out;
}

}  // namespace

std::vector<CheckResult> prox_properties() {
  std::vector<CheckResult> out;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);

  {  // nonexpansiveness over 1e4 random pairs per family
    double worst = 0.0;
    for (const ScaledProx& sp : test_families()) {
      for (int k = 0; k < 10000; ++k) {
        const double a = dist(rng), b = dist(rng);
        worst = std::max(worst, std::abs(sp.prox(a) - sp.prox(b)) - std::abs(a - b));
      }
    }
    out.push_back(result("prox nonexpansive", worst <= 1e-14,
                         "max excess " + fmt(worst)));
  }

  {  // prox and envelope against the 1-D grid oracle
    std::uniform_real_distribution<double> mid(-2.5, 2.5);
    double worst_p = 0.0, worst_e = 0.0;
    for (const ScaledProx& sp : test_families()) {
      for (int k = 0; k < 1000; ++k) {
        const double v = mid(rng);
        const GridMin gm = grid_minimize(sp, v, -4.0, 4.0, 1e-4);
        worst_p = std::max(worst_p, std::abs(gm.arg - sp.prox(v)));
        worst_e = std::max(worst_e, std::abs(gm.value - sp.envelope(v)));
      }
    }
    out.push_back(result("prox/envelope match brute-force oracle",
                         worst_p <= 5e-4 && worst_e <= 5e-4,
                         "max dev prox " + fmt(worst_p) + ", env " + fmt(worst_e)));
  }

  {  // prox characterization: box range, exact soft-threshold magnitudes
    const ScaledProx box(ProxFamily::box(1.0), 1.0);
    const ScaledProx l1(ProxFamily::l1(0.5), 1.0);
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const double v = dist(rng);
      const double pb = box.prox(v);
      ok = ok && pb >= -1.0 && pb <= 1.0;
      const double pl = l1.prox(v);
      ok = ok && (pl == 0.0 || std::abs(pl) == std::abs(v) - 0.5);
    }
    out.push_back(result("prox characterization (box range, L1 shrink)", ok, ""));
  }

  {  // slope equals a one-sided difference quotient everywhere
    bool ok = true;
    double worst = 0.0;
    for (const ScaledProx& sp : test_families()) {
      std::vector<double> points;
      for (int k = 0; k < 1000; ++k) points.push_back(dist(rng));
      for (double kink : sp.kinks()) points.push_back(kink);
      for (double v : points) {
        const double s = sp.derivative(v);
        const double t = 1e-8;
        const double right = (sp.prox(v + t) - sp.prox(v)) / t;
        const double left = (sp.prox(v) - sp.prox(v - t)) / t;
        const double dev = std::min(std::abs(right - s), std::abs(left - s));
        worst = std::max(worst, dev);
        ok = ok && dev <= 1e-6;
      }
    }
    out.push_back(result("dprox matches one-sided difference quotient", ok,
                         "max dev " + fmt(worst)));
  }

  {  // envelope gradient identity via central differences, away from kinks
    double worst = 0.0;
    for (const ScaledProx& sp : test_families()) {
      int tested = 0;
      while (tested < 1000) {
        const double v = dist(rng);
        bool near_kink = false;
        for (double kink : sp.kinks())
          near_kink = near_kink || std::abs(v - kink) < 1e-3;
        if (near_kink) continue;
        ++tested;
        const double t = 1e-6;
        const double fd = (sp.envelope(v + t) - sp.envelope(v - t)) / (2.0 * t);
        worst = std::max(worst, std::abs(fd - (v - sp.prox(v))));
      }
    }
    out.push_back(result("envelope gradient = v - prox(v)", worst <= 1e-6,
                         "max dev " + fmt(worst)));
  }
  return out;
}

std::vector<CheckResult> fem_properties() {
  std::vector<CheckResult> out;
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto ops = assemble(build_mesh(16));

  {  // adjoint identity <S u, xi> = <u, S* xi> over 100 random pairs
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd u(ops->mesh().num_cells());
      for (int i = 0; i < u.size(); ++i) u[i] = dist(rng);
      Eigen::VectorXd xi(ops->mesh().num_nodes());
      for (int i = 0; i < xi.size(); ++i) xi[i] = dist(rng);
      const double lhs = ops->inner_y(ops->apply_S(u), xi);
      const double rhs = ops->inner_u(u, ops->apply_Sstar(xi));
      const double scale = std::max(1.0, std::abs(lhs));
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    out.push_back(result("adjoint identity S / S*", worst <= 1e-12,
                         "max rel dev " + fmt(worst)));
  }

  {  // L2 error against the next refinement contracts like h^2
    std::vector<Eigen::VectorXd> ys;
    std::vector<Mesh> meshes;
    for (int n : {8, 16, 32}) {
      meshes.push_back(build_mesh(n));
      auto o = assemble(meshes.back());
      ys.push_back(o->apply_S(Eigen::VectorXd::Ones(meshes.back().num_cells())));
    }
    auto o16 = assemble(meshes[1]);
    auto o32 = assemble(meshes[2]);
    const double d1 = o16->norm_y(prolong(meshes[0], ys[0], meshes[1]) - ys[1]);
    const double d2 = o32->norm_y(prolong(meshes[1], ys[1], meshes[2]) - ys[2]);
    const double ratio = d1 / d2;
    out.push_back(result("mesh refinement order ~ h^2", ratio >= 3.5 && ratio <= 4.5,
                         "error ratio " + fmt(ratio)));
  }

  {  // solve residual and the discrete maximum principle
    Eigen::VectorXd u(ops->mesh().num_cells());
    for (int i = 0; i < u.size(); ++i) u[i] = dist(rng);
    const Eigen::VectorXd y = ops->apply_S(u);
    Eigen::VectorXd r = ops->mixed_mass() * u;
    // subtract K y on interior dofs
    Eigen::VectorXd y_int(ops->num_interior());
    std::vector<int> nodes;
    for (int i = 0; i < ops->mesh().num_nodes(); ++i)
      if (ops->interior_index()[i] >= 0) nodes.push_back(i);
    for (size_t k = 0; k < nodes.size(); ++k) y_int[k] = y[nodes[k]];
    const Eigen::VectorXd Ky = ops->stiffness() * y_int;
    double worst = 0.0;
    for (size_t k = 0; k < nodes.size(); ++k)
      worst = std::max(worst, std::abs(r[nodes[k]] - Ky[k]));
    const Eigen::VectorXd ypos = ops->apply_S(u.cwiseAbs());
    out.push_back(result("galerkin residual and max principle",
                         worst <= 1e-11 && ypos.minCoeff() >= -1e-12,
                         "residual " + fmt(worst) + ", min y " +
                             fmt(ypos.minCoeff())));
  }
  return out;
}

std::vector<CheckResult> objective_properties() {
  std::vector<CheckResult> out;
  std::mt19937 rng(4321);
  auto ops = assemble(build_mesh(8));

  // thresholds sit inside the range of S*xi/alpha at the random test points,
  // so the checks run across actual prox kinks
  for (ControlMode mode : {ControlMode::P0, ControlMode::Variational}) {
    const DualProblem pb =
        build_example1(8, 1e-3, mode, 1e-3, 1.0, ops);
    const Eigen::VectorXd xi = random_nodal(*ops, rng);
    const DualEvaluation ev = evaluate(pb, xi);
    double worst = 0.0;
    const double t = 1e-5;
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd h = random_nodal(*ops, rng);
      const double fd = (phi(pb, xi + t * h) - phi(pb, xi - t * h)) / (2.0 * t);
      const double exact = ops->inner_y(ev.grad, h);
      worst = std::max(worst, std::abs(fd - exact) /
                                  std::max(1e-12, std::abs(exact)));
    }
    out.push_back(result(std::string("fd gradient match (") +
                             (mode == ControlMode::P0 ? "p0" : "variational") + ")",
                         worst <= 1e-6, "max rel dev " + fmt(worst)));
  }

  const DualProblem pb = build_example1(8, 1e-3, ControlMode::P0, 1e-3, 1.0, ops);
  {  // strong monotonicity of the gradient
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd a = random_nodal(*ops, rng);
      const Eigen::VectorXd b = random_nodal(*ops, rng);
      const Eigen::VectorXd ga = grad_phi(pb, a), gb = grad_phi(pb, b);
      const double lhs = ops->inner_y(ga - gb, a - b);
      const Eigen::VectorXd d = a - b;
      const double rhs = ops->inner_y(d, d);
      worst = std::max(worst, rhs - lhs);
    }
    out.push_back(result("strong monotonicity of grad Phi", worst <= 1e-10,
                         "max defect " + fmt(worst)));
  }

  {  // gradient Lipschitz bound 1 + |S S*| / alpha
    const double lip = 1.0 + estimate_ss_star_norm(*ops) / pb.alpha;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd a = random_nodal(*ops, rng);
      const Eigen::VectorXd b = random_nodal(*ops, rng);
      const double num = ops->norm_y(grad_phi(pb, a) - grad_phi(pb, b));
      const double den = ops->norm_y(a - b);
      if (den > 0.0) worst = std::max(worst, num / den);
    }
    out.push_back(result("gradient Lipschitz bound", worst <= lip * (1.0 + 1e-8),
                         "observed " + fmt(worst) + " vs bound " + fmt(lip)));
  }

  {  // Newton operator: self-adjoint and coercive
    const Eigen::VectorXd xi = random_nodal(*ops, rng);
    const NewtonOperator op = newton_operator_at(pb, xi);
    double worst_sym = 0.0, worst_coer = -1e300;
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd v = random_nodal(*ops, rng, false);
      const Eigen::VectorXd w = random_nodal(*ops, rng, false);
      const Eigen::VectorXd Av = op.apply(v), Aw = op.apply(w);
      worst_sym = std::max(
          worst_sym, std::abs(ops->inner_y(Av, w) - ops->inner_y(v, Aw)) /
                         (ops->norm_y(v) * ops->norm_y(w)));
      const double nv = ops->inner_y(v, v);
      worst_coer = std::max(worst_coer, nv - ops->inner_y(Av, v));
    }
    out.push_back(result("newton operator self-adjoint and >= I",
                         worst_sym <= 1e-10 && worst_coer <= 1e-10,
                         "sym " + fmt(worst_sym) + ", coercivity defect " +
                             fmt(worst_coer)));
  }
  return out;
}

std::vector<CheckResult> cg_properties() {
  std::vector<CheckResult> out;
  std::mt19937 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
  const Eigen::MatrixXd A = R.transpose() * R + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = gauss(rng);
  const auto euclid = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(y);
  };
  const double lambda_max =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().maxCoeff();

  {  // <x_k, b> >= |b|^2 / |A| at every iterate of a stiff solve
    CgOptions opts;
    opts.tol = 1e-7;
    opts.track_x_dot_b = true;
    const CgOutcome res = conjugate_gradient(
        [&A](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); }, b,
        euclid, opts);
    const double bound = b.squaredNorm() / lambda_max;
    bool ok = res.converged;
    for (double v : res.x_dot_b) ok = ok && v >= bound - 1e-12;
    out.push_back(result("cg iterate bound <x_k,b> >= |b|^2/|A|", ok,
                         "bound " + fmt(bound) + ", " +
                             std::to_string(res.iterations) + " iterations"));
  }

  // the exact-arithmetic statements (monotone <x_k,b>, residual
  // orthogonality) are checked on a well-conditioned system that terminates
  // far from the stagnation regime
  const Eigen::MatrixXd Awell =
      Eigen::MatrixXd::Identity(n, n) + 0.1 * (A / lambda_max);
  {
    CgOptions opts;
    opts.tol = 1e-12;
    opts.track_x_dot_b = true;
    const CgOutcome res = conjugate_gradient(
        [&Awell](const Eigen::VectorXd& v) { return Eigen::VectorXd(Awell * v); },
        b, euclid, opts);
    const double bound = b.squaredNorm() / 1.1;
    bool ok = res.converged;
    double prev = 0.0;
    for (double v : res.x_dot_b) {
      ok = ok && v >= bound - 1e-12 && v >= prev - 1e-12;
      prev = v;
    }
    out.push_back(result("cg monotone <x_k,b> and termination", ok,
                         std::to_string(res.iterations) + " iterations"));
  }

  {  // residual orthogonality on the same well-conditioned system
    std::vector<Eigen::VectorXd> residuals;
    CgOptions opts;
    opts.tol = 1e-12;
    opts.observer = [&residuals](int, const Eigen::VectorXd&,
                                 const Eigen::VectorXd& r) {
      residuals.push_back(r);
    };
    conjugate_gradient(
        [&Awell](const Eigen::VectorXd& v) { return Eigen::VectorXd(Awell * v); },
        b, euclid, opts);
    double worst = 0.0;
    for (size_t i = 0; i < residuals.size(); ++i)
      for (size_t j = 0; j < i; ++j) {
        const double denom =
            residuals[i].norm() * residuals[j].norm();
        if (denom > 1e-28)
          worst = std::max(worst,
                           std::abs(residuals[i].dot(residuals[j])) / denom);
      }
    out.push_back(result("cg residual orthogonality", worst <= 1e-8,
                         "max |<r_i,r_j>|/norms " + fmt(worst)));
  }
  return out;
}

std::vector<CheckResult> ssn_properties() {
  std::vector<CheckResult> out;
  auto ops = assemble(build_mesh(16));
  const DualProblem pb = build_example1(16, 1e-4, ControlMode::P0, 1e-2, 1000.0, ops);

  SolverConfig ref_cfg;
  ref_cfg.delta_tol = 1e-13;
  ref_cfg.keep_iterates = true;
  const SolveReport ref = solve(pb, ref_cfg);

  SolverConfig test_cfg;
  test_cfg.delta_tol = 1e-7;
  test_cfg.keep_iterates = true;
  const SolveReport run = solve(pb, test_cfg);

  const Eigen::VectorXd& xibar = ref.solution;
  const DiscreteOperators& fem = *ops;

  {  // error bound |xi_k - xibar| <= |grad Phi(xi_k)| on the tested trace
    bool ok = run.iterations > 0;
    double worst = -1e300;
    for (size_t k = 0; k < run.iterates.size(); ++k) {
      const double err = fem.norm_y(run.iterates[k] - xibar);
      const double res = k < run.trace.size() ? run.trace[k].grad_norm
                                              : run.residual_final;
      worst = std::max(worst, err - res);
      ok = ok && err <= res + 1e-10;
    }
    out.push_back(result("error bound |xi - xibar| <= |grad|", ok,
                         "max defect " + fmt(worst)));
  }

  {  // full steps in the tail of the converged reference run
    bool ok = ref.trace.size() >= 3;
    for (size_t k = ref.trace.size() - 3; ok && k < ref.trace.size(); ++k)
      ok = ref.trace[k].step == 1.0;
    out.push_back(result("full-step tail (last 3 steps t=1)", ok, ""));
  }

  {  // superlinar tail: last error ratios strictly decreasing
    std::vector<double> errs;
    for (const auto& it : run.iterates) errs.push_back(fem.norm_y(it - xibar));
    std::vector<double> ratios;
    for (size_t k = 0; k + 1 < errs.size(); ++k)
      if (errs[k] > 0.0) ratios.push_back(errs[k + 1] / errs[k]);
    bool ok = ratios.size() >= 3;
    std::string detail = "ratios";
    for (size_t k = ratios.size() >= 3 ? ratios.size() - 3 : 0; k < ratios.size();
         ++k) {
      if (k + 1 < ratios.size()) ok = ok && ratios[k] > ratios[k + 1];
      detail += " " + fmt(ratios[k]);
    }
    out.push_back(result("superlinear ratio decrease", ok, detail));
  }

  {  // descent bound with the estimated curvature constant
    const double chat = estimate_ss_star_norm(fem) / pb.alpha;
    bool ok = true;
    double worst = -1e300;
    for (const auto& r : run.trace) {
      const double bound = -r.grad_norm * r.grad_norm / (1.0 + chat) * (1.0 - 1e-6);
      worst = std::max(worst, r.dir_derivative - bound);
      ok = ok && r.dir_derivative <= bound;
    }
    out.push_back(result("descent bound <d,g> <= -|g|^2/(1+c)", ok,
                         "max defect " + fmt(worst)));
  }

  {  // step-size lower bound whenever a step was damped
    const double lhat = 1.0 + estimate_ss_star_norm(fem) / pb.alpha;
    bool ok = true;
    const SolverConfig cfg;  // defaults carry sigma and backtrack
    for (const auto& r : ref.trace) {
      if (r.step >= 1.0) continue;
      const double bound = 0.9 * cfg.backtrack * (1.0 - cfg.sigma) *
                           std::abs(r.dir_derivative) /
                           (0.5 * lhat * r.dir_norm * r.dir_norm);
      ok = ok && r.step >= bound;
    }
    out.push_back(result("damped step lower bound", ok, ""));
  }

  {  // monotone Phi along accepted iterates, negative directional derivatives
    bool ok = true;
    for (size_t k = 0; k + 1 < ref.trace.size(); ++k)
      ok = ok && ref.trace[k + 1].phi < ref.trace[k].phi;
    ok = ok && ref.phi_final < ref.trace.back().phi;
    for (const auto& r : ref.trace) ok = ok && r.dir_derivative < 0.0;
    out.push_back(result("monotone Phi and descent directions", ok, ""));
  }
  return out;
}

std::vector<CheckResult> run_all() {
  std::vector<CheckResult> all;
  for (auto&& group : {prox_properties(), fem_properties(), objective_properties(),
                       cg_properties(), ssn_properties()})
    all.insert(all.end(), group.begin(), group.end());
  return all;
}

}  // namespace dualprox::checks
