#include "dualprox/ssn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualprox/cg.hpp"

namespace dualprox {

void SolverConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 0.5))
    throw std::invalid_argument("SolverConfig: sigma must lie in (0, 1/2)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("SolverConfig: backtrack must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("SolverConfig: tau must lie in (0, 1]");
  if (!(eta >= 0.0)) throw std::invalid_argument("SolverConfig: eta must be >= 0");
  if (!(delta_tol > 0.0))
    throw std::invalid_argument("SolverConfig: delta_tol must be > 0");
  if (max_outer < 1 || max_backtracks < 1)
    throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::ResidualTol: return "residual_tol";
    case StopReason::DualUlp: return "dual_ulp";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::LinesearchStall: return "linesearch_stall";
  }
  return "?";
}

double ulp_of(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

double inexact_tolerance(InexactRule rule, double grad_norm, double eta,
                         double tau) {
  if (rule == InexactRule::Implemented)
    return std::min({1e-4, 0.1 * grad_norm, grad_norm * grad_norm});
  return eta * std::pow(grad_norm, 1.0 + tau);
}

SolveReport solve(const DualProblem& pb, const SolverConfig& cfg,
                  const Eigen::VectorXd* xi0) {
  cfg.validate();
  const DiscreteOperators& fem = pb.fem();
  const auto inner = [&fem](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return fem.inner_y(a, b);
  };

  SolveReport rep;
  Eigen::VectorXd xi = xi0 ? *xi0 : Eigen::VectorXd(-pb.target);
  if (xi.size() != pb.target.size())
    throw std::invalid_argument("solve: initial iterate size does not match mesh");
  DualEvaluation ev = evaluate(pb, xi);
  if (cfg.keep_iterates) rep.iterates.push_back(xi);

  rep.stop_reason = StopReason::MaxIter;
  for (int k = 0; k < cfg.max_outer; ++k) {
    if (!std::isfinite(ev.grad_norm)) break;  // diverged; counts as max_iter
    if (ev.grad_norm <= cfg.delta_tol) {
      rep.stop_reason = StopReason::ResidualTol;
      break;
    }

    const NewtonOperator op = newton_operator_from(pb, ev);
    double cg_tol =
        inexact_tolerance(cfg.inexact_rule, ev.grad_norm, cfg.eta, cfg.tau);
    // an exact solve (eta = 0) is bounded by what the arithmetic can reach
    cg_tol = std::max(cg_tol,
                      1e3 * std::numeric_limits<double>::epsilon() * ev.grad_norm);
    CgOptions cg_opts;
    cg_opts.tol = cg_tol;
    const CgOutcome cg = conjugate_gradient(
        [&op](const Eigen::VectorXd& v) { return op.apply(v); },
        Eigen::VectorXd(-ev.grad), inner, cg_opts);
    const Eigen::VectorXd& d = cg.x;
    const double dg = inner(d, ev.grad);

    if (!(dg < 0.0) && cfg.globalized) {
      rep.stop_reason = StopReason::LinesearchStall;
      break;
    }

    const LineEvaluator line(pb, xi, ev, d);
    double t = 1.0;
    bool accepted = false;
    bool at_ulp = false;
    if (cfg.globalized) {
      for (int l = 0; l < cfg.max_backtracks; ++l) {
        // a step whose predicted decrease t*|dg| does not reach the next
        // representable value of Phi cannot make measurable progress
        if (t * -dg <= ulp_of(ev.phi)) {
          at_ulp = true;
          break;
        }
        if (line.phi_delta(t) <= cfg.sigma * t * dg) {
          accepted = true;
          break;
        }
        t *= cfg.backtrack;
      }
      if (at_ulp) {
        rep.stop_reason = StopReason::DualUlp;
        break;
      }
      if (!accepted) {
        rep.stop_reason = StopReason::LinesearchStall;
        break;
      }
    }

    IterationRecord rec;
    rec.phi = ev.phi;
    rec.grad_norm = ev.grad_norm;
    rec.step = t;
    rec.dir_derivative = dg;
    rec.dir_norm = fem.norm_y(d);
    rec.cg_iterations = cg.iterations;
    rep.trace.push_back(rec);
    rep.cg_total += cg.iterations;  // inner iterations behind accepted steps

    xi += t * d;
    ev = evaluate_with_w(pb, xi, line.w_at(t));
    ++rep.iterations;
    if (cfg.keep_iterates) rep.iterates.push_back(xi);
  }

  rep.solution = xi;
  rep.phi_final = ev.phi;
  rep.residual_final = ev.grad_norm;
  rep.gap_final = duality_gap(pb, xi);
  rep.inactive_l1 = inactive_measure(pb, xi);
  return rep;
}

std::vector<SolveReport> continuation_solve(const DualProblem& base,
                                            const std::vector<double>& alphas,
                                            const SolverConfig& cfg) {
  std::vector<SolveReport> reports;
  reports.reserve(alphas.size());
  Eigen::VectorXd warm;
  for (double a : alphas) {
    const DualProblem pb = base.with_alpha(a);
    reports.push_back(solve(pb, cfg, reports.empty() ? nullptr : &warm));
    warm = reports.back().solution;
  }
  return reports;
}

}  // namespace dualprox
