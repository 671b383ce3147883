#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dualprox/dual_objective.hpp"

namespace dualprox {

enum class InexactRule { Paper, Implemented };

struct SolverConfig {
  double sigma = 0.1;        // Armijo slope fraction, in (0, 1/2)
  double backtrack = 0.5;    // step shrink factor, in (0, 1)
  double eta = 0.0;          // forcing constant of the power rule
  double tau = 1.0;          // forcing exponent, in (0, 1]
  double delta_tol = 1e-12;  // gradient norm at which to stop
  int max_outer = 200;
  int max_backtracks = 60;
  InexactRule inexact_rule = InexactRule::Implemented;
  bool globalized = true;
  bool keep_iterates = false;

  void validate() const;
};

enum class StopReason { ResidualTol, DualUlp, MaxIter, LinesearchStall };

std::string to_string(StopReason r);

struct IterationRecord {
  double phi = 0.0;             // Phi at the iterate the step started from
  double grad_norm = 0.0;
  double step = 0.0;            // accepted step size
  double dir_derivative = 0.0;  // <d, grad Phi>
  double dir_norm = 0.0;        // |d| in the Y-norm
  int cg_iterations = 0;
};

struct SolveReport {
  int iterations = 0;  // accepted Newton steps
  int cg_total = 0;    // inner iterations over all solves
  double phi_final = 0.0;
  double gap_final = 0.0;
  double residual_final = 0.0;
  double inactive_l1 = 0.0;
  StopReason stop_reason = StopReason::MaxIter;
  std::vector<IterationRecord> trace;
  std::vector<Eigen::VectorXd> iterates;  // xi_0 .. xi_final if requested
  Eigen::VectorXd solution;
};

// CG tolerance for the Newton equation at the given gradient norm.
double inexact_tolerance(InexactRule rule, double grad_norm, double eta, double tau);

// Globalized inexact semismooth Newton method on the dual objective.
// Default start is xi0 = -z, matching the primal guess u = 0.
SolveReport solve(const DualProblem& pb, const SolverConfig& cfg,
                  const Eigen::VectorXd* xi0 = nullptr);

// Solves for every alpha in the (descending) schedule, warm-starting each
// solve with the previous solution.
std::vector<SolveReport> continuation_solve(const DualProblem& base,
                                            const std::vector<double>& alphas,
                                            const SolverConfig& cfg);

// Distance from |x| to the next larger representable double.
double ulp_of(double x);

}  // namespace dualprox
