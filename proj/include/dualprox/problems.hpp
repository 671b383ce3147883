#pragma once

#include <memory>
#include <optional>
#include <string>

#include "dualprox/dual_objective.hpp"

namespace dualprox {

// Experiment problems on the unit square. The desired state of the first
// one is a nodal interpolant; the second counteracts a localized forcing
// and uses z = S f with f sampled at cell centroids. Unset parameters fall
// back to each problem's own defaults (beta = 1e-2 and R = 1000 for the
// first, R = 1 for the second).
struct ProblemSpec {
  enum class Name { Example1, Example2, Quadratic };
  Name name = Name::Example1;
  int n = 100;
  double alpha = 1e-5;
  std::optional<double> beta;   // L1 weight
  std::optional<double> bound;  // box bound R
  ControlMode mode = ControlMode::P0;
};

ProblemSpec::Name problem_name_from_string(const std::string& s);

// box + L1 cost, z(x1,x2) = 10 x1 sin(5 x1) cos(7 x2)
DualProblem build_example1(int n, double alpha, ControlMode mode = ControlMode::P0,
                           double beta = 1e-2, double bound = 1000.0,
                           std::shared_ptr<const DiscreteOperators> ops = nullptr);

// box constraints, z = S f with f = chi_{[0,0.2]}(x1) * 5 sin(pi x2)
DualProblem build_example2(int n, double alpha, ControlMode mode = ControlMode::P0,
                           double bound = 1.0,
                           std::shared_ptr<const DiscreteOperators> ops = nullptr);

// g = 0; Phi is quadratic and the solution solves (I + (1/a) S S*) xi = z
DualProblem build_quadratic(int n, double alpha,
                            ControlMode mode = ControlMode::P0,
                            std::shared_ptr<const DiscreteOperators> ops = nullptr);

DualProblem build_problem(const ProblemSpec& spec,
                          std::shared_ptr<const DiscreteOperators> ops = nullptr);

// pointwise data functions (exposed for tests)
double example1_target(double x1, double x2);
double example2_forcing(double x1, double x2);

}  // namespace dualprox
