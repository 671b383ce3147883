#include "dualprox/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualprox {

namespace {

std::shared_ptr<const DiscreteOperators> ops_for(
    int n, std::shared_ptr<const DiscreteOperators> ops) {
  if (ops) {
    if (ops->mesh().n != n)
      throw std::invalid_argument("supplied operators were built for another mesh");
    return ops;
  }
  return assemble(build_mesh(n));
}

}  // namespace

double example1_target(double x1, double x2) {
  return 10.0 * x1 * std::sin(5.0 * x1) * std::cos(7.0 * x2);
}

double example2_forcing(double x1, double x2) {
  return x1 <= 0.2 ? 5.0 * std::sin(std::numbers::pi * x2) : 0.0;
}

DualProblem build_example1(int n, double alpha, ControlMode mode, double beta,
                           double bound,
                           std::shared_ptr<const DiscreteOperators> ops) {
  auto fem = ops_for(n, std::move(ops));
  const Mesh& mesh = fem->mesh();
  // interior interpolant: the dual iteration lives in the H^1_0-conforming
  // space, so the data enters through its values at interior nodes
  Eigen::VectorXd z(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    z[i] = mesh.boundary[i] ? 0.0
                            : example1_target(mesh.nodes(i, 0), mesh.nodes(i, 1));
  return DualProblem(std::move(fem), std::move(z), alpha,
                     ProxFamily::box_l1(beta, bound), mode);
}

DualProblem build_example2(int n, double alpha, ControlMode mode, double bound,
                           std::shared_ptr<const DiscreteOperators> ops) {
  auto fem = ops_for(n, std::move(ops));
  const Mesh& mesh = fem->mesh();
  Eigen::VectorXd f(mesh.num_cells());
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto tri = mesh.triangles.row(e);
    const double cx = (mesh.nodes(tri[0], 0) + mesh.nodes(tri[1], 0) +
                       mesh.nodes(tri[2], 0)) / 3.0;
    const double cy = (mesh.nodes(tri[0], 1) + mesh.nodes(tri[1], 1) +
                       mesh.nodes(tri[2], 1)) / 3.0;
    f[e] = example2_forcing(cx, cy);
  }
  Eigen::VectorXd z = fem->apply_S(f);
  return DualProblem(std::move(fem), std::move(z), alpha, ProxFamily::box(bound),
                     mode);
}

DualProblem build_quadratic(int n, double alpha, ControlMode mode,
                            std::shared_ptr<const DiscreteOperators> ops) {
  auto fem = ops_for(n, std::move(ops));
  const Mesh& mesh = fem->mesh();
  Eigen::VectorXd z(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    z[i] = std::sin(std::numbers::pi * mesh.nodes(i, 0)) *
           std::sin(std::numbers::pi * mesh.nodes(i, 1));
  return DualProblem(std::move(fem), std::move(z), alpha, ProxFamily::zero(),
                     mode);
}

ProblemSpec::Name problem_name_from_string(const std::string& s) {
  if (s == "example1") return ProblemSpec::Name::Example1;
  if (s == "example2") return ProblemSpec::Name::Example2;
  if (s == "quadratic") return ProblemSpec::Name::Quadratic;
  throw std::invalid_argument("unknown problem '" + s +
                              "' (expected example1, example2 or quadratic)");
}

DualProblem build_problem(const ProblemSpec& spec,
                          std::shared_ptr<const DiscreteOperators> ops) {
  switch (spec.name) {
    case ProblemSpec::Name::Example1:
      return build_example1(spec.n, spec.alpha, spec.mode,
                            spec.beta.value_or(1e-2),
                            spec.bound.value_or(1000.0), std::move(ops));
    case ProblemSpec::Name::Example2:
      return build_example2(spec.n, spec.alpha, spec.mode,
                            spec.bound.value_or(1.0), std::move(ops));
    case ProblemSpec::Name::Quadratic:
      return build_quadratic(spec.n, spec.alpha, spec.mode, std::move(ops));
  }
  throw std::logic_error("unreachable");
}

}  // namespace dualprox
