#include "dualprox/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace dualprox {

DiscreteOperators::DiscreteOperators(Mesh mesh, kernels::Exec exec)
    : mesh_(std::move(mesh)), exec_(exec) {
  const int nn = mesh_.num_nodes();
  interior_index_.assign(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (!mesh_.boundary[i]) {
      interior_index_[i] = num_interior_;
      interior_nodes_.push_back(i);
      ++num_interior_;
    }
  }

  kernels::assemble_matrices(mesh_, interior_index_, num_interior_, stiffness_,
                             mass_, mixed_mass_, exec_);

  cell_areas_ = Eigen::VectorXd::Constant(mesh_.num_cells(), mesh_.cell_area());

  factorization_.compute(stiffness_);
  if (factorization_.info() != Eigen::Success)
    throw std::runtime_error("stiffness factorization failed");
}

Eigen::VectorXd DiscreteOperators::solve_dirichlet(
    const Eigen::VectorXd& rhs_full) const {
  Eigen::VectorXd rhs_int(num_interior_);
  for (int k = 0; k < num_interior_; ++k) rhs_int[k] = rhs_full[interior_nodes_[k]];
  Eigen::VectorXd sol_int = factorization_.solve(rhs_int);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_nodes());
  for (int k = 0; k < num_interior_; ++k) out[interior_nodes_[k]] = sol_int[k];
  return out;
}

Eigen::VectorXd DiscreteOperators::apply_S(const Eigen::VectorXd& u_cells) const {
  if (u_cells.size() != mesh_.num_cells())
    throw std::invalid_argument("apply_S: control size does not match the mesh");
  return solve_dirichlet(mixed_mass_ * u_cells);
}

Eigen::VectorXd DiscreteOperators::apply_Sstar(const Eigen::VectorXd& xi) const {
  Eigen::VectorXd w = apply_Sstar_p1(xi);
  return (mixed_mass_.transpose() * w).cwiseQuotient(cell_areas_);
}

Eigen::VectorXd DiscreteOperators::apply_Sstar_p1(const Eigen::VectorXd& xi) const {
  if (xi.size() != mesh_.num_nodes())
    throw std::invalid_argument("apply_Sstar: vector size does not match the mesh");
  return solve_dirichlet(mass_ * xi);
}

Eigen::VectorXd DiscreteOperators::apply_S_prox(const ScaledProx& sp,
                                                const Eigen::VectorXd& q) const {
  Eigen::VectorXd load;
  kernels::clipped_prox_load(mesh_, sp, q, load, exec_);
  return solve_dirichlet(load);
}

double DiscreteOperators::norm_y(const Eigen::VectorXd& a) const {
  return std::sqrt(std::max(0.0, inner_y(a, a)));
}

double DiscreteOperators::norm_u(const Eigen::VectorXd& a) const {
  return std::sqrt(std::max(0.0, inner_u(a, a)));
}

std::shared_ptr<const DiscreteOperators> assemble(const Mesh& mesh,
                                                  kernels::Exec exec) {
  return std::make_shared<DiscreteOperators>(mesh, exec);
}

}  // namespace dualprox
