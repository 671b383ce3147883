#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "dualprox/kernels.hpp"
#include "dualprox/mesh.hpp"
#include "dualprox/prox.hpp"

namespace dualprox {

using SparseMat = Eigen::SparseMatrix<double>;

// Assembled P1/P0 operators for the Dirichlet Poisson problem on a Mesh.
// S u solves the discrete state equation for a piecewise-constant control u;
// the adjoint identity <S u, xi>_M = <u, S* xi>_A0 holds by construction.
// The stiffness factorization is computed once and reused by every solve.
class DiscreteOperators {
 public:
  explicit DiscreteOperators(Mesh mesh,
                             kernels::Exec exec = kernels::Exec::Parallel);

  const Mesh& mesh() const { return mesh_; }
  const SparseMat& stiffness() const { return stiffness_; }  // interior dofs
  const SparseMat& mass() const { return mass_; }            // all nodes
  const SparseMat& mixed_mass() const { return mixed_mass_; }
  const Eigen::VectorXd& cell_areas() const { return cell_areas_; }
  const std::vector<int>& interior_index() const { return interior_index_; }
  int num_interior() const { return num_interior_; }

  // K^{-1} applied to the interior part of rhs_full, extended by zero.
  Eigen::VectorXd solve_dirichlet(const Eigen::VectorXd& rhs_full) const;

  // state y with K y = B u
  Eigen::VectorXd apply_S(const Eigen::VectorXd& u_cells) const;
  // P0 adjoint: A0^{-1} B^T w with K w = M xi
  Eigen::VectorXd apply_Sstar(const Eigen::VectorXd& xi) const;
  // P1 adjoint representative: w with K w = M xi (no P0 projection)
  Eigen::VectorXd apply_Sstar_p1(const Eigen::VectorXd& xi) const;
  // state for the control prox(q) with P1 data q, using exact clipped
  // quadrature for the load; rejects non-separable families
  Eigen::VectorXd apply_S_prox(const ScaledProx& sp, const Eigen::VectorXd& q) const;

  double inner_y(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(mass_ * b);
  }
  double norm_y(const Eigen::VectorXd& a) const;
  double inner_u(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(cell_areas_.cwiseProduct(b));
  }
  double norm_u(const Eigen::VectorXd& a) const;

  kernels::Exec exec() const { return exec_; }

 private:
  Mesh mesh_;
  kernels::Exec exec_;
  SparseMat stiffness_;
  SparseMat mass_;
  SparseMat mixed_mass_;
  Eigen::VectorXd cell_areas_;
  std::vector<int> interior_index_;   // node -> interior dof, -1 on boundary
  std::vector<int> interior_nodes_;   // interior dof -> node
  int num_interior_ = 0;
  Eigen::SimplicialLLT<SparseMat> factorization_;
};

std::shared_ptr<const DiscreteOperators> assemble(
    const Mesh& mesh, kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace dualprox
