#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <vector>

#include "dualprox/mesh.hpp"
#include "dualprox/prox.hpp"

// Data-parallel kernels. Every kernel has a serial reference implementation
// and an OpenMP one; results are bitwise identical because reductions and
// scatters are buffered per item and combined in a fixed order.
namespace dualprox::kernels {

enum class Exec { Serial, Parallel };

using SparseMat = Eigen::SparseMatrix<double>;

// ---- cellwise maps (piecewise-constant control space) ----

void prox_cells(const ScaledProx& sp, const Eigen::VectorXd& q,
                Eigen::VectorXd& out, Exec exec);
void slope_cells(const ScaledProx& sp, const Eigen::VectorXd& q,
                 Eigen::VectorXd& out, Exec exec);
// sum of env(q_i) over all cells (unweighted; multiply by the cell area)
double env_sum_cells(const ScaledProx& sp, const Eigen::VectorXd& q, Exec exec);

// ---- P1/P0 assembly on the structured mesh ----

// stiffness on interior dofs (Dirichlet rows/cols eliminated), mass on all
// nodes, mixed mass B(i,T) = integral of phi_i over T.
void assemble_matrices(const Mesh& mesh, const std::vector<int>& interior_index,
                       int num_interior, SparseMat& stiffness_interior,
                       SparseMat& mass_full, SparseMat& mixed_mass, Exec exec);

// ---- kink-exact quadrature for piecewise-affine prox of a P1 function ----
//
// q is a P1 nodal vector; prox(q) is affine on the subregions obtained by
// slicing each triangle along the level lines q = kink. All integrals below
// are exact: subregions are convex polygons, integrands quadratic, and the
// edge-midpoint rule on a fan triangulation integrates quadratics exactly.

// load_i = integral of prox(q) * phi_i
void clipped_prox_load(const Mesh& mesh, const ScaledProx& sp,
                       const Eigen::VectorXd& q, Eigen::VectorXd& load, Exec exec);

// weighted mass A(i,j) = integral of dprox(q) * phi_i * phi_j (slopes are
// 0/1, so this sums plain mass over the active subregions)
SparseMat clipped_active_mass(const Mesh& mesh, const ScaledProx& sp,
                              const Eigen::VectorXd& q, Exec exec);

// integral over the domain of a per-piece quadratic in q: on piece k the
// integrand is c2[k]*q^2 + c1[k]*q + c0[k]. Covers the envelope integral,
// the inactive-set measure, and the primal control integrals.
double clipped_quadratic_integral(const Mesh& mesh, const ScaledProx& sp,
                                  const Eigen::VectorXd& q,
                                  const std::vector<double>& c2,
                                  const std::vector<double>& c1,
                                  const std::vector<double>& c0, Exec exec);

// convenience wrappers around clipped_quadratic_integral
double clipped_env_integral(const Mesh& mesh, const ScaledProx& sp,
                            const Eigen::VectorXd& q, Exec exec);
double clipped_active_measure(const Mesh& mesh, const ScaledProx& sp,
                              const Eigen::VectorXd& q, Exec exec);

}  // namespace dualprox::kernels
