#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "dualprox/fem.hpp"
#include "dualprox/prox.hpp"

namespace dualprox {

enum class ControlMode { P0, Variational };

// Dual formulation of  min 0.5|Su - z|^2 + (alpha/2)|u|^2 + g(u):
// minimize  Phi(xi) = 0.5|xi - z|^2 - 0.5|z|^2 + (1/2a)|S*xi|^2
//                     - a * env_{g/a}(S*xi / a)
// over P1 functions xi, all norms in the L2 (mass-matrix) inner product.
struct DualProblem {
  std::shared_ptr<const DiscreteOperators> ops;
  Eigen::VectorXd target;  // z, nodal P1 values
  double alpha = 1.0;
  ProxFamily prox_family;
  ControlMode mode = ControlMode::P0;

  DualProblem(std::shared_ptr<const DiscreteOperators> ops_in,
              Eigen::VectorXd target_in, double alpha_in, ProxFamily family_in,
              ControlMode mode_in = ControlMode::P0);

  ScaledProx scaled_prox() const { return ScaledProx(prox_family, 1.0 / alpha); }
  DualProblem with_alpha(double a) const;
  const DiscreteOperators& fem() const { return *ops; }
};

// Value, gradient and the intermediate quantities shared between them.
struct DualEvaluation {
  double phi = 0.0;
  Eigen::VectorXd grad;
  double grad_norm = 0.0;
  Eigen::VectorXd w;  // S* xi as a P1 function (stiffness solve of M xi)
  Eigen::VectorXd q;  // S* xi / alpha: per cell in P0 mode, nodal otherwise
};

double phi(const DualProblem& pb, const Eigen::VectorXd& xi);
Eigen::VectorXd grad_phi(const DualProblem& pb, const Eigen::VectorXd& xi);
DualEvaluation evaluate(const DualProblem& pb, const Eigen::VectorXd& xi);
// variant that reuses an already computed w = S* xi
DualEvaluation evaluate_with_w(const DualProblem& pb, const Eigen::VectorXd& xi,
                               const Eigen::VectorXd& w);

// Generalized second derivative I + (1/a) S dprox(S*xi/a) S* frozen at a
// point. Self-adjoint and >= I in the Y-inner product.
class NewtonOperator {
 public:
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // weighted control-space mass matrix behind the operator (separable modes)
  const SparseMat& weight() const { return weight_; }

 private:
  friend NewtonOperator newton_operator_at(const DualProblem&,
                                           const Eigen::VectorXd&);
  friend NewtonOperator newton_operator_from(const DualProblem&,
                                             const DualEvaluation&);
  std::shared_ptr<const DiscreteOperators> ops_;
  double alpha_ = 1.0;
  bool ball_ = false;
  SparseMat weight_;        // separable: B diag(dprox/area) B^T or clipped mass
  Eigen::VectorXd q_cells_; // ball snapshot
  double q_norm_ = 0.0;
  double radius_ = 0.0;
};

NewtonOperator newton_operator_at(const DualProblem& pb, const Eigen::VectorXd& xi);
NewtonOperator newton_operator_from(const DualProblem& pb, const DualEvaluation& ev);

// Recovered primal control prox_{g/a}(S*xi/a). In P0 mode values are per
// cell; in variational mode the control is prox composed with the P1
// function q, and values stores q's nodal coefficients.
struct PrimalControl {
  ControlMode mode = ControlMode::P0;
  bool ball = false;
  Eigen::VectorXd values;
};

PrimalControl recover_primal(const DualProblem& pb, const Eigen::VectorXd& xi);
double primal_value(const DualProblem& pb, const PrimalControl& u);
// J(S u, u) + Phi(xi) with u = recover_primal(xi); zero at the solution
double duality_gap(const DualProblem& pb, const Eigen::VectorXd& xi);
// integral of dprox(S*xi/a), the measure of the inactive set
double inactive_measure(const DualProblem& pb, const Eigen::VectorXd& xi);

// Remainder ratios of the generalized second-order Taylor expansion at xi in
// direction h: r2 = |Phi(xi+th) - Phi(xi) - <g, th> - 0.5 <M_t th, th>| / t^2
// and r1 = |grad(xi+th) - grad(xi) - M_t th| / t with M_t frozen at xi + th.
struct TaylorRow {
  double t = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

std::vector<TaylorRow> semismooth_taylor_check(const DualProblem& pb,
                                               const Eigen::VectorXd& xi,
                                               const Eigen::VectorXd& h,
                                               const std::vector<double>& ts);

// Cheap evaluation of t -> Phi(xi + t d) along a fixed direction; performs
// one stiffness solve up front and none per point.
class LineEvaluator {
 public:
  LineEvaluator(const DualProblem& pb, const Eigen::VectorXd& xi,
                const DualEvaluation& ev, const Eigen::VectorXd& d);
  double phi_at(double t) const;
  // Phi(xi + t d) - Phi(xi) without differencing two O(|Phi|) values; the
  // smooth parts enter through their exact expansion coefficients
  double phi_delta(double t) const;
  Eigen::VectorXd w_at(double t) const { return w_xi_ + t * w_d_; }

 private:
  double env_at(double t) const;

  const DualProblem& pb_;
  Eigen::VectorXd w_xi_, w_d_;
  Eigen::VectorXd p_xi_, p_d_;  // P0 modes: cell values of S*xi, S*d
  // quadratic coefficients in t of the smooth parts
  double fid_a_ = 0.0, fid_b_ = 0.0, fid_c_ = 0.0;
  double quad_a_ = 0.0, quad_b_ = 0.0, quad_c_ = 0.0;
  double const_term_ = 0.0;
  double env_0_ = 0.0;
};

// power-iteration estimate of |S S*| in the Y-inner product (test support)
double estimate_ss_star_norm(const DiscreteOperators& ops, int iterations = 60);

}  // namespace dualprox
