#include "dualprox/dual_objective.hpp"

#include <cmath>
#include <stdexcept>

namespace dualprox {

DualProblem::DualProblem(std::shared_ptr<const DiscreteOperators> ops_in,
                         Eigen::VectorXd target_in, double alpha_in,
                         ProxFamily family_in, ControlMode mode_in)
    : ops(std::move(ops_in)),
      target(std::move(target_in)),
      alpha(alpha_in),
      prox_family(family_in),
      mode(mode_in) {
  if (!ops) throw std::invalid_argument("DualProblem: missing operators");
  if (!(alpha > 0.0)) throw std::invalid_argument("DualProblem: alpha must be > 0");
  if (target.size() != ops->mesh().num_nodes())
    throw std::invalid_argument("DualProblem: target size does not match mesh");
  if (mode == ControlMode::Variational && !prox_family.separable())
    throw std::invalid_argument(
        "DualProblem: variational mode requires a separable prox family");
}

DualProblem DualProblem::with_alpha(double a) const {
  return DualProblem(ops, target, a, prox_family, mode);
}

namespace {

double ball_norm_q(const DiscreteOperators& fem, const Eigen::VectorXd& q_cells) {
  return fem.norm_u(q_cells);
}

}  // namespace

DualEvaluation evaluate_with_w(const DualProblem& pb, const Eigen::VectorXd& xi,
                               const Eigen::VectorXd& w) {
  const DiscreteOperators& fem = pb.fem();
  DualEvaluation ev;
  ev.w = w;

  const Eigen::VectorXd diff = xi - pb.target;
  const double fid = 0.5 * fem.inner_y(diff, diff) -
                     0.5 * fem.inner_y(pb.target, pb.target);

  Eigen::VectorXd s_prox;  // S applied to the recovered control
  double quad = 0.0, env_int = 0.0;
  if (pb.mode == ControlMode::Variational) {
    const ScaledProx sp = pb.scaled_prox();
    ev.q = w / pb.alpha;
    quad = 0.5 / pb.alpha * fem.inner_y(w, w);
    env_int = kernels::clipped_env_integral(fem.mesh(), sp, ev.q, fem.exec());
    s_prox = fem.apply_S_prox(sp, ev.q);
  } else {
    const Eigen::VectorXd p =
        (fem.mixed_mass().transpose() * w).cwiseQuotient(fem.cell_areas());
    ev.q = p / pb.alpha;
    quad = 0.5 / pb.alpha * fem.inner_u(p, p);
    Eigen::VectorXd u;
    if (pb.prox_family.kind == ProxKind::L2Ball) {
      const double nq = ball_norm_q(fem, ev.q);
      env_int = l2ball_envelope(pb.prox_family, nq);
      u = l2ball_project(pb.prox_family, ev.q, nq);
    } else {
      const ScaledProx sp = pb.scaled_prox();
      env_int = fem.mesh().cell_area() *
                kernels::env_sum_cells(sp, ev.q, fem.exec());
      kernels::prox_cells(sp, ev.q, u, fem.exec());
    }
    s_prox = fem.apply_S(u);
  }

  ev.phi = fid + quad - pb.alpha * env_int;
  ev.grad = diff + s_prox;
  ev.grad_norm = fem.norm_y(ev.grad);
  return ev;
}

DualEvaluation evaluate(const DualProblem& pb, const Eigen::VectorXd& xi) {
  return evaluate_with_w(pb, xi, pb.fem().apply_Sstar_p1(xi));
}

double phi(const DualProblem& pb, const Eigen::VectorXd& xi) {
  const DiscreteOperators& fem = pb.fem();
  const Eigen::VectorXd w = fem.apply_Sstar_p1(xi);
  const Eigen::VectorXd diff = xi - pb.target;
  const double fid = 0.5 * fem.inner_y(diff, diff) -
                     0.5 * fem.inner_y(pb.target, pb.target);
  if (pb.mode == ControlMode::Variational) {
    const ScaledProx sp = pb.scaled_prox();
    const Eigen::VectorXd q = w / pb.alpha;
    return fid + 0.5 / pb.alpha * fem.inner_y(w, w) -
           pb.alpha * kernels::clipped_env_integral(fem.mesh(), sp, q, fem.exec());
  }
  const Eigen::VectorXd p =
      (fem.mixed_mass().transpose() * w).cwiseQuotient(fem.cell_areas());
  const Eigen::VectorXd q = p / pb.alpha;
  double env_int = 0.0;
  if (pb.prox_family.kind == ProxKind::L2Ball) {
    env_int = l2ball_envelope(pb.prox_family, ball_norm_q(fem, q));
  } else {
    env_int = fem.mesh().cell_area() *
              kernels::env_sum_cells(pb.scaled_prox(), q, fem.exec());
  }
  return fid + 0.5 / pb.alpha * fem.inner_u(p, p) - pb.alpha * env_int;
}

Eigen::VectorXd grad_phi(const DualProblem& pb, const Eigen::VectorXd& xi) {
  return evaluate(pb, xi).grad;
}

NewtonOperator newton_operator_from(const DualProblem& pb,
                                    const DualEvaluation& ev) {
  const DiscreteOperators& fem = pb.fem();
  NewtonOperator op;
  op.ops_ = pb.ops;
  op.alpha_ = pb.alpha;
  if (pb.mode == ControlMode::Variational) {
    op.weight_ = kernels::clipped_active_mass(fem.mesh(), pb.scaled_prox(), ev.q,
                                              fem.exec());
    return op;
  }
  if (pb.prox_family.kind == ProxKind::L2Ball) {
    op.ball_ = true;
    op.q_cells_ = ev.q;
    op.q_norm_ = ball_norm_q(fem, ev.q);
    op.radius_ = pb.prox_family.radius;
    return op;
  }
  // P0: weight = B diag(dprox / area) B^T; the local block on cell T is the
  // constant dprox(q_T) * area_T / 9.
  Eigen::VectorXd slopes;
  kernels::slope_cells(pb.scaled_prox(), ev.q, slopes, fem.exec());
  const Mesh& mesh = fem.mesh();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 9);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    if (slopes[e] == 0.0) continue;
    const double val = slopes[e] * mesh.cell_area() / 9.0;
    const auto tri = mesh.triangles.row(e);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri[i], tri[j], val);
  }
  op.weight_.resize(mesh.num_nodes(), mesh.num_nodes());
  op.weight_.setFromTriplets(trips.begin(), trips.end());
  return op;
}

NewtonOperator newton_operator_at(const DualProblem& pb,
                                  const Eigen::VectorXd& xi) {
  return newton_operator_from(pb, evaluate(pb, xi));
}

Eigen::VectorXd NewtonOperator::apply(const Eigen::VectorXd& v) const {
  const DiscreteOperators& fem = *ops_;
  const Eigen::VectorXd w_v = fem.apply_Sstar_p1(v);
  if (ball_) {
    Eigen::VectorXd p_v =
        (fem.mixed_mass().transpose() * w_v).cwiseQuotient(fem.cell_areas());
    Eigen::VectorXd dp;
    if (q_norm_ <= radius_) {
      dp = p_v;
    } else {
      const double inner_qp = fem.inner_u(q_cells_, p_v);
      dp = l2ball_derivative_apply(ProxFamily::l2_ball(radius_), q_cells_,
                                   q_norm_, p_v, inner_qp);
    }
    return v + fem.apply_S(dp) / alpha_;
  }
  return v + fem.solve_dirichlet(weight_ * w_v) / alpha_;
}

PrimalControl recover_primal(const DualProblem& pb, const Eigen::VectorXd& xi) {
  const DiscreteOperators& fem = pb.fem();
  PrimalControl u;
  u.mode = pb.mode;
  const Eigen::VectorXd w = fem.apply_Sstar_p1(xi);
  if (pb.mode == ControlMode::Variational) {
    u.values = w / pb.alpha;
    return u;
  }
  const Eigen::VectorXd q =
      (fem.mixed_mass().transpose() * w).cwiseQuotient(fem.cell_areas()) /
      pb.alpha;
  if (pb.prox_family.kind == ProxKind::L2Ball) {
    u.ball = true;
    u.values = l2ball_project(pb.prox_family, q, ball_norm_q(fem, q));
  } else {
    kernels::prox_cells(pb.scaled_prox(), q, u.values, fem.exec());
  }
  return u;
}

double primal_value(const DualProblem& pb, const PrimalControl& u) {
  const DiscreteOperators& fem = pb.fem();
  const double beta = pb.prox_family.l1_weight;
  if (u.mode == ControlMode::Variational) {
    const ScaledProx sp = pb.scaled_prox();
    const Eigen::VectorXd y = fem.apply_S_prox(sp, u.values);
    const Eigen::VectorXd diff = y - pb.target;
    const auto& pieces = sp.pieces();
    std::vector<double> c2, c1, c0;
    for (const ProxPiece& p : pieces) {  // prox^2 on each piece
      c2.push_back(p.slope * p.slope);
      c1.push_back(2.0 * p.slope * p.offset);
      c0.push_back(p.offset * p.offset);
    }
    const double u_sq = kernels::clipped_quadratic_integral(
        fem.mesh(), sp, u.values, c2, c1, c0, fem.exec());
    double g_int = 0.0;
    if (beta > 0.0) {
      c2.assign(pieces.size(), 0.0);
      c1.clear();
      c0.clear();
      for (const ProxPiece& p : pieces) {  // |prox| = sign * prox per piece
        c1.push_back(p.sign * p.slope);
        c0.push_back(p.sign * p.offset);
      }
      g_int = beta * kernels::clipped_quadratic_integral(
                         fem.mesh(), sp, u.values, c2, c1, c0, fem.exec());
    }
    return 0.5 * fem.inner_y(diff, diff) + 0.5 * pb.alpha * u_sq + g_int;
  }

  const Eigen::VectorXd y = fem.apply_S(u.values);
  const Eigen::VectorXd diff = y - pb.target;
  double g_int = 0.0;
  if (!u.ball && beta > 0.0)
    g_int = beta * fem.mesh().cell_area() * u.values.cwiseAbs().sum();
  return 0.5 * fem.inner_y(diff, diff) +
         0.5 * pb.alpha * fem.inner_u(u.values, u.values) + g_int;
}

double duality_gap(const DualProblem& pb, const Eigen::VectorXd& xi) {
  return primal_value(pb, recover_primal(pb, xi)) + phi(pb, xi);
}

double inactive_measure(const DualProblem& pb, const Eigen::VectorXd& xi) {
  const DiscreteOperators& fem = pb.fem();
  const Eigen::VectorXd w = fem.apply_Sstar_p1(xi);
  if (pb.mode == ControlMode::Variational) {
    return kernels::clipped_active_measure(fem.mesh(), pb.scaled_prox(),
                                           w / pb.alpha, fem.exec());
  }
  const Eigen::VectorXd q =
      (fem.mixed_mass().transpose() * w).cwiseQuotient(fem.cell_areas()) /
      pb.alpha;
  if (pb.prox_family.kind == ProxKind::L2Ball) {
    const double nq = ball_norm_q(fem, q);
    return nq <= pb.prox_family.radius ? 1.0 : pb.prox_family.radius / nq;
  }
  Eigen::VectorXd slopes;
  kernels::slope_cells(pb.scaled_prox(), q, slopes, fem.exec());
  return fem.mesh().cell_area() * slopes.sum();
}

std::vector<TaylorRow> semismooth_taylor_check(const DualProblem& pb,
                                               const Eigen::VectorXd& xi,
                                               const Eigen::VectorXd& h,
                                               const std::vector<double>& ts) {
  const DiscreteOperators& fem = pb.fem();
  const DualEvaluation base = evaluate(pb, xi);
  // Phi(xi + t h) - Phi(xi) through the line expansion: the smooth parts are
  // exact quadratics in t, so the difference is not a subtraction of two
  // O(|Phi|) values and the remainder survives division by t^2.
  const LineEvaluator line(pb, xi, base, h);
  const double gh = fem.inner_y(base.grad, h);
  std::vector<TaylorRow> rows;
  rows.reserve(ts.size());
  for (double t : ts) {
    const DualEvaluation ev_t = evaluate(pb, xi + t * h);
    const NewtonOperator op_t = newton_operator_from(pb, ev_t);
    const Eigen::VectorXd Mh = op_t.apply(h);  // operator is linear in h
    TaylorRow row;
    row.t = t;
    row.r2 = std::abs(line.phi_delta(t) - t * gh -
                      0.5 * t * t * fem.inner_y(Mh, h)) /
             (t * t);
    row.r1 = fem.norm_y(ev_t.grad - base.grad - t * Mh) / t;
    rows.push_back(row);
  }
  return rows;
}

LineEvaluator::LineEvaluator(const DualProblem& pb, const Eigen::VectorXd& xi,
                             const DualEvaluation& ev, const Eigen::VectorXd& d)
    : pb_(pb) {
  const DiscreteOperators& fem = pb.fem();
  w_xi_ = ev.w;
  w_d_ = fem.apply_Sstar_p1(d);

  const Eigen::VectorXd diff = xi - pb.target;
  fid_a_ = fem.inner_y(diff, diff);
  fid_b_ = fem.inner_y(diff, d);
  fid_c_ = fem.inner_y(d, d);
  const_term_ = -0.5 * fem.inner_y(pb.target, pb.target);

  if (pb.mode == ControlMode::Variational) {
    quad_a_ = fem.inner_y(w_xi_, w_xi_);
    quad_b_ = fem.inner_y(w_xi_, w_d_);
    quad_c_ = fem.inner_y(w_d_, w_d_);
  } else {
    p_xi_ = (fem.mixed_mass().transpose() * w_xi_).cwiseQuotient(fem.cell_areas());
    p_d_ = (fem.mixed_mass().transpose() * w_d_).cwiseQuotient(fem.cell_areas());
    quad_a_ = fem.inner_u(p_xi_, p_xi_);
    quad_b_ = fem.inner_u(p_xi_, p_d_);
    quad_c_ = fem.inner_u(p_d_, p_d_);
  }
  env_0_ = env_at(0.0);
}

double LineEvaluator::env_at(double t) const {
  const DiscreteOperators& fem = pb_.fem();
  if (pb_.mode == ControlMode::Variational) {
    const Eigen::VectorXd q = (w_xi_ + t * w_d_) / pb_.alpha;
    return kernels::clipped_env_integral(fem.mesh(), pb_.scaled_prox(), q,
                                         fem.exec());
  }
  if (pb_.prox_family.kind == ProxKind::L2Ball) {
    const double nq_sq =
        (quad_a_ + 2.0 * t * quad_b_ + t * t * quad_c_) / (pb_.alpha * pb_.alpha);
    return l2ball_envelope(pb_.prox_family, std::sqrt(std::max(0.0, nq_sq)));
  }
  const Eigen::VectorXd q = (p_xi_ + t * p_d_) / pb_.alpha;
  return fem.mesh().cell_area() *
         kernels::env_sum_cells(pb_.scaled_prox(), q, fem.exec());
}

double LineEvaluator::phi_at(double t) const {
  const double fid = 0.5 * (fid_a_ + 2.0 * t * fid_b_ + t * t * fid_c_) + const_term_;
  const double quad =
      0.5 / pb_.alpha * (quad_a_ + 2.0 * t * quad_b_ + t * t * quad_c_);
  return fid + quad - pb_.alpha * env_at(t);
}

double LineEvaluator::phi_delta(double t) const {
  const double fid = t * fid_b_ + 0.5 * t * t * fid_c_;
  const double quad = (t * quad_b_ + 0.5 * t * t * quad_c_) / pb_.alpha;
  return fid + quad - pb_.alpha * (env_at(t) - env_0_);
}

double estimate_ss_star_norm(const DiscreteOperators& ops, int iterations) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ops.mesh().num_nodes());
  // deterministic seed vector supported on the interior
  for (int i = 0; i < ops.mesh().num_nodes(); ++i)
    if (ops.interior_index()[i] >= 0) v[i] = 1.0 + 0.001 * (i % 7);
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const double nv = ops.norm_y(v);
    if (nv == 0.0) break;
    v /= nv;
    const Eigen::VectorXd sv =
        ops.apply_S((ops.mixed_mass().transpose() * ops.apply_Sstar_p1(v))
                        .cwiseQuotient(ops.cell_areas()));
    lambda = ops.inner_y(sv, v);
    v = sv;
  }
  return lambda;
}

}  // namespace dualprox
