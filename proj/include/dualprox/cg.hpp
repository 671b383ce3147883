#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dualprox {

struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CgOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0: 10 * dimension
  bool track_x_dot_b = false;
  // called after each update with (k, x_k, r_k); test hook
  std::function<void(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> observer;
};

struct CgOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = true;  // false when max_iter was hit
  std::vector<double> x_dot_b;
};

// Conjugate gradients for A x = b with A self-adjoint positive definite in
// the supplied inner product. Starts from x0 = 0 and, for nonzero b, always
// performs at least one update so the returned x satisfies <x, b> > 0.
template <class Op, class Inner>
CgOutcome conjugate_gradient(Op&& apply, const Eigen::VectorXd& b, Inner&& inner,
                             const CgOptions& opts = {}) {
  CgOutcome out;
  out.x = Eigen::VectorXd::Zero(b.size());
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : 10 * static_cast<int>(b.size());

  double rr = inner(b, b);
  double rnorm = std::sqrt(std::max(0.0, rr));
  if (rnorm == 0.0) {
    out.final_residual_norm = 0.0;
    return out;
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  int k = 0;
  while ((rnorm > opts.tol || k == 0) && k < max_iter) {
    Eigen::VectorXd Ap = apply(p);
    const double pAp = inner(Ap, p);
    if (pAp <= 0.0)
      throw NotPositiveDefiniteError("cg: operator is not positive definite");
    const double alpha = rr / pAp;
    out.x += alpha * p;
    r -= alpha * Ap;
    const double rr_next = inner(r, r);
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    rnorm = std::sqrt(std::max(0.0, rr));
    ++k;
    if (opts.track_x_dot_b) out.x_dot_b.push_back(inner(out.x, b));
    if (opts.observer) opts.observer(k, out.x, r);
  }
  out.iterations = k;
  out.final_residual_norm = rnorm;
  out.converged = rnorm <= opts.tol;
  return out;
}

}  // namespace dualprox
