#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dualprox/cg.hpp"
#include "dualprox/checks.hpp"

using namespace dualprox;

namespace {
const auto euclid = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b);
};
}

TEST_CASE("identity solves in one iteration") {
  Eigen::VectorXd b(4);
  b << 1.0, -2.0, 0.5, 3.0;
  const CgOutcome res = conjugate_gradient(
      [](const Eigen::VectorXd& v) { return v; }, b, euclid, {});
  CHECK(res.iterations == 1);
  CHECK((res.x - b).norm() == 0.0);
  CHECK(res.final_residual_norm == 0.0);
  CHECK(res.converged);
}

TEST_CASE("diagonal system exact in at most two iterations") {
  Eigen::VectorXd b(2);
  b << 1.0, 1.0;
  Eigen::VectorXd diag(2);
  diag << 1.0, 2.0;
  CgOptions opts;
  opts.tol = 1e-14;
  const CgOutcome res = conjugate_gradient(
      [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(diag.asDiagonal() * v); },
      b, euclid, opts);
  CHECK(res.iterations <= 2);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.x[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero right-hand side returns immediately") {
  const CgOutcome res = conjugate_gradient(
      [](const Eigen::VectorXd& v) { return v; }, Eigen::VectorXd::Zero(5), euclid,
      {});
  CHECK(res.iterations == 0);
  CHECK(res.x.norm() == 0.0);
}

TEST_CASE("indefinite operator raises") {
  Eigen::VectorXd b(2);
  b << 0.0, 1.0;
  Eigen::VectorXd diag(2);
  diag << 1.0, -1.0;
  CHECK_THROWS_AS(
      conjugate_gradient(
          [&](const Eigen::VectorXd& v) {
            return Eigen::VectorXd(diag.asDiagonal() * v);
          },
          b, euclid, {}),
      NotPositiveDefiniteError);
}

TEST_CASE("iteration cap flags instead of throwing") {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 30;
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
  const Eigen::MatrixXd A = R.transpose() * R + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = gauss(rng);
  CgOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2;
  const CgOutcome res = conjugate_gradient(
      [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); }, b, euclid,
      opts);
  CHECK(res.iterations == 2);
  CHECK_FALSE(res.converged);
  CHECK(res.final_residual_norm > 1e-12);
}

TEST_CASE("weighted inner product") {
  // any diagonal operator is self-adjoint in a diagonally weighted product
  Eigen::VectorXd diag(3), weights(3), b(3);
  diag << 2.0, 0.5, 4.0;
  weights << 1.0, 3.0, 0.25;
  b << 1.0, 2.0, -1.0;
  const auto inner = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return (x.array() * weights.array() * y.array()).sum();
  };
  CgOptions opts;
  opts.tol = 1e-13;
  const CgOutcome res = conjugate_gradient(
      [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(diag.asDiagonal() * v); },
      b, inner, opts);
  CHECK(res.converged);
  for (int i = 0; i < 3; ++i)
    CHECK(res.x[i] == doctest::Approx(b[i] / diag[i]).epsilon(1e-10));
}

TEST_CASE("cg property suite") {
  for (const auto& r : checks::cg_properties()) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}
