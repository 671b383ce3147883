#include "dualprox/prox.hpp"

#include <algorithm>
#include <cmath>

namespace dualprox {

ProxFamily ProxFamily::box(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("box family requires R > 0");
  return {ProxKind::Box, R, 0.0, 0.0};
}

ProxFamily ProxFamily::l1(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("l1 family requires beta >= 0");
  return {ProxKind::L1, 0.0, beta, 0.0};
}

ProxFamily ProxFamily::box_l1(double beta, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("box_l1 family requires R > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("box_l1 family requires beta >= 0");
  return {ProxKind::BoxL1, R, beta, 0.0};
}

ProxFamily ProxFamily::l2_ball(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("l2_ball family requires gamma > 0");
  return {ProxKind::L2Ball, 0.0, 0.0, gamma};
}

std::string ProxFamily::name() const {
  switch (kind) {
    case ProxKind::Zero: return "zero";
    case ProxKind::Box: return "box";
    case ProxKind::L1: return "l1";
    case ProxKind::BoxL1: return "box_l1";
    case ProxKind::L2Ball: return "l2_ball";
  }
  return "?";
}

namespace {

// Envelope coefficients on a piece with prox = a*v + b. The envelope is
// 0.5*(v - prox)^2 + w*|prox| with w the effective soft threshold and
// sgn the (constant) sign of prox on the piece.
ProxPiece make_piece(double a, double b, double w, int sgn) {
  ProxPiece p;
  p.slope = a;
  p.offset = b;
  p.sign = sgn;
  const double oma = 1.0 - a;
  p.env_c2 = 0.5 * oma * oma;
  p.env_c1 = -oma * b + w * a * sgn;
  p.env_c0 = 0.5 * b * b + w * b * sgn;
  return p;
}

}  // namespace

ScaledProx::ScaledProx(ProxFamily family, double scale)
    : family_(family), scale_(scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("ScaledProx requires scale > 0");
  if (!family.separable())
    throw std::invalid_argument("ScaledProx handles separable families only; "
                                "use the l2ball_* functions instead");
  threshold_ = family.l1_weight * scale;
  const double s = threshold_;
  const double R = family.bound;
  switch (family.kind) {
    case ProxKind::Zero:
      pieces_ = {make_piece(1.0, 0.0, 0.0, 0)};
      break;
    case ProxKind::Box:
      kinks_ = {-R, R};
      pieces_ = {make_piece(0.0, -R, 0.0, 0), make_piece(1.0, 0.0, 0.0, 0),
                 make_piece(0.0, R, 0.0, 0)};
      break;
    case ProxKind::L1:
      if (s == 0.0) {
        pieces_ = {make_piece(1.0, 0.0, 0.0, 0)};
      } else {
        kinks_ = {-s, s};
        pieces_ = {make_piece(1.0, s, s, -1), make_piece(0.0, 0.0, s, 0),
                   make_piece(1.0, -s, s, +1)};
      }
      break;
    case ProxKind::BoxL1:
      if (s == 0.0) {
        // identical to the plain box map
        kinks_ = {-R, R};
        pieces_ = {make_piece(0.0, -R, 0.0, 0), make_piece(1.0, 0.0, 0.0, 0),
                   make_piece(0.0, R, 0.0, 0)};
      } else {
        kinks_ = {-s - R, -s, s, s + R};
        pieces_ = {make_piece(0.0, -R, s, -1), make_piece(1.0, s, s, -1),
                   make_piece(0.0, 0.0, s, 0), make_piece(1.0, -s, s, +1),
                   make_piece(0.0, R, s, +1)};
      }
      break;
    case ProxKind::L2Ball:
      break;  // unreachable
  }
}

int ScaledProx::piece_index(double v) const {
  return static_cast<int>(std::upper_bound(kinks_.begin(), kinks_.end(), v) -
                          kinks_.begin());
}

double ScaledProx::prox(double v) const {
  const ProxPiece& p = pieces_[piece_index(v)];
  return p.slope * v + p.offset;
}

double ScaledProx::derivative(double v) const {
  return pieces_[piece_index(v)].slope;
}

double ScaledProx::penalty(double x) const {
  switch (family_.kind) {
    case ProxKind::L1:
    case ProxKind::BoxL1:
      return threshold_ * std::abs(x);
    default:
      return 0.0;
  }
}

double ScaledProx::envelope(double v) const {
  const double p = prox(v);
  const double d = v - p;
  return 0.5 * d * d + penalty(p);
}

Eigen::VectorXd l2ball_project(const ProxFamily& family, const Eigen::VectorXd& v,
                               double norm_v) {
  if (family.kind != ProxKind::L2Ball)
    throw std::invalid_argument("l2ball_project requires an L2Ball family");
  if (norm_v < 0.0) throw std::invalid_argument("norm_v must be nonnegative");
  if (norm_v <= family.radius) return v;
  return v * (family.radius / norm_v);
}

Eigen::VectorXd l2ball_derivative_apply(const ProxFamily& family,
                                        const Eigen::VectorXd& v, double norm_v,
                                        const Eigen::VectorXd& h, double inner_vh) {
  if (family.kind != ProxKind::L2Ball)
    throw std::invalid_argument("l2ball_derivative_apply requires an L2Ball family");
  if (norm_v <= family.radius) return h;
  const double g = family.radius;
  return (g / norm_v) * h - (g * inner_vh / (norm_v * norm_v * norm_v)) * v;
}

double l2ball_envelope(const ProxFamily& family, double norm_v) {
  if (family.kind != ProxKind::L2Ball)
    throw std::invalid_argument("l2ball_envelope requires an L2Ball family");
  const double excess = std::max(0.0, norm_v - family.radius);
  return 0.5 * excess * excess;
}

}  // namespace dualprox
