#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualprox {

enum class ProxKind { Zero, Box, L1, BoxL1, L2Ball };

// Description of the nonsmooth term g: either a pointwise (separable)
// penalty with parameters, or the indicator of an L2 ball.
struct ProxFamily {
  ProxKind kind = ProxKind::Zero;
  double bound = 0.0;      // box half-width R (Box, BoxL1)
  double l1_weight = 0.0;  // beta (L1, BoxL1)
  double radius = 0.0;     // ball radius gamma (L2Ball)

  static ProxFamily zero() { return {ProxKind::Zero, 0.0, 0.0, 0.0}; }
  static ProxFamily box(double R);
  static ProxFamily l1(double beta);
  static ProxFamily box_l1(double beta, double R);
  static ProxFamily l2_ball(double gamma);

  bool separable() const { return kind != ProxKind::L2Ball; }
  std::string name() const;
};

// One affine piece of a piecewise-affine proximal map. On the piece the
// map is v -> slope*v + offset, and the Moreau envelope restricted to the
// piece is the quadratic env_c2*v^2 + env_c1*v + env_c0.
struct ProxPiece {
  double slope = 1.0;
  double offset = 0.0;
  int sign = 0;  // sign of prox on the piece (constant there)
  double env_c2 = 0.0;
  double env_c1 = 0.0;
  double env_c0 = 0.0;
};

// Proximal map, Moreau envelope and generalized derivative of gtilde/alpha
// for a separable family. scale = 1/alpha; the effective soft threshold is
// l1_weight*scale while box bounds are invariant under the scaling.
//
// Kink convention: piece k is active on [kink_k, kink_{k+1}), so a value
// sitting exactly on a kink uses the piece to its right.
class ScaledProx {
 public:
  ScaledProx(ProxFamily family, double scale);

  double prox(double v) const;
  double envelope(double v) const;
  double derivative(double v) const;

  // (gtilde/alpha)(x) for arguments in the reachable range of prox.
  double penalty(double x) const;

  const ProxFamily& family() const { return family_; }
  double scale() const { return scale_; }
  double threshold() const { return threshold_; }
  const std::vector<double>& kinks() const { return kinks_; }
  const std::vector<ProxPiece>& pieces() const { return pieces_; }
  int piece_index(double v) const;

 private:
  ProxFamily family_;
  double scale_ = 1.0;
  double threshold_ = 0.0;  // l1_weight * scale
  std::vector<double> kinks_;
  std::vector<ProxPiece> pieces_;
};

// Projection onto the L2 ball of radius family.radius. norm_v must be the
// norm of v in the inner product of the underlying space.
Eigen::VectorXd l2ball_project(const ProxFamily& family, const Eigen::VectorXd& v,
                               double norm_v);

// Action of the generalized derivative of the ball projection at v on h.
// inner_vh = <v,h> in the space inner product.
Eigen::VectorXd l2ball_derivative_apply(const ProxFamily& family,
                                        const Eigen::VectorXd& v, double norm_v,
                                        const Eigen::VectorXd& h, double inner_vh);

// Moreau envelope of the ball indicator: 0.5*dist(v, ball)^2.
double l2ball_envelope(const ProxFamily& family, double norm_v);

}  // namespace dualprox
