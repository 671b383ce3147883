#include "dualprox/kernels.hpp"

#include <array>
#include <cmath>

namespace dualprox::kernels {

namespace {

template <class F>
void for_each_index(int n, Exec exec, F&& f) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) f(i);
  } else {
    for (int i = 0; i < n; ++i) f(i);
  }
}

// Compensated fixed-order sum; the envelope terms can be ~1e10 larger than
// the Armijo decreases they decide, so plain accumulation is too coarse.
double kahan_sum(const Eigen::VectorXd& v) {
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double y = v[i] - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

void prox_cells(const ScaledProx& sp, const Eigen::VectorXd& q,
                Eigen::VectorXd& out, Exec exec) {
  out.resize(q.size());
  for_each_index(static_cast<int>(q.size()), exec,
                 [&](int i) { out[i] = sp.prox(q[i]); });
}

void slope_cells(const ScaledProx& sp, const Eigen::VectorXd& q,
                 Eigen::VectorXd& out, Exec exec) {
  out.resize(q.size());
  for_each_index(static_cast<int>(q.size()), exec,
                 [&](int i) { out[i] = sp.derivative(q[i]); });
}

double env_sum_cells(const ScaledProx& sp, const Eigen::VectorXd& q, Exec exec) {
  Eigen::VectorXd vals(q.size());
  for_each_index(static_cast<int>(q.size()), exec,
                 [&](int i) { vals[i] = sp.envelope(q[i]); });
  // fixed-order reduction keeps results independent of the thread count
  return kahan_sum(vals);
}

// ---------------------------------------------------------------------------
// assembly

namespace {

struct LocalGeometry {
  double area;
  double stiffness[3][3];
};

LocalGeometry local_geometry(const Mesh& mesh, int e) {
  const auto tri = mesh.triangles.row(e);
  double x[3], y[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = mesh.nodes(tri[i], 0);
    y[i] = mesh.nodes(tri[i], 1);
  }
  LocalGeometry g;
  g.area = 0.5 * ((x[1] - x[0]) * (y[2] - y[0]) - (y[1] - y[0]) * (x[2] - x[0]));
  // gradients of the barycentric basis: grad l_i = (b_i, c_i) / (2 area)
  double b[3], c[3];
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    b[i] = y[j] - y[k];
    c[i] = x[k] - x[j];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      g.stiffness[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * g.area);
  return g;
}

}  // namespace

void assemble_matrices(const Mesh& mesh, const std::vector<int>& interior_index,
                       int num_interior, SparseMat& stiffness_interior,
                       SparseMat& mass_full, SparseMat& mixed_mass, Exec exec) {
  const int nc = mesh.num_cells();
  const int nn = mesh.num_nodes();

  std::vector<LocalGeometry> local(nc);
  for_each_index(nc, exec, [&](int e) { local[e] = local_geometry(mesh, e); });

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(nc) * 9);

  for (int e = 0; e < nc; ++e) {
    const auto tri = mesh.triangles.row(e);
    for (int i = 0; i < 3; ++i) {
      const int gi = interior_index[tri[i]];
      if (gi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int gj = interior_index[tri[j]];
        if (gj < 0) continue;
        trips.emplace_back(gi, gj, local[e].stiffness[i][j]);
      }
    }
  }
  stiffness_interior.resize(num_interior, num_interior);
  stiffness_interior.setFromTriplets(trips.begin(), trips.end());

  trips.clear();
  for (int e = 0; e < nc; ++e) {
    const auto tri = mesh.triangles.row(e);
    const double a12 = local[e].area / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tri[i], tri[j], a12 * (i == j ? 2.0 : 1.0));
  }
  mass_full.resize(nn, nn);
  mass_full.setFromTriplets(trips.begin(), trips.end());

  trips.clear();
  for (int e = 0; e < nc; ++e) {
    const auto tri = mesh.triangles.row(e);
    const double a3 = local[e].area / 3.0;
    for (int i = 0; i < 3; ++i) trips.emplace_back(tri[i], e, a3);
  }
  mixed_mass.resize(nn, nc);
  mixed_mass.setFromTriplets(trips.begin(), trips.end());
}

// ---------------------------------------------------------------------------
// kink-exact clipped quadrature

namespace {

// Vertex of a clipped subpolygon. Carries the position, the value of the
// P1 function q and the barycentric coordinates w.r.t. the parent triangle;
// all of them interpolate linearly along edges.
struct ClipPoint {
  double x, y, q, b0, b1, b2;
};

struct ClipPoly {
  std::array<ClipPoint, 12> pt;
  int size = 0;
};

ClipPoint lerp(const ClipPoint& a, const ClipPoint& b, double t) {
  ClipPoint r;
  r.x = a.x + t * (b.x - a.x);
  r.y = a.y + t * (b.y - a.y);
  r.q = a.q + t * (b.q - a.q);
  r.b0 = a.b0 + t * (b.b0 - a.b0);
  r.b1 = a.b1 + t * (b.b1 - a.b1);
  r.b2 = a.b2 + t * (b.b2 - a.b2);
  return r;
}

// Sutherland-Hodgman against {q <= level} (keep_below) or {q >= level}.
// Convex CCW input stays convex CCW.
void clip(const ClipPoly& in, double level, bool keep_below, ClipPoly& out) {
  out.size = 0;
  for (int i = 0; i < in.size; ++i) {
    const ClipPoint& a = in.pt[i];
    const ClipPoint& b = in.pt[(i + 1) % in.size];
    const double sa = keep_below ? level - a.q : a.q - level;
    const double sb = keep_below ? level - b.q : b.q - level;
    const bool ina = sa >= 0.0;
    const bool inb = sb >= 0.0;
    if (ina) out.pt[out.size++] = a;
    if (ina != inb) out.pt[out.size++] = lerp(a, b, sa / (sa - sb));
  }
}

ClipPoint edge_midpoint(const ClipPoint& a, const ClipPoint& b) {
  ClipPoint m;
  m.x = 0.5 * (a.x + b.x);
  m.y = 0.5 * (a.y + b.y);
  m.q = 0.5 * (a.q + b.q);
  m.b0 = 0.5 * (a.b0 + b.b0);
  m.b1 = 0.5 * (a.b1 + b.b1);
  m.b2 = 0.5 * (a.b2 + b.b2);
  return m;
}

double tri_area(const ClipPoint& a, const ClipPoint& b, const ClipPoint& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

// Fan-triangulates the polygon and calls visit(weight, midpoint) with
// weight = subtriangle_area / 3 at the three edge midpoints of each
// subtriangle; exact for integrands quadratic in (x, y).
template <class Visit>
void integrate_poly(const ClipPoly& poly, Visit&& visit) {
  for (int m = 1; m + 1 < poly.size; ++m) {
    const ClipPoint& a = poly.pt[0];
    const ClipPoint& b = poly.pt[m];
    const ClipPoint& c = poly.pt[m + 1];
    const double w = tri_area(a, b, c) / 3.0;
    if (w == 0.0) continue;
    visit(w, edge_midpoint(a, b));
    visit(w, edge_midpoint(b, c));
    visit(w, edge_midpoint(c, a));
  }
}

// Calls fn(piece, region) for every prox piece with a nonempty region
// inside triangle e, slicing along the level lines q = kink.
template <class Fn>
void for_each_piece_region(const Mesh& mesh, const ScaledProx& sp,
                           const Eigen::VectorXd& q, int e, Fn&& fn) {
  const auto tri = mesh.triangles.row(e);
  ClipPoly base;
  base.size = 3;
  for (int i = 0; i < 3; ++i) {
    base.pt[i].x = mesh.nodes(tri[i], 0);
    base.pt[i].y = mesh.nodes(tri[i], 1);
    base.pt[i].q = q[tri[i]];
    base.pt[i].b0 = (i == 0) ? 1.0 : 0.0;
    base.pt[i].b1 = (i == 1) ? 1.0 : 0.0;
    base.pt[i].b2 = (i == 2) ? 1.0 : 0.0;
  }
  const double qmin = std::min({base.pt[0].q, base.pt[1].q, base.pt[2].q});
  const double qmax = std::max({base.pt[0].q, base.pt[1].q, base.pt[2].q});
  const int k0 = sp.piece_index(qmin);
  const int k1 = sp.piece_index(qmax);
  if (k0 == k1) {
    fn(k0, base);
    return;
  }
  const auto& kinks = sp.kinks();
  ClipPoly remaining = base, region, next;
  for (int k = k0; k < k1; ++k) {
    clip(remaining, kinks[k], /*keep_below=*/true, region);
    if (region.size >= 3) fn(k, region);
    clip(remaining, kinks[k], /*keep_below=*/false, next);
    remaining = next;
    if (remaining.size < 3) return;
  }
  fn(k1, remaining);
}

}  // namespace

void clipped_prox_load(const Mesh& mesh, const ScaledProx& sp,
                       const Eigen::VectorXd& q, Eigen::VectorXd& load,
                       Exec exec) {
  const int nc = mesh.num_cells();
  Eigen::VectorXd contrib(3 * nc);
  const auto& pieces = sp.pieces();
  for_each_index(nc, exec, [&](int e) {
    double acc[3] = {0.0, 0.0, 0.0};
    for_each_piece_region(mesh, sp, q, e, [&](int k, const ClipPoly& poly) {
      const double a = pieces[k].slope;
      const double b = pieces[k].offset;
      if (a == 0.0 && b == 0.0) return;
      integrate_poly(poly, [&](double w, const ClipPoint& m) {
        const double val = w * (a * m.q + b);
        acc[0] += val * m.b0;
        acc[1] += val * m.b1;
        acc[2] += val * m.b2;
      });
    });
    contrib[3 * e] = acc[0];
    contrib[3 * e + 1] = acc[1];
    contrib[3 * e + 2] = acc[2];
  });
  load.setZero(mesh.num_nodes());
  for (int e = 0; e < nc; ++e) {
    const auto tri = mesh.triangles.row(e);
    for (int i = 0; i < 3; ++i) load[tri[i]] += contrib[3 * e + i];
  }
}

SparseMat clipped_active_mass(const Mesh& mesh, const ScaledProx& sp,
                              const Eigen::VectorXd& q, Exec exec) {
  const int nc = mesh.num_cells();
  Eigen::VectorXd contrib(9 * nc);
  const auto& pieces = sp.pieces();
  for_each_index(nc, exec, [&](int e) {
    double acc[3][3] = {};
    for_each_piece_region(mesh, sp, q, e, [&](int k, const ClipPoly& poly) {
      const double a = pieces[k].slope;
      if (a == 0.0) return;
      integrate_poly(poly, [&](double w, const ClipPoint& m) {
        const double bb[3] = {m.b0, m.b1, m.b2};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) acc[i][j] += a * w * bb[i] * bb[j];
      });
    });
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) contrib[9 * e + 3 * i + j] = acc[i][j];
  });

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(nc) * 9);
  for (int e = 0; e < nc; ++e) {
    const auto tri = mesh.triangles.row(e);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double v = contrib[9 * e + 3 * i + j];
        if (v != 0.0) trips.emplace_back(tri[i], tri[j], v);
      }
  }
  SparseMat out(mesh.num_nodes(), mesh.num_nodes());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double clipped_quadratic_integral(const Mesh& mesh, const ScaledProx& sp,
                                  const Eigen::VectorXd& q,
                                  const std::vector<double>& c2,
                                  const std::vector<double>& c1,
                                  const std::vector<double>& c0, Exec exec) {
  const int nc = mesh.num_cells();
  Eigen::VectorXd vals(nc);
  for_each_index(nc, exec, [&](int e) {
    double acc = 0.0;
    for_each_piece_region(mesh, sp, q, e, [&](int k, const ClipPoly& poly) {
      const double a2 = c2[k], a1 = c1[k], a0 = c0[k];
      if (a2 == 0.0 && a1 == 0.0 && a0 == 0.0) return;
      integrate_poly(poly, [&](double w, const ClipPoint& m) {
        acc += w * ((a2 * m.q + a1) * m.q + a0);
      });
    });
    vals[e] = acc;
  });
  return kahan_sum(vals);
}

double clipped_env_integral(const Mesh& mesh, const ScaledProx& sp,
                            const Eigen::VectorXd& q, Exec exec) {
  const auto& pieces = sp.pieces();
  std::vector<double> c2, c1, c0;
  for (const ProxPiece& p : pieces) {
    c2.push_back(p.env_c2);
    c1.push_back(p.env_c1);
    c0.push_back(p.env_c0);
  }
  return clipped_quadratic_integral(mesh, sp, q, c2, c1, c0, exec);
}

double clipped_active_measure(const Mesh& mesh, const ScaledProx& sp,
                              const Eigen::VectorXd& q, Exec exec) {
  const auto& pieces = sp.pieces();
  std::vector<double> c2(pieces.size(), 0.0), c1(pieces.size(), 0.0), c0;
  for (const ProxPiece& p : pieces) c0.push_back(p.slope);
  return clipped_quadratic_integral(mesh, sp, q, c2, c1, c0, exec);
}

}  // namespace dualprox::kernels
