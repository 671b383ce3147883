#include "dualprox/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace dualprox {

Mesh build_mesh(int n) {
  if (n < 2) throw std::invalid_argument("build_mesh requires n >= 2");
  Mesh mesh;
  mesh.n = n;
  mesh.h = std::sqrt(2.0) / n;

  const int nn = n + 1;
  mesh.nodes.resize(nn * nn, 2);
  mesh.boundary.assign(nn * nn, false);
  for (int j = 0; j < nn; ++j) {
    for (int i = 0; i < nn; ++i) {
      const int id = j * nn + i;
      mesh.nodes(id, 0) = static_cast<double>(i) / n;
      mesh.nodes(id, 1) = static_cast<double>(j) / n;
      mesh.boundary[id] = (i == 0 || i == n || j == 0 || j == n);
    }
  }

  mesh.triangles.resize(2 * n * n, 3);
  int t = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * nn + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + nn;
      const int v11 = v01 + 1;
      mesh.triangles.row(t++) << v00, v10, v11;  // lower
      mesh.triangles.row(t++) << v00, v11, v01;  // upper
    }
  }
  return mesh;
}

}  // namespace dualprox
