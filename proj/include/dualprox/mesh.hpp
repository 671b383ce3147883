#pragma once

#include <Eigen/Core>
#include <vector>

namespace dualprox {

// Uniform right-triangle mesh of the unit square: n x n squares, each split
// along the diagonal from (i,j) to (i+1,j+1), giving 2*n^2 triangles of
// area 1/(2 n^2). Node (i,j) has index j*(n+1)+i.
struct Mesh {
  int n = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;    // (n+1)^2 x 2
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;   // 2 n^2 x 3, CCW
  std::vector<bool> boundary;                        // per node
  double h = 0.0;                                    // longest edge, sqrt(2)/n

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_cells() const { return static_cast<int>(triangles.rows()); }
  double cell_area() const { return 1.0 / (2.0 * n * n); }
};

Mesh build_mesh(int n);

}  // namespace dualprox
