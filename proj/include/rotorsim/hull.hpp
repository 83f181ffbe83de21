#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace rotorsim {

/// Halfspace n.x <= b with |n| = 1.
struct Halfspace {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
};

/// Convex set in 3-D, stored both ways: hull vertices plus the facet
/// halfspaces. dimension flags degenerate sets (0 point, 1 segment,
/// 2 polygon, 3 solid). faces triangulates the boundary for dimension 3
/// and indexes into vertices.
struct ConvexPolytope {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Halfspace> facets;
  int dimension = 0;

  bool contains(const Eigen::Vector3d& point, double tol = 1e-9) const;

  /// Longest diagonal of the axis-aligned bounding box.
  double extent() const;
};

/// Convex hull of a point cloud. Degenerate inputs (collinear, coplanar,
/// single point) produce the lower-dimensional hull with sandwich facets
/// around the affine subspace. Affine rank uses singular values with a
/// 1e-9 relative threshold.
ConvexPolytope convex_hull(const std::vector<Eigen::Vector3d>& points);

}  // namespace rotorsim
