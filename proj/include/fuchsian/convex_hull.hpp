#pragma once

#include <array>
#include <vector>

#include "fuchsian/hyperbolic.hpp"

namespace fuchsian {

/// A face of a convex hull after merging coplanar triangles.  Vertices are
/// indices into the input, counter-clockwise seen from outside.
struct HullFace {
  std::vector<int> vertices;
  Vec3 normal;    // outward unit normal
  double offset;  // normal . x on the face plane
};

struct ConvexHull {
  std::vector<std::array<int, 3>> triangles;  // outward oriented
  std::vector<Vec3> normals;                  // per triangle
  std::vector<double> offsets;                // per triangle
  std::vector<HullFace> faces;                // coplanar triangles merged
  std::vector<bool> is_vertex;                // per input point

  /// Largest signed distance of x above any triangle plane.
  double max_excess(const Vec3& x) const;
};

/// Incremental 3D convex hull.  Points are inserted in a fixed pseudo-random
/// order; `visibility_eps` (relative to the coordinate scale) decides when a
/// point sees a face, `merge_tol` when adjacent triangles are coplanar.
/// Throws DegenerateTriangle when all points are coplanar.
ConvexHull convex_hull(const std::vector<Vec3>& points, double visibility_eps = 1e-12,
                       double merge_tol = 1e-10);

} // namespace fuchsian
