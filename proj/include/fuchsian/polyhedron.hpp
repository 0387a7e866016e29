#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuchsian/cone_metric.hpp"
#include "fuchsian/convex_hull.hpp"
#include "fuchsian/fuchsian_group.hpp"

namespace fuchsian {

/// Coordinates of P(n): the ZVC chart of the group, base points of the
/// fundamental vertices as Klein disk coordinates (u, v) on the invariant
/// plane, and their heights above it.
struct PolyhedronParams {
  int genus = 2;
  bool regular = false;  // use the regular 4g-gon group instead of the chart
  std::vector<double> zvc;
  std::vector<std::array<double, 2>> base_points;
  std::vector<double> heights;

  int n() const { return static_cast<int>(heights.size()); }
  /// 6g-6+3n
  int dimension() const { return zvc_dimension(genus) + 3 * n(); }
  /// (zvc, u_1, v_1, ..., u_n, v_n, d_1, ..., d_n); the regular preset has
  /// no zvc block.
  Eigen::VectorXd to_vector() const;
  /// Same genus, preset and n with coordinates taken from x.
  PolyhedronParams with_vector(const Eigen::VectorXd& x) const;
  static PolyhedronParams from_vector(int genus, int n, const Eigen::VectorXd& x);
};

/// Group of the parameters (regular preset or group_from_polygon).
FuchsianGroup make_group(const PolyhedronParams& params);

/// Lifted fundamental vertices.  Throws InvalidPoint for non-positive
/// heights or base points outside the fundamental polygon.
std::vector<MinkowskiPoint> seed_points(const PolyhedronParams& params,
                                        const FuchsianGroup& group);

/// Orbit point w . x_index.
struct VertexLabel {
  int index = 0;
  Word word;

  auto operator<=>(const VertexLabel& o) const {
    if (index != o.index) return index <=> o.index;
    if (word.size() != o.word.size()) return word.size() <=> o.word.size();
    return word <=> o.word;
  }
  bool operator==(const VertexLabel& o) const = default;
  std::string str() const;
};

/// Edge from x_i to w . x_j with i <= j.  `left` and `right` are the third
/// vertices of the two triangles on either side of the edge, in the frame
/// where the edge starts at x_i.
struct EdgeLabel {
  int i = 0;
  int j = 0;
  Word word;
  std::string key;  // "i-j:word"
  bool additional = false;  // diagonal added by the triangulation
  VertexLabel left;
  VertexLabel right;
};

struct TriangleLabel {
  std::array<VertexLabel, 3> corners;  // counter-clockwise seen from above
  std::array<std::string, 3> edge_keys;  // edge s joins corners s and s+1
};

/// A fundamental-domain triangulation with group-labelled edges.
struct Labeling {
  int genus = 0;
  int n = 0;
  std::vector<EdgeLabel> edges;  // canonical order
  std::vector<TriangleLabel> triangles;

  int edge_index(const std::string& key) const;
  std::vector<std::string> keys() const;
};

std::string edge_key(int i, int j, const Word& w);

/// Rebuilds left/right neighbours of every edge from the triangles.
void attach_edge_sides(Labeling& labeling, ElementCatalog& catalog);

/// Canonical edge label of the segment between two orbit points.
EdgeLabel canonical_edge(const VertexLabel& p, const VertexLabel& q, ElementCatalog& catalog);

/// w . label
VertexLabel translate(const Word& w, const VertexLabel& label, ElementCatalog& catalog);

struct PolyhedronFace {
  std::vector<VertexLabel> vertices;  // counter-clockwise seen from above
};

class FuchsianPolyhedron {
public:
  PolyhedronParams params;
  std::shared_ptr<const FuchsianGroup> group;
  std::vector<MinkowskiPoint> vertices;  // fundamental vertices
  std::vector<PolyhedronFace> faces;     // one per face orbit
  Labeling labeling;                     // lowest-vertex fan triangulation
  bool triangulated = false;
  int stable_word_length = 0;

  MinkowskiPoint point(const VertexLabel& v) const;
  /// Edges of the faces (no diagonals).
  std::vector<EdgeLabel> face_edges() const;
  /// Edges of the current cell structure (with diagonals once triangulated).
  std::vector<EdgeLabel> edges() const;
};

/// Result of the strict-vertex test.  `det` is
/// det(a - b, a - c, a - x) with a, b, c the hull triangle below x listed
/// clockwise from above, so that it is positive for a strict vertex.
struct ConvexityReport {
  bool convex = true;
  int vertex = -1;
  std::array<VertexLabel, 3> triangle;
  double det = 0.0;
  std::string witness;
};

ConvexityReport check_convexity(const PolyhedronParams& params, int L = 4);

struct BuildOptions {
  int max_word_length = 12;
  std::size_t max_elements = 400000;
};

/// Boundary of the convex hull of the orbit of the fundamental vertices.
/// Throws NotConvex, TruncationUnstable.
FuchsianPolyhedron build(const PolyhedronParams& params, const BuildOptions& options = {});

FuchsianPolyhedron triangulate(const FuchsianPolyhedron& p);

/// Glued triangles of the fundamental triangulation with their hyperbolic
/// edge lengths.  Throws AngleOverflow when a cone angle reaches 2π.
ConeMetricSurface induced_metric(const FuchsianPolyhedron& p);

/// OBJ text (v/f records) of the Klein-model mesh of the fundamental faces
/// and their images under words of length <= copies.
std::string export_obj(const FuchsianPolyhedron& p, int copies);

/// det of the four R^{3,1} vectors divided by their Euclidean norms.  With
/// a, b, c counter-clockwise seen from above it is positive when d lies
/// below the plane through a, b, c.
double orientation_det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d);

/// Klein-coordinate determinant det(a - b, a - c, a - x).
double klein_det3(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x);

} // namespace fuchsian
