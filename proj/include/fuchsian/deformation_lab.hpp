#pragma once

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuchsian/polyhedron.hpp"

namespace fuchsian {

// ---- vertex links -------------------------------------------------------

/// Spherical polygon cut out around a vertex.  Vertex i of the link is the
/// direction of the i-th edge, radii are measured from the downward
/// vertical p_-, sides[i] joins directions i and i+1 and betas[i] is the
/// angle at p_- between them.
struct LinkPolygon {
  std::vector<double> radii;
  std::vector<double> sides;
  std::vector<double> betas;
  std::vector<double> interior_angles;
  bool convex = true;

  double beta_sum() const;
  double side_sum() const;
};

/// Link from unit edge directions in a Euclidean 3-space, listed
/// counter-clockwise seen from above; `down` is the unit downward vertical.
LinkPolygon link_from_directions(const std::vector<Vec3>& directions, const Vec3& down);

/// Link of fundamental vertex `vertex` through its face edges.
LinkPolygon link_of_vertex(const FuchsianPolyhedron& p, int vertex);

/// Angle at p_- of the triangle (p_-, z_a, z_b): spherical_angle(l, r_a, r_b).
double beta_from_radii(double r_a, double r_b, double l);

struct MonotonicityPartials {
  double d_beta_prev = 0.0;  // ∂β_i / ∂r_i
  double d_beta_next = 0.0;  // ∂β_{i+1} / ∂r_i
  double sum() const { return d_beta_prev + d_beta_next; }
};

/// Central differences of the two angles adjacent to r_mid with the other
/// radii and the side lengths fixed.
MonotonicityPartials monotonicity_partials(double r_prev, double r_mid, double r_next, double l_prev,
                                           double l_next, double h = 1e-6);
double monotonicity_check(double r_prev, double r_mid, double r_next, double l_prev, double l_next);

struct LinkConfiguration {
  double r_prev, r_mid, r_next, l_prev, l_next;
};

/// Convexity of the quadrilateral (p_-, z_{i+1}, z_i, z_{i-1}).
bool link_configuration_convex(const LinkConfiguration& c);

/// Rejection sampler of convex configurations with radii in
/// (0.05, π/2 - 0.05).
LinkConfiguration random_link_configuration(std::mt19937_64& rng);

// ---- convex caps --------------------------------------------------------

struct ConvexCap {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise from above
  std::vector<std::array<int, 2>> edges;
  std::vector<int> boundary;
};

/// Upper-hull triangulation of the points.  The boundary is the set of
/// points with z = 0; every other point must be a cap vertex above the
/// boundary polygon.  Throws NotACap.
ConvexCap make_cap(const std::vector<Vec3>& points);

/// Triangular base on the unit circle and interior points on a sphere
/// through it.
ConvexCap random_cap(std::mt19937_64& rng, int vertex_count);

struct CapKernel {
  int dimension = 0;
  Eigen::MatrixXd basis;  // columns span the kernel
  Eigen::VectorXd singular_values;
};

/// Kernel of the first-order edge-length system, with rows pinning the
/// vertical motion of the boundary when `pin_boundary`.  Throws NotACap.
CapKernel cap_rigidity_kernel(const ConvexCap& cap, bool pin_boundary = true);

/// Number of independent Euclidean Killing fields whose vertical component
/// vanishes on the boundary (all six when not pinned).
int killing_field_count(const ConvexCap& cap, bool pin_boundary = true);

// ---- vector fields and the infinitesimal Pogorelov map -------------------

struct VectorFieldSample {
  MinkowskiPoint base;
  Vec4 vector = Vec4::Zero();

  /// Throws InvalidPoint when <base, vector> exceeds 1e-10.
  static VectorFieldSample make(const MinkowskiPoint& base, const Vec4& vector);
};

struct FieldDecomposition {
  Vec4 radial, lateral;
  Vec4 vertical, horizontal;
  Vec4 radial_horizontal, radial_vertical;  // (Z_r)_h, (Z_r)_v
  Vec4 horizontal_radial, vertical_radial;  // (Z_h)_r, (Z_v)_r
};

/// Unit radial direction at x (away from x_c).  Throws CenterSingularity.
Vec4 radial_direction(const MinkowskiPoint& x);
/// Unit upward normal of the equidistant surface through x.
Vec4 vertical_direction(const MinkowskiPoint& x);

/// Throws CenterSingularity at x_c.
FieldDecomposition decompose(const VectorFieldSample& s);

struct EuclideanSample {
  Vec3 point;
  Vec3 vector;
};

/// Radial part kept with its norm along the Euclidean radius, lateral part
/// pushed by the differential of the Klein map.  At x_c the whole vector is
/// pushed by the differential.
EuclideanSample pogorelov_map(const VectorFieldSample& s);

/// Largest entry of the symmetrized Jacobian of the transformed field over
/// the cloud, by central differences of width h in Klein coordinates.
double killing_residual(const std::function<Vec4(const MinkowskiPoint&)>& field,
                        const std::vector<Vec3>& klein_cloud, double h = 1e-5);

/// Klein points with radius in [0.05, 0.95].
std::vector<Vec3> klein_cloud(std::mt19937_64& rng, int count);

/// Basis of so(3,1): three rotations and three boosts.
std::array<Mat4, 6> killing_basis();

/// Throws NotInfinitesimalIsometry unless A^T J + J A = 0 within 1e-10.
double killing_transfer_check(const Mat4& a, const std::vector<Vec3>& klein_cloud);

/// Extension of a Killing field of the plane (3x3 on (x1, x2, x4)) to a
/// field on H^3 without vertical component.  Throws NotInfinitesimalIsometry.
VectorFieldSample extend_fuchsian_killing(const Mat3& k, const MinkowskiPoint& base);

// ---- check suites -------------------------------------------------------

struct CheckReport {
  std::string check;
  int samples = 0;
  double max_residual = 0.0;
  bool pass = false;
};

/// Suites: "links", "caps", "pogorelov", "all".  Throws ValidationError
/// for unknown names.
std::vector<CheckReport> run_checks(const std::string& suite, std::uint64_t seed = 1);

} // namespace fuchsian
