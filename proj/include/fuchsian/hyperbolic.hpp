#pragma once

// Hyperboloid model of H^3 in R^{3,1}, the Klein projective ball, and the
// invariant plane {x3 = 0}.  Coordinates are ordered (x1, x2, x3, x4) with
// <x,y> = x1 y1 + x2 y2 + x3 y3 - x4 y4.

#include <Eigen/Core>

#include "fuchsian/errors.hpp"

namespace fuchsian {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kSheetTolerance = 1e-12;
inline constexpr double kClampWindow = 1e-12;
inline constexpr double kIsometryTolerance = 1e-10;

/// Minkowski bilinear form of signature (3,1).
inline double minkowski(const Vec4& a, const Vec4& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2) - a(3) * b(3);
}

/// diag(1, 1, 1, -1)
const Mat4& minkowski_gram();

/// A point of H^3 on the upper sheet of the hyperboloid.
class MinkowskiPoint {
public:
  /// x_c = (0, 0, 0, 1).
  MinkowskiPoint() : x_(0.0, 0.0, 0.0, 1.0) {}

  /// Validates the sheet invariants; throws InvalidPoint.  `tolerance` is
  /// applied relative to x4^2.
  static MinkowskiPoint from_coords(const Vec4& x,
                                    double tolerance = kSheetTolerance);

  /// Rescales any future-timelike vector onto the sheet.
  static MinkowskiPoint normalized(const Vec4& x);

  static MinkowskiPoint center() { return MinkowskiPoint(); }

  const Vec4& coords() const { return x_; }
  double operator()(int i) const { return x_(i); }

  /// Offset from the sheet, <x,x> + 1.
  double sheet_defect() const { return minkowski(x_, x_) + 1.0; }

private:
  explicit MinkowskiPoint(const Vec4& x) : x_(x) {}
  Vec4 x_;
};

/// An orientation- and time-preserving isometry of H^3 (element of SO+(3,1)).
class Isometry {
public:
  Isometry() : m_(Mat4::Identity()) {}

  /// Checks G^T J G = J, det G = +1 and G preserves the upper sheet.
  static Isometry from_matrix(const Mat4& m,
                              double tolerance = kIsometryTolerance);

  /// Wraps a matrix assumed valid (products of already checked isometries).
  static Isometry trusted(const Mat4& m) {
    Isometry g;
    g.m_ = m;
    return g;
  }

  const Mat4& matrix() const { return m_; }

  /// Applies the matrix and renormalizes onto the sheet.
  MinkowskiPoint apply(const MinkowskiPoint& p) const;

  /// Image of a tangent vector (the matrix is linear on R^{3,1}).
  Vec4 apply_vector(const Vec4& v) const { return m_ * v; }

  Isometry operator*(const Isometry& other) const {
    return trusted(m_ * other.m_);
  }

  /// J G^T J
  Isometry inverse() const;

  /// Largest entry of |G^T J G - J|.
  double form_defect() const;

private:
  Mat4 m_;
};

/// A point of the open unit ball (Klein projective model).
struct KleinPoint {
  Vec3 k = Vec3::Zero();
};

/// Hyperbolic distance.  Throws InvalidPoint for off-sheet inputs.
double distance(const MinkowskiPoint& p, const MinkowskiPoint& q);

/// (x1, x2, x3) / x4
KleinPoint klein_map(const MinkowskiPoint& p);

/// Inverse of klein_map; throws OutsideBall when |k| >= 1.
MinkowskiPoint klein_unmap(const KleinPoint& k);

/// Differential of klein_map at p applied to a tangent vector.
Vec3 klein_differential(const MinkowskiPoint& p, const Vec4& v);

/// Orthogonal projection onto the invariant plane {x3 = 0}.
MinkowskiPoint project_to_plane(const MinkowskiPoint& p);

/// Signed distance to the invariant plane (positive for x3 > 0).
double signed_height(const MinkowskiPoint& p);

/// Distance to the invariant plane.
double height(const MinkowskiPoint& p);

/// The point at distance d above y along the plane normal; y must lie on
/// the plane.  Throws InvalidPoint otherwise.
MinkowskiPoint lift_to_height(const MinkowskiPoint& y, double d);

/// Angle opposite side a of a spherical triangle with sides a, b, c.
/// Throws DegenerateTriangle when the triangle inequality fails by more
/// than the clamping window.
double spherical_angle(double a, double b, double c);

/// Angle opposite side a of a hyperbolic triangle with sides a, b, c.
double hyperbolic_angle(double a, double b, double c);

/// Unit tangent at p of the geodesic from p towards q.
Vec4 unit_tangent_towards(const MinkowskiPoint& p, const MinkowskiPoint& q);

/// Minkowski norm of a spacelike vector.
double spacelike_norm(const Vec4& v);

/// Block-embeds an isometry of the plane, given on (x1, x2, x4), into H^3.
Mat4 embed_plane_matrix(const Mat3& h);

/// Restricts a 4x4 block matrix to the (x1, x2, x4) coordinates.
Mat3 restrict_to_plane(const Mat4& m);

/// Plane point from the Klein disk coordinates (u, v).
MinkowskiPoint plane_point_from_klein(double u, double v);

/// The point on the hyperboloid given by a 2+1 vector (x1, x2, x4).
MinkowskiPoint plane_point(const Vec3& y);

/// (x1, x2, x4) of a point with x3 = 0.
Vec3 plane_coords(const MinkowskiPoint& p);

} // namespace fuchsian
