#include "fuchsian/hyperbolic.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace fuchsian {

namespace {

std::string describe(const Vec4& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x(0) << ", " << x(1) << ", " << x(2) << ", " << x(3) << ")";
  return os.str();
}

void require_on_sheet(const MinkowskiPoint& p) {
  const Vec4& x = p.coords();
  const double scale = std::max(1.0, x(3) * x(3));
  if (!(x(3) > 0.0) || std::abs(minkowski(x, x) + 1.0) > kSheetTolerance * scale)
    throw InvalidPoint("point off the upper sheet: " + describe(x));
}

} // namespace

const Mat4& minkowski_gram() {
  static const Mat4 j = Vec4(1.0, 1.0, 1.0, -1.0).asDiagonal();
  return j;
}

MinkowskiPoint MinkowskiPoint::from_coords(const Vec4& x, double tolerance) {
  const double scale = std::max(1.0, x(3) * x(3));
  if (!std::isfinite(x.sum()) || !(x(3) > 0.0) ||
      std::abs(minkowski(x, x) + 1.0) > tolerance * scale)
    throw InvalidPoint("coordinates violate <x,x> = -1, x4 > 0: " + describe(x));
  return MinkowskiPoint(x);
}

MinkowskiPoint MinkowskiPoint::normalized(const Vec4& x) {
  const double q = -minkowski(x, x);
  const double x4sq = x(3) * x(3);
  if (!(x(3) > 0.0) || !std::isfinite(q))
    throw InvalidPoint("vector is not future timelike: " + describe(x));
  if (q > 1e-6 * x4sq) return MinkowskiPoint(x / std::sqrt(q));
  // Far from x_c the form cancels to roundoff.  Images of sheet points under
  // isometries have unit scale, so keep the spatial part and rebuild x4.
  if (q > -1e-6 * x4sq) {
    const Vec3 s(x(0), x(1), x(2));
    return MinkowskiPoint(Vec4(x(0), x(1), x(2), std::sqrt(1.0 + s.squaredNorm())));
  }
  throw InvalidPoint("vector is not future timelike: " + describe(x));
}

Isometry Isometry::from_matrix(const Mat4& m, double tolerance) {
  Isometry g = trusted(m);
  // Entries of G^T J G carry roundoff proportional to |G|^2.
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff());
  if (!m.allFinite() || g.form_defect() > tolerance * scale)
    throw NotAnIsometry("matrix does not preserve the Minkowski form");
  if (std::abs(m.determinant() - 1.0) > tolerance * std::max(1.0, m.squaredNorm()))
    throw NotAnIsometry("matrix is not orientation preserving");
  if (!(m(3, 3) > 0.0))
    throw NotAnIsometry("matrix exchanges the two sheets");
  return g;
}

MinkowskiPoint Isometry::apply(const MinkowskiPoint& p) const {
  return MinkowskiPoint::normalized(m_ * p.coords());
}

Isometry Isometry::inverse() const {
  const Mat4& j = minkowski_gram();
  return trusted(j * m_.transpose() * j);
}

double Isometry::form_defect() const {
  const Mat4& j = minkowski_gram();
  return (m_.transpose() * j * m_ - j).cwiseAbs().maxCoeff();
}

double distance(const MinkowskiPoint& p, const MinkowskiPoint& q) {
  require_on_sheet(p);
  require_on_sheet(q);
  // <p-q, p-q> = 4 sinh^2(d/2); better conditioned than arccosh(-<p,q>).
  const Vec4 diff = p.coords() - q.coords();
  double s = minkowski(diff, diff);
  if (s < 0.0) {
    const double scale = std::max(1.0, p(3) * q(3));
    if (s < -kClampWindow * scale)
      throw InvalidPoint("timelike separation between sheet points");
    s = 0.0;
  }
  return 2.0 * std::asinh(0.5 * std::sqrt(s));
}

KleinPoint klein_map(const MinkowskiPoint& p) {
  const Vec4& x = p.coords();
  return KleinPoint{Vec3(x(0), x(1), x(2)) / x(3)};
}

MinkowskiPoint klein_unmap(const KleinPoint& k) {
  const double r2 = k.k.squaredNorm();
  if (!(r2 < 1.0))
    throw OutsideBall("Klein point outside the open unit ball");
  const double x4 = 1.0 / std::sqrt(1.0 - r2);
  return MinkowskiPoint::normalized(Vec4(k.k(0) * x4, k.k(1) * x4, k.k(2) * x4, x4));
}

Vec3 klein_differential(const MinkowskiPoint& p, const Vec4& v) {
  const Vec4& x = p.coords();
  const Vec3 spatial(x(0), x(1), x(2));
  return (Vec3(v(0), v(1), v(2)) - spatial / x(3) * v(3)) / x(3);
}

MinkowskiPoint project_to_plane(const MinkowskiPoint& p) {
  const Vec4& x = p.coords();
  const double q = x(3) * x(3) - x(0) * x(0) - x(1) * x(1);
  return MinkowskiPoint::normalized(Vec4(x(0), x(1), 0.0, x(3)) / std::sqrt(q));
}

double signed_height(const MinkowskiPoint& p) { return std::asinh(p(2)); }

double height(const MinkowskiPoint& p) { return std::abs(signed_height(p)); }

MinkowskiPoint lift_to_height(const MinkowskiPoint& y, double d) {
  if (std::abs(y(2)) > kSheetTolerance * std::max(1.0, y(3)))
    throw InvalidPoint("lift base must lie on the invariant plane");
  Vec4 x = std::cosh(d) * y.coords();
  x(2) += std::sinh(d);
  return MinkowskiPoint::normalized(x);
}

double spherical_angle(double a, double b, double c) {
  const double tol = kClampWindow;
  if (a < b + c - 2.0 * M_PI - tol || a > b + c + tol || a < std::abs(b - c) - tol)
    throw DegenerateTriangle("spherical sides violate the triangle inequality");
  const double denom = std::sin(b) * std::sin(c);
  if (!(denom > 0.0))
    throw DegenerateTriangle("spherical side of length 0 or pi");
  double cosv = (std::cos(a) - std::cos(b) * std::cos(c)) / denom;
  if (cosv > 1.0 + tol || cosv < -1.0 - tol)
    throw DegenerateTriangle("spherical law of cosines out of range");
  cosv = std::clamp(cosv, -1.0, 1.0);
  return std::acos(cosv);
}

double hyperbolic_angle(double a, double b, double c) {
  const double denom = std::sinh(b) * std::sinh(c);
  if (!(denom > 0.0))
    throw DegenerateTriangle("hyperbolic side of zero length");
  double cosv = (std::cosh(b) * std::cosh(c) - std::cosh(a)) / denom;
  if (cosv > 1.0 + kClampWindow || cosv < -1.0 - kClampWindow)
    throw DegenerateTriangle("hyperbolic sides violate the triangle inequality");
  return std::acos(std::clamp(cosv, -1.0, 1.0));
}

Vec4 unit_tangent_towards(const MinkowskiPoint& p, const MinkowskiPoint& q) {
  const Vec4& x = p.coords();
  Vec4 t = q.coords() + minkowski(x, q.coords()) * x;
  const double n2 = minkowski(t, t);
  if (!(n2 > 0.0))
    throw DegenerateTriangle("tangent towards a coincident point");
  return t / std::sqrt(n2);
}

double spacelike_norm(const Vec4& v) {
  return std::sqrt(std::max(0.0, minkowski(v, v)));
}

Mat4 embed_plane_matrix(const Mat3& h) {
  static constexpr int idx[3] = {0, 1, 3};
  Mat4 m = Mat4::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m(idx[r], idx[c]) = h(r, c);
  m(2, 0) = m(2, 1) = m(2, 3) = 0.0;
  m(0, 2) = m(1, 2) = m(3, 2) = 0.0;
  m(2, 2) = 1.0;
  return m;
}

Mat3 restrict_to_plane(const Mat4& m) {
  static constexpr int idx[3] = {0, 1, 3};
  Mat3 h;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      h(r, c) = m(idx[r], idx[c]);
  return h;
}

MinkowskiPoint plane_point_from_klein(double u, double v) {
  return klein_unmap(KleinPoint{Vec3(u, v, 0.0)});
}

MinkowskiPoint plane_point(const Vec3& y) {
  return MinkowskiPoint::normalized(Vec4(y(0), y(1), 0.0, y(2)));
}

Vec3 plane_coords(const MinkowskiPoint& p) { return Vec3(p(0), p(1), p(3)); }

} // namespace fuchsian
