#include <doctest.h>

#include <Eigen/Geometry>
#include <Eigen/QR>

#include <cmath>
#include <random>

#include "fuchsian/deformation_lab.hpp"
#include "instances.hpp"

using namespace fuchsian;
using namespace fuchsian::testing;

namespace {

Vec3 polar(double radius_from_down, double azimuth) {
  return Vec3(std::sin(radius_from_down) * std::cos(azimuth), std::sin(radius_from_down) * std::sin(azimuth),
              -std::cos(radius_from_down));
}

double mid_angle(double a, double r, double l) {
  return 2.0 * spherical_angle(a, l, r);
}

} // namespace

TEST_CASE("link of the regular vertex") {
  const FuchsianPolyhedron poly = triangulate(build(regular_params(1.0)));
  const LinkPolygon link = link_of_vertex(poly, 0);
  REQUIRE(link.betas.size() == 8);
  for (double b : link.betas) CHECK(std::abs(b - M_PI / 4) < 1e-8);
  CHECK(link.convex);
  CHECK(std::abs(link.beta_sum() - 2 * M_PI) < 1e-8);
  CHECK(std::abs(link.side_sum() - induced_metric(poly).cone_angles[0]) < 1e-8);
  for (double r : link.radii) CHECK(r == doctest::Approx(link.radii[0]).epsilon(1e-9));
  CHECK_THROWS_AS(link_of_vertex(poly, 1), InvalidPoint);
}

TEST_CASE("links of the fixture vertices close up") {
  const FuchsianPolyhedron poly = triangulate(build(fixture_params(3)));
  const ConeMetricSurface m = induced_metric(poly);
  for (int i = 0; i < 3; ++i) {
    const LinkPolygon link = link_of_vertex(poly, i);
    CHECK(link.convex);
    CHECK(std::abs(link.beta_sum() - 2 * M_PI) < 1e-8);
    CHECK(std::abs(link.side_sum() - m.cone_angles[i]) < 1e-8);
    for (double r : link.radii) CHECK((r > 0.0 && r < M_PI));
  }
}

TEST_CASE("synthetic links") {
  const Vec3 down(0, 0, -1);
  // Square pyramid pointing down: all radii equal, β = π/2.
  std::vector<Vec3> square;
  for (int k = 0; k < 4; ++k) square.push_back(polar(0.6, k * M_PI / 2));
  const LinkPolygon sq = link_from_directions(square, down);
  for (double b : sq.betas) CHECK(b == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(sq.convex);
  // The regular spherical quadrilateral with circumradius r has side
  // cos l = cos^2 r + sin^2 r cos(π/2).
  const double side = std::acos(std::cos(0.6) * std::cos(0.6));
  for (double l : sq.sides) CHECK(l == doctest::Approx(side).epsilon(1e-12));

  // Pulling one direction of a hexagon towards p_- makes its corner reflex.
  std::vector<Vec3> dented;
  for (int k = 0; k < 6; ++k) dented.push_back(polar(k == 1 ? 0.2 : 0.6, k * M_PI / 3));
  const LinkPolygon d = link_from_directions(dented, down);
  CHECK_FALSE(d.convex);
  CHECK(d.interior_angles[1] > M_PI);
  CHECK(std::abs(d.beta_sum() - 2 * M_PI) < 1e-12);
}

TEST_CASE("beta from radii") {
  CHECK(beta_from_radii(M_PI / 2, M_PI / 2, 0.7) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(beta_from_radii(0.4, 0.9, 0.8) == doctest::Approx(beta_from_radii(0.9, 0.4, 0.8)).epsilon(1e-14));
  // Equilateral spherical triangle with side π/3: cos β = 1/3.
  CHECK(beta_from_radii(M_PI / 3, M_PI / 3, M_PI / 3) == doctest::Approx(std::acos(1.0 / 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(beta_from_radii(0.2, 0.3, 1.0), DegenerateTriangle);
}

TEST_CASE("monotonicity of the link angles") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 1000; ++k) {
    const LinkConfiguration c = random_link_configuration(rng);
    CHECK(link_configuration_convex(c));
    CHECK(monotonicity_check(c.r_prev, c.r_mid, c.r_next, c.l_prev, c.l_next) < 0.0);
  }
  const MonotonicityPartials sym = monotonicity_partials(0.8, 0.9, 0.8, 0.5, 0.5);
  CHECK(sym.d_beta_prev == doctest::Approx(sym.d_beta_next).epsilon(1e-8));
  CHECK(sym.sum() < 0.0);
}

TEST_CASE("monotonicity degenerates to zero as the link flattens") {
  const double a = 0.8, l = 0.5;
  // Radius at which the corner at z_i becomes straight.
  double lo = 0.6, hi = 0.8;
  for (int it = 0; it < 100; ++it) {
    const double r = 0.5 * (lo + hi);
    (mid_angle(a, r, l) > M_PI ? lo : hi) = r;
  }
  double prev = -1e300;
  for (double delta : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const double s = monotonicity_check(a, hi + delta, a, l, l);
    CHECK(s < 0.0);
    CHECK(s > prev);
    prev = s;
  }
  CHECK(prev > -1e-2);
}

TEST_CASE("cap kernels") {
  std::mt19937_64 rng(67);
  for (int k = 0; k < 10; ++k) {
    const ConvexCap cap = random_cap(rng, 8 + 3 * k);
    CHECK(cap.boundary.size() == 3);
    // A triangulated disk: E = 3V - 3 - b, F = 2V - 2 - b.
    const int V = static_cast<int>(cap.vertices.size());
    CHECK(static_cast<int>(cap.edges.size()) == 3 * V - 6);
    CHECK(static_cast<int>(cap.triangles.size()) == 2 * V - 5);
    const CapKernel pinned = cap_rigidity_kernel(cap, true);
    const CapKernel free = cap_rigidity_kernel(cap, false);
    CHECK(pinned.dimension == 3);
    CHECK(free.dimension == 6);
    CHECK(killing_field_count(cap, true) == 3);
    CHECK(killing_field_count(cap, false) == 6);

    // Euclidean Killing fields (translations and rotations) lie in the free kernel.
    for (int f = 0; f < 6; ++f) {
      Eigen::VectorXd z(3 * V);
      for (int i = 0; i < V; ++i) {
        Vec3 v = Vec3::Zero();
        if (f < 3) v(f) = 1.0;
        else v = Vec3::Unit(f - 3).cross(cap.vertices[i]);
        z.segment<3>(3 * i) = v;
      }
      const Eigen::VectorXd proj = free.basis * (free.basis.transpose() * z);
      CHECK((proj - z).norm() < 1e-8 * z.norm());
    }
  }
}

TEST_CASE("cap validation") {
  CHECK_THROWS_AS(make_cap({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, -1, 0)}), NotACap);
  CHECK_THROWS_AS(make_cap({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, -1, 0), Vec3(0, 0, -0.5)}), NotACap);
  // An inner point below the cap surface.
  CHECK_THROWS_AS(make_cap({Vec3(1, 0, 0), Vec3(-0.5, 0.8, 0), Vec3(-0.5, -0.8, 0), Vec3(0, 0, 1.0),
                            Vec3(0.05, 0.0, 0.1)}),
                  NotACap);
  const ConvexCap tetra = make_cap({Vec3(1, 0, 0), Vec3(-0.5, 0.8, 0), Vec3(-0.5, -0.8, 0), Vec3(0, 0, 1.0)});
  CHECK(tetra.triangles.size() == 3);
  CHECK(cap_rigidity_kernel(tetra, true).dimension == 3);
}

TEST_CASE("field decomposition") {
  // On the plane the vertical direction is e3.
  const MinkowskiPoint y = plane_point_from_klein(0.3, 0.1);
  CHECK((vertical_direction(y) - Vec4(0, 0, 1, 0)).norm() < 1e-15);
  const FieldDecomposition dv = decompose(VectorFieldSample::make(y, Vec4(0, 0, 2.0, 0)));
  CHECK((dv.vertical - Vec4(0, 0, 2.0, 0)).norm() < 1e-14);
  CHECK(dv.horizontal.norm() < 1e-14);

  // On the x3 axis radial and vertical coincide.
  const MinkowskiPoint ax = lift_to_height(MinkowskiPoint::center(), 0.7);
  CHECK((radial_direction(ax) - vertical_direction(ax)).norm() < 1e-14);

  std::mt19937_64 rng(71);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const Vec3& k : klein_cloud(rng, 200)) {
    const MinkowskiPoint x = klein_unmap(KleinPoint{k});
    Vec4 z(normal(rng), normal(rng), normal(rng), normal(rng));
    z += minkowski(z, x.coords()) * x.coords();
    const FieldDecomposition d = decompose(VectorFieldSample::make(x, z));
    CHECK((d.radial + d.lateral - z).norm() < 1e-12 * std::max(1.0, z.norm()));
    CHECK((d.vertical + d.horizontal - z).norm() < 1e-12 * std::max(1.0, z.norm()));
    const Vec4 lhs = d.radial_horizontal + d.radial_vertical;
    const Vec4 rhs = d.horizontal_radial + d.vertical_radial;
    CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, z.norm()));
    CHECK(std::abs(minkowski(d.radial, d.lateral)) < 1e-10 * std::max(1.0, z.squaredNorm()));
  }
  CHECK_THROWS_AS(decompose(VectorFieldSample::make(MinkowskiPoint::center(), Vec4(1, 0, 0, 0))), CenterSingularity);
  CHECK_THROWS_AS(VectorFieldSample::make(MinkowskiPoint::center(), Vec4(0, 0, 0, 1)), InvalidPoint);
}

TEST_CASE("Pogorelov map on samples") {
  const double mu = 1.0;
  const MinkowskiPoint x = klein_unmap(KleinPoint{Vec3(std::tanh(mu), 0, 0)});
  // Unit radial vector keeps its length along the Euclidean radius.
  const EuclideanSample er = pogorelov_map(VectorFieldSample::make(x, radial_direction(x)));
  CHECK((er.vector - Vec3(1, 0, 0)).norm() < 1e-14);
  // Unit lateral vector shrinks by cosh(mu).
  const EuclideanSample el = pogorelov_map(VectorFieldSample::make(x, Vec4(0, 1, 0, 0)));
  CHECK((el.vector - Vec3(0, 1.0 / std::cosh(mu), 0)).norm() < 1e-14);
  CHECK(pogorelov_map(VectorFieldSample::make(x, Vec4::Zero())).vector.norm() == 0.0);
  // At x_c the differential of the Klein map is the identity on (x1, x2, x3).
  const EuclideanSample ec = pogorelov_map(VectorFieldSample::make(MinkowskiPoint::center(), Vec4(1, 2, 3, 0)));
  CHECK((ec.vector - Vec3(1, 2, 3)).norm() == 0.0);

  // Linear in the vector.
  const Vec4 z1(0.3, -0.2, 0.5, 0.0), z2(0.0, 0.4, -0.1, 0.0);
  auto tangent = [&](Vec4 z) { return Vec4(z + minkowski(z, x.coords()) * x.coords()); };
  const Vec3 lin = pogorelov_map(VectorFieldSample::make(x, tangent(2 * z1 - 3 * z2))).vector;
  const Vec3 sep = 2 * pogorelov_map(VectorFieldSample::make(x, tangent(z1))).vector -
                   3 * pogorelov_map(VectorFieldSample::make(x, tangent(z2))).vector;
  CHECK((lin - sep).norm() < 1e-13);
}

TEST_CASE("Killing fields transfer to Killing fields") {
  std::mt19937_64 rng(73);
  const std::vector<Vec3> cloud = klein_cloud(rng, 100);
  for (const Vec3& k : cloud) CHECK((k.norm() >= 0.05 && k.norm() <= 0.95));
  const auto basis = killing_basis();
  const Mat4& j = minkowski_gram();
  for (const Mat4& a : basis) {
    CHECK((a.transpose() * j + j * a).cwiseAbs().maxCoeff() == 0.0);
    CHECK(killing_transfer_check(a, cloud) < 1e-6);
  }
  const Mat4 combo = 0.5 * basis[0] - 1.5 * basis[4] + 2.0 * basis[5];
  CHECK(killing_transfer_check(combo, cloud) < 1e-6);

  const double control = killing_residual(
      [](const MinkowskiPoint& x) -> Vec4 {
        return std::sinh(distance(MinkowskiPoint::center(), x)) * radial_direction(x);
      },
      cloud);
  CHECK(control > 1e-2);
  CHECK_THROWS_AS(killing_transfer_check(Mat4::Identity(), cloud), NotInfinitesimalIsometry);
}

TEST_CASE("Fuchsian Killing extension") {
  Mat3 k = Mat3::Zero();
  k(0, 2) = k(2, 0) = 1.0;  // boost along x1
  k(0, 1) = -0.4, k(1, 0) = 0.4;
  const MinkowskiPoint y = plane_point_from_klein(0.2, -0.3);
  const VectorFieldSample on_plane = extend_fuchsian_killing(k, y);
  const Vec3 ky = k * plane_coords(y);
  CHECK((on_plane.vector - Vec4(ky(0), ky(1), 0, ky(2))).norm() < 1e-14);

  for (double d : {0.3, 1.0, 2.0}) {
    const MinkowskiPoint x = lift_to_height(y, d);
    const VectorFieldSample s = extend_fuchsian_killing(k, x);
    CHECK(std::abs(minkowski(s.vector, vertical_direction(x))) < 1e-12);
    CHECK(std::abs(minkowski(s.vector, x.coords())) < 1e-12);
    // Velocity of the lifted point as the base point flows along k.
    const double t = 1e-6;
    auto flowed = [&](double s) { return lift_to_height(plane_point((Mat3::Identity() + s * k) * plane_coords(y)), d); };
    const Vec4 fd = (flowed(t).coords() - flowed(-t).coords()) / (2 * t);
    CHECK((fd - s.vector).norm() < 1e-8 * std::max(1.0, s.vector.norm()));
  }
  CHECK_THROWS_AS(extend_fuchsian_killing(Mat3::Identity(), y), NotInfinitesimalIsometry);
}

TEST_CASE("check suites") {
  const auto links = run_checks("links", 3);
  REQUIRE(links.size() == 2);
  for (const auto& r : links) CHECK(r.pass);
  CHECK_THROWS_AS(run_checks("bogus"), SchemaError);
}
