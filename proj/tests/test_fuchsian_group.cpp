#include <doctest.h>

#include <cmath>
#include <random>

#include "fuchsian/fuchsian_group.hpp"

using namespace fuchsian;

namespace {

// Interior angle at b between the geodesics towards a and c, from the
// Minkowski tangent vectors (no library angle formula involved).
double vertex_angle(const Vec4& a, const Vec4& b, const Vec4& c) {
  auto tangent = [&](const Vec4& q) {
    Vec4 t = q + minkowski(b, q) * b;
    return Vec4(t / std::sqrt(minkowski(t, t)));
  };
  return std::acos(std::clamp(minkowski(tangent(a), tangent(c)), -1.0, 1.0));
}

Vec4 circle_point(double r, double phi) {
  return Vec4(std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi), 0.0, std::cosh(r));
}

Mat3 plane_rotation(double phi) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = m(1, 1) = std::cos(phi);
  m(0, 1) = -std::sin(phi);
  m(1, 0) = std::sin(phi);
  return m;
}

Mat3 plane_boost(double t) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = m(2, 2) = std::cosh(t);
  m(0, 2) = m(2, 0) = std::sinh(t);
  return m;
}

} // namespace

TEST_CASE("word reduction, inversion and shortlex order") {
  CHECK(reduce_word("aAbB") == "");
  CHECK(reduce_word("abBc") == "ac");
  CHECK(reduce_word("cAab") == "cb");
  CHECK(invert_word("abC") == "cBA");
  CHECK(shortlex_less("b", "aa"));
  CHECK(shortlex_less("Ab", "ab"));
  CHECK_FALSE(shortlex_less("ab", "ab"));
}

TEST_CASE("canonical side pattern") {
  const auto p = canonical_side_pattern(2);
  REQUIRE(p.size() == 8);
  const int expected_pair[8] = {0, 1, 0, 1, 2, 3, 2, 3};
  const bool expected_bar[8] = {false, false, true, true, false, false, true, true};
  for (int j = 0; j < 8; ++j) {
    CHECK(p[j].pair == expected_pair[j]);
    CHECK(p[j].bar == expected_bar[j]);
    CHECK(side_index(2, p[j].pair, p[j].bar) == j);
  }
}

TEST_CASE("regular genus-2 group") {
  const FuchsianGroup g = regular_group(2);
  CHECK(g.relation_residual() < 1e-9);
  CHECK(std::abs(g.polygon_area() - 4 * M_PI) < 1e-6);
  CHECK(std::abs(g.cycle_angle() - 2 * M_PI) < 1e-9);
  CHECK(g.relator().size() == 8);
  for (const auto& gen : g.generators()) {
    // Hyperbolic elements of SO(2,1): trace 1 + 2 cosh(l) > 3.
    CHECK(restrict_to_plane(gen.matrix()).trace() > 3.0);
    CHECK(gen.form_defect() < 1e-10);
  }

  // Circumradius of the regular octagon with angles π/4, found by bisection.
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double r = 0.5 * (lo + hi);
    const double angle = vertex_angle(circle_point(r, -M_PI / 4), circle_point(r, 0.0), circle_point(r, M_PI / 4));
    (angle > M_PI / 4 ? lo : hi) = r;
  }
  for (const auto& v : g.polygon())
    CHECK(std::abs(distance(MinkowskiPoint::center(), v) - lo) < 1e-9);
}

TEST_CASE("generators pair the sides of the polygon") {
  for (const FuchsianGroup& g : {regular_group(2), group_from_polygon(build_polygon(2, zvc_fixture(2)))}) {
    const auto& poly = g.polygon();
    const int m = static_cast<int>(poly.size());
    for (int k = 0; k < 4; ++k) {
      const int j = side_index(2, k, false), jb = side_index(2, k, true);
      const Isometry& gen = g.generator(k);
      CHECK(distance(gen.apply(poly[j]), poly[(jb + 1) % m]) < 1e-8);
      CHECK(distance(gen.apply(poly[(j + 1) % m]), poly[jb]) < 1e-8);
      CHECK(distance(poly[j], poly[(j + 1) % m]) ==
            doctest::Approx(distance(poly[jb], poly[(jb + 1) % m])).epsilon(1e-9));
    }
  }
}

TEST_CASE("ZVC fixture polygon") {
  const auto& coords = zvc_fixture(2);
  REQUIRE(coords.size() == 6);
  const ZVCPolygon p = build_polygon(2, coords);
  CHECK(p.closure_residual < 1e-10);
  CHECK(std::abs(p.angle_sum() - 2 * M_PI) < 1e-8);
  for (double a : p.walk_angles()) CHECK((a > 0.0 && a < M_PI));
  for (std::size_t i = 0; i < coords.size(); ++i) CHECK(p.coords()[i] == doctest::Approx(coords[i]).epsilon(1e-12));

  // Interior angles recomputed from the vertices.
  const auto angles = p.walk_angles();
  for (int j = 0; j < 8; ++j) {
    const double a = vertex_angle(p.vertices[(j + 7) % 8].coords(), p.vertices[j].coords(), p.vertices[(j + 1) % 8].coords());
    CHECK(std::abs(a - angles[j]) < 1e-9);
  }

  const FuchsianGroup g = group_from_polygon(p);
  CHECK(g.relation_residual() < 1e-8);
  // Gauss-Bonnet for an octagon: 6π minus the angle sum.
  CHECK(std::abs(g.polygon_area() - (6 * M_PI - p.angle_sum())) < 1e-8);
  CHECK(std::abs(g.polygon_area() - 4 * M_PI) < 1e-6);
}

TEST_CASE("perturbed charts stay closed") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> jitter(-1e-2, 1e-2);
  const auto& base = zvc_fixture(2);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> c = base;
    for (double& x : c) x += jitter(rng);
    const FuchsianGroup g = group_from_polygon(build_polygon(2, c));
    CHECK(g.relation_residual() < 1e-8);
    CHECK(std::abs(g.polygon_area() - 4 * M_PI) < 1e-6);
  }
}

TEST_CASE("chart violations") {
  std::vector<double> c = zvc_fixture(2);
  c[2] = 0.0;
  CHECK_THROWS_AS(build_polygon(2, c), ChartViolation);
  c = zvc_fixture(2);
  c[0] = -0.5;
  CHECK_THROWS_AS(build_polygon(2, c), ChartViolation);
  CHECK_THROWS_AS(build_polygon(2, std::vector<double>(5, 1.0)), ChartViolation);
  CHECK_THROWS_AS(regular_group(1), ChartViolation);
}

TEST_CASE("conjugating the polygon conjugates the generators") {
  const FuchsianGroup g = regular_group(2);
  const Mat3 h = plane_rotation(0.3) * plane_boost(0.2);
  const Isometry H = extend_to_h3(h);
  std::vector<MinkowskiPoint> moved;
  for (const auto& v : g.polygon()) moved.push_back(H.apply(v));
  const FuchsianGroup g2 = FuchsianGroup::from_polygon_vertices(2, moved);
  for (int k = 0; k < 4; ++k) {
    const Mat4 expected = H.matrix() * g.generator(k).matrix() * H.inverse().matrix();
    CHECK((g2.generator(k).matrix() - expected).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("extension to H^3") {
  const Isometry id = extend_to_h3(Mat3::Identity());
  CHECK(id.matrix().isIdentity(0.0));
  const Isometry g = extend_to_h3(plane_rotation(0.7) * plane_boost(1.1));
  const MinkowskiPoint y = plane_point_from_klein(0.3, -0.2);
  const MinkowskiPoint x = lift_to_height(y, 0.9);
  CHECK((project_to_plane(g.apply(x)).coords() - g.apply(project_to_plane(x)).coords()).norm() < 1e-12);
  CHECK(std::abs(height(g.apply(x)) - 0.9) < 1e-12);
  Mat3 bad = Mat3::Identity();
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(extend_to_h3(bad), NotAnIsometry);
}

TEST_CASE("orbit enumeration") {
  const FuchsianGroup g = regular_group(2);
  const MinkowskiPoint seed = lift_to_height(g.interior_point(), 0.5);
  CHECK(enumerate_orbit(g, {seed}, 0).points.size() == 1);
  const auto orbit1 = enumerate_orbit(g, {seed}, 1);
  CHECK(orbit1.points.size() == 9);
  for (const auto& p : enumerate_orbit(g, {seed}, 3).points) CHECK(std::abs(height(p.point) - 0.5) < 1e-9);

  const MinkowskiPoint on_plane = plane_point_from_klein(0.1, 0.05);
  for (const auto& p : enumerate_orbit(g, {on_plane}, 2).points) CHECK(std::abs(p.point(2)) < 1e-12);

  // Words reproduce the points.
  for (const auto& p : enumerate_orbit(g, {seed}, 2).points)
    CHECK(distance(g.element(p.word).apply(seed), p.point) < 1e-9);
}

TEST_CASE("displacement grows with word length") {
  const FuchsianGroup g = regular_group(2);
  ElementCatalog catalog(g);
  catalog.ensure_level(6);
  const MinkowskiPoint xc = MinkowskiPoint::center();
  auto min_displacement = [&](int L) {
    double best = 1e300;
    for (const auto& e : catalog.entries())
      if (e.level == L) best = std::min(best, distance(xc, e.g.apply(xc)));
    return best;
  };
  for (int L = 3; L <= 6; ++L) CHECK(min_displacement(L) > min_displacement(L - 2));
  // Every nontrivial element displaces x_c by at least the side-pairing distance
  // of the regular octagon, twice its inradius.
  const double inradius = std::acosh(1.0 / std::tan(M_PI / 8));
  for (const auto& e : catalog.entries())
    if (!e.word.empty()) CHECK(distance(xc, e.g.apply(xc)) > 2 * inradius - 1e-9);
}

TEST_CASE("element catalog canonical words") {
  const FuchsianGroup g = regular_group(2);
  ElementCatalog catalog(g);
  catalog.ensure_level(3);
  CHECK(catalog.canonical(Word("aA")) == "");
  CHECK(catalog.canonical(Word("a")) == "a");
  // The relator is trivial, so rotating it gives the identity.
  CHECK(catalog.canonical(g.relator()) == "");
  const Word w = catalog.canonical(Word("abAB"));
  CHECK(w.size() <= 4);
  CHECK((g.element(w).matrix() - g.element("abAB").matrix()).cwiseAbs().maxCoeff() < 1e-8);
}
