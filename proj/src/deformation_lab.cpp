#include "fuchsian/deformation_lab.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace fuchsian {

namespace {

double arc(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(a.dot(b), -1.0, 1.0)); }

// Orthonormal frame of T_x: two horizontal-ish directions and the vertical.
std::array<Vec4, 3> tangent_frame(const MinkowskiPoint& x) {
  std::array<Vec4, 3> f;
  f[2] = vertical_direction(x);
  const Vec4 candidates[2] = {Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0)};
  for (int k = 0; k < 2; ++k) {
    Vec4 v = candidates[k] + minkowski(candidates[k], x.coords()) * x.coords();
    v -= minkowski(v, f[2]) * f[2];
    for (int j = 0; j < k; ++j) v -= minkowski(v, f[j]) * f[j];
    f[k] = v / std::sqrt(minkowski(v, v));
  }
  return f;
}

double polygon_area_2d(std::vector<Vec3> pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % pts.size()];
    area += a(0) * b(1) - a(1) * b(0);
  }
  return 0.5 * std::abs(area);
}

double projected_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * ((b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0)));
}

bool is_center(const MinkowskiPoint& x) {
  return Vec3(x(0), x(1), x(2)).norm() == 0.0;
}

} // namespace

double LinkPolygon::beta_sum() const { return std::accumulate(betas.begin(), betas.end(), 0.0); }

double LinkPolygon::side_sum() const { return std::accumulate(sides.begin(), sides.end(), 0.0); }

LinkPolygon link_from_directions(const std::vector<Vec3>& dirs, const Vec3& down) {
  const std::size_t m = dirs.size();
  if (m < 3) throw DegenerateTriangle("a link needs at least three edges");
  LinkPolygon link;
  for (std::size_t i = 0; i < m; ++i) link.radii.push_back(arc(dirs[i], down));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    link.sides.push_back(arc(dirs[i], dirs[j]));
    link.betas.push_back(beta_from_radii(link.radii[i], link.radii[j], link.sides[i]));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& prev = dirs[(i + m - 1) % m];
    const Vec3& cur = dirs[i];
    const Vec3& next = dirs[(i + 1) % m];
    double angle = spherical_angle(arc(prev, next), link.sides[(i + m - 1) % m], link.sides[i]);
    // Reflex when the previous direction lies across the great circle
    // through cur and next from the interior point.
    const Vec3 normal = cur.cross(next);
    if (normal.dot(prev) * normal.dot(down) < 0.0) angle = 2.0 * M_PI - angle;
    link.interior_angles.push_back(angle);
    if (angle > M_PI + 1e-12) link.convex = false;
  }
  return link;
}

LinkPolygon link_of_vertex(const FuchsianPolyhedron& p, int vertex) {
  if (vertex < 0 || vertex >= p.params.n()) throw InvalidPoint("vertex index out of range");
  ElementCatalog catalog(*p.group);
  catalog.ensure_level(3);
  std::map<VertexLabel, VertexLabel> prev_of_next;
  VertexLabel first;
  for (const auto& face : p.faces) {
    const auto& v = face.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k].index != vertex) continue;
      const Word inv = invert_word(v[k].word);
      const VertexLabel next = translate(inv, v[(k + 1) % v.size()], catalog);
      const VertexLabel prev = translate(inv, v[(k + v.size() - 1) % v.size()], catalog);
      if (prev_of_next.empty()) first = next;
      prev_of_next[next] = prev;
    }
  }
  std::vector<VertexLabel> ring{first};
  for (VertexLabel cur = prev_of_next.at(first); !(cur == first); cur = prev_of_next.at(cur)) {
    ring.push_back(cur);
    if (ring.size() > prev_of_next.size()) throw TruncationUnstable("faces around the vertex do not close");
  }
  const MinkowskiPoint& x = p.vertices[vertex];
  const auto frame = tangent_frame(x);
  std::vector<Vec3> dirs;
  for (const auto& label : ring) {
    const Vec4 u = unit_tangent_towards(x, p.point(label));
    dirs.push_back(Vec3(minkowski(u, frame[0]), minkowski(u, frame[1]), minkowski(u, frame[2])).normalized());
  }
  return link_from_directions(dirs, Vec3(0, 0, -1));
}

double beta_from_radii(double r_a, double r_b, double l) { return spherical_angle(l, r_a, r_b); }

MonotonicityPartials monotonicity_partials(double r_prev, double r_mid, double r_next, double l_prev,
                                           double l_next, double h) {
  MonotonicityPartials d;
  d.d_beta_prev = (beta_from_radii(r_prev, r_mid + h, l_prev) - beta_from_radii(r_prev, r_mid - h, l_prev)) / (2 * h);
  d.d_beta_next = (beta_from_radii(r_mid + h, r_next, l_next) - beta_from_radii(r_mid - h, r_next, l_next)) / (2 * h);
  return d;
}

double monotonicity_check(double r_prev, double r_mid, double r_next, double l_prev, double l_next) {
  return monotonicity_partials(r_prev, r_mid, r_next, l_prev, l_next).sum();
}

bool link_configuration_convex(const LinkConfiguration& c) {
  auto valid = [](double a, double b, double l) {
    return l > std::abs(a - b) + 1e-6 && l < a + b - 1e-6 && l + a + b < 2 * M_PI - 1e-6;
  };
  if (!valid(c.r_prev, c.r_mid, c.l_prev) || !valid(c.r_mid, c.r_next, c.l_next)) return false;
  const double at_center = beta_from_radii(c.r_prev, c.r_mid, c.l_prev) + beta_from_radii(c.r_mid, c.r_next, c.l_next);
  const double at_mid = spherical_angle(c.r_prev, c.l_prev, c.r_mid) + spherical_angle(c.r_next, c.l_next, c.r_mid);
  return at_center < M_PI && at_mid < M_PI;
}

LinkConfiguration random_link_configuration(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.05, M_PI / 2 - 0.05);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    LinkConfiguration c{radius(rng), radius(rng), radius(rng), 0.0, 0.0};
    auto side = [&](double a, double b) {
      const double lo = std::abs(a - b), hi = a + b;
      return lo + (hi - lo) * unit(rng);
    };
    c.l_prev = side(c.r_prev, c.r_mid);
    c.l_next = side(c.r_mid, c.r_next);
    if (link_configuration_convex(c)) return c;
  }
}

ConvexCap make_cap(const std::vector<Vec3>& points) {
  ConvexCap cap;
  cap.vertices = points;
  std::vector<Vec3> boundary_pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i](2) == 0.0) {
      cap.boundary.push_back(static_cast<int>(i));
      boundary_pts.push_back(points[i]);
    } else if (!(points[i](2) > 0.0)) {
      throw NotACap("vertex " + std::to_string(i) + " lies below the boundary plane");
    }
  }
  if (cap.boundary.size() < 3) throw NotACap("boundary needs at least three vertices");
  if (cap.boundary.size() == points.size()) throw NotACap("no vertex above the boundary plane");
  ConvexHull hull;
  try {
    hull = convex_hull(points);
  } catch (const DegenerateTriangle& e) {
    throw NotACap(e.what());
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!hull.is_vertex[i]) throw NotACap("vertex " + std::to_string(i) + " is not on the convex surface");
  double covered = 0.0;
  std::set<std::pair<int, int>> edges;
  for (std::size_t t = 0; t < hull.triangles.size(); ++t) {
    if (!(hull.normals[t](2) > 1e-12)) continue;
    const auto& tri = hull.triangles[t];
    const double area = projected_area(points[tri[0]], points[tri[1]], points[tri[2]]);
    if (!(area > 0.0)) throw NotACap("a cap face folds over in projection");
    covered += area;
    cap.triangles.push_back(tri);
    for (int s = 0; s < 3; ++s) {
      const int a = tri[s], b = tri[(s + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  const double base = polygon_area_2d(boundary_pts);
  if (std::abs(covered - base) > 1e-9 * std::max(1.0, base))
    throw NotACap("cap faces do not project onto the boundary polygon");
  for (const auto& [a, b] : edges) cap.edges.push_back({a, b});
  return cap;
}

ConvexCap random_cap(std::mt19937_64& rng, int vertex_count) {
  if (vertex_count < 4) throw NotACap("a cap needs at least four vertices");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<Vec3> pts;
    for (int k = 0; k < 3; ++k) {
      const double phi = 2.0 * M_PI * k / 3.0 + 0.3 * (2.0 * unit(rng) - 1.0);
      pts.emplace_back(std::cos(phi), std::sin(phi), 0.0);
    }
    const double c = 0.3 + 1.2 * unit(rng);
    const double r2 = 1.0 + c * c;
    while (static_cast<int>(pts.size()) < vertex_count) {
      double w[3] = {unit(rng), unit(rng), unit(rng)};
      const double s = w[0] + w[1] + w[2];
      Vec3 q = Vec3::Zero();
      bool ok = true;
      for (int k = 0; k < 3; ++k) {
        w[k] /= s;
        if (w[k] < 0.05) ok = false;
        q += w[k] * pts[k];
      }
      if (!ok) continue;
      q(2) = std::sqrt(r2 - q(0) * q(0) - q(1) * q(1)) - c;
      pts.push_back(q);
    }
    try {
      return make_cap(pts);
    } catch (const NotACap&) {
    }
  }
}

CapKernel cap_rigidity_kernel(const ConvexCap& cap, bool pin_boundary) {
  const int v = static_cast<int>(cap.vertices.size());
  if (cap.boundary.size() < 3 || static_cast<int>(cap.boundary.size()) >= v || cap.triangles.size() < 3)
    throw NotACap("a cap needs a boundary polygon and at least one vertex above it");
  for (const auto& tri : cap.triangles)
    if (!(projected_area(cap.vertices[tri[0]], cap.vertices[tri[1]], cap.vertices[tri[2]]) > 0.0))
      throw NotACap("cap projection is not injective");
  const int rows = static_cast<int>(cap.edges.size()) + (pin_boundary ? static_cast<int>(cap.boundary.size()) : 0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, 3 * v);
  int r = 0;
  for (const auto& [a, b] : cap.edges) {
    const Vec3 d = cap.vertices[a] - cap.vertices[b];
    m.block<1, 3>(r, 3 * a) = d.transpose();
    m.block<1, 3>(r, 3 * b) = -d.transpose();
    ++r;
  }
  if (pin_boundary)
    for (int b : cap.boundary) m(r++, 3 * b + 2) = 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  CapKernel out;
  out.singular_values = svd.singularValues();
  const double top = out.singular_values.size() ? out.singular_values(0) : 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
    if (out.singular_values(k) > 1e-8 * top) ++rank;
  out.dimension = 3 * v - rank;
  out.basis = svd.matrixV().rightCols(out.dimension);
  return out;
}

int killing_field_count(const ConvexCap& cap, bool pin_boundary) {
  if (!pin_boundary) return 6;
  // Vertical component at each boundary vertex of the translations e1, e2,
  // e3 and the rotations about e1, e2, e3.
  Eigen::MatrixXd c(cap.boundary.size(), 6);
  for (std::size_t k = 0; k < cap.boundary.size(); ++k) {
    const Vec3& x = cap.vertices[cap.boundary[k]];
    c.row(k) << 0.0, 0.0, 1.0, Vec3::UnitX().cross(x)(2), Vec3::UnitY().cross(x)(2), Vec3::UnitZ().cross(x)(2);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const auto s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > 1e-10 * std::max(1.0, s(0))) ++rank;
  return 6 - rank;
}

VectorFieldSample VectorFieldSample::make(const MinkowskiPoint& base, const Vec4& vector) {
  const double scale = std::max(1.0, base(3) * vector.norm());
  if (std::abs(minkowski(base.coords(), vector)) > 1e-10 * scale)
    throw InvalidPoint("vector is not tangent at its base point");
  return VectorFieldSample{base, vector};
}

Vec4 radial_direction(const MinkowskiPoint& x) {
  if (is_center(x)) throw CenterSingularity("radial direction undefined at x_c");
  return -unit_tangent_towards(x, MinkowskiPoint::center());
}

Vec4 vertical_direction(const MinkowskiPoint& x) {
  Vec4 v = Vec4(0, 0, 1, 0) + x(2) * x.coords();
  return v / std::sqrt(1.0 + x(2) * x(2));
}

FieldDecomposition decompose(const VectorFieldSample& s) {
  const Vec4 rho = radial_direction(s.base);
  const Vec4 nu = vertical_direction(s.base);
  auto radial = [&](const Vec4& z) -> Vec4 { return minkowski(z, rho) * rho; };
  auto vertical = [&](const Vec4& z) -> Vec4 { return minkowski(z, nu) * nu; };
  FieldDecomposition d;
  d.radial = radial(s.vector);
  d.lateral = s.vector - d.radial;
  d.vertical = vertical(s.vector);
  d.horizontal = s.vector - d.vertical;
  d.radial_vertical = vertical(d.radial);
  d.radial_horizontal = d.radial - d.radial_vertical;
  d.horizontal_radial = radial(d.horizontal);
  d.vertical_radial = radial(d.vertical);
  return d;
}

EuclideanSample pogorelov_map(const VectorFieldSample& s) {
  EuclideanSample out;
  out.point = klein_map(s.base).k;
  if (is_center(s.base)) {
    out.vector = klein_differential(s.base, s.vector);
    return out;
  }
  const Vec4 rho = radial_direction(s.base);
  const double zr = minkowski(s.vector, rho);
  const Vec4 lateral = s.vector - zr * rho;
  out.vector = zr * out.point.normalized() + klein_differential(s.base, lateral);
  return out;
}

double killing_residual(const std::function<Vec4(const MinkowskiPoint&)>& field,
                        const std::vector<Vec3>& cloud, double h) {
  auto transformed = [&](const Vec3& k) {
    const MinkowskiPoint x = klein_unmap(KleinPoint{k});
    return pogorelov_map(VectorFieldSample{x, field(x)}).vector;
  };
  double worst = 0.0;
  for (const Vec3& k : cloud) {
    Mat3 jac;
    for (int j = 0; j < 3; ++j) {
      Vec3 kp = k, km = k;
      kp(j) += h;
      km(j) -= h;
      jac.col(j) = (transformed(kp) - transformed(km)) / (2.0 * h);
    }
    const Mat3 sym = 0.5 * (jac + jac.transpose());
    worst = std::max(worst, sym.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Vec3> klein_cloud(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.05, 0.95);
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < count) {
    Vec3 d(normal(rng), normal(rng), normal(rng));
    if (d.norm() < 1e-9) continue;
    out.push_back(radius(rng) * d.normalized());
  }
  return out;
}

std::array<Mat4, 6> killing_basis() {
  std::array<Mat4, 6> out;
  for (auto& m : out) m.setZero();
  out[0](1, 2) = -1, out[0](2, 1) = 1;  // rotation about x1
  out[1](2, 0) = -1, out[1](0, 2) = 1;  // rotation about x2
  out[2](0, 1) = -1, out[2](1, 0) = 1;  // rotation about x3
  for (int i = 0; i < 3; ++i) out[3 + i](i, 3) = out[3 + i](3, i) = 1;  // boosts
  return out;
}

double killing_transfer_check(const Mat4& a, const std::vector<Vec3>& cloud) {
  const Mat4& j = minkowski_gram();
  if ((a.transpose() * j + j * a).cwiseAbs().maxCoeff() > 1e-10)
    throw NotInfinitesimalIsometry("matrix is not in the Lie algebra of SO(3,1)");
  return killing_residual([&](const MinkowskiPoint& x) -> Vec4 { return a * x.coords(); }, cloud);
}

VectorFieldSample extend_fuchsian_killing(const Mat3& k, const MinkowskiPoint& base) {
  const Mat3 j = Vec3(1.0, 1.0, -1.0).asDiagonal();
  if ((k.transpose() * j + j * k).cwiseAbs().maxCoeff() > 1e-10)
    throw NotInfinitesimalIsometry("matrix is not in the Lie algebra of SO(2,1)");
  const MinkowskiPoint y = project_to_plane(base);
  const Vec3 ky = k * plane_coords(y);
  const double d = signed_height(base);
  return VectorFieldSample{base, std::cosh(d) * Vec4(ky(0), ky(1), 0.0, ky(2))};
}

} // namespace fuchsian

namespace fuchsian {

namespace {

PolyhedronParams sample_polyhedron(int n, bool regular) {
  static const double base[3][2] = {{0.0, 0.0}, {0.1, 0.05}, {-0.08, 0.1}};
  static const double heights[3] = {1.0, 0.9, 1.1};
  PolyhedronParams p;
  p.genus = 2;
  p.regular = regular;
  if (!regular) p.zvc = zvc_fixture(2);
  for (int i = 0; i < n; ++i) {
    p.base_points.push_back({base[i][0], base[i][1]});
    p.heights.push_back(heights[i]);
  }
  return p;
}

CheckReport link_closure_check() {
  CheckReport r{"link_closure", 0, 0.0, true};
  for (bool regular : {true, false})
    for (int n : {1, 3}) {
      const FuchsianPolyhedron poly = triangulate(build(sample_polyhedron(n, regular)));
      const ConeMetricSurface metric = induced_metric(poly);
      for (int i = 0; i < n; ++i) {
        const LinkPolygon link = link_of_vertex(poly, i);
        r.max_residual = std::max({r.max_residual, std::abs(link.beta_sum() - 2.0 * M_PI),
                                   std::abs(link.side_sum() - metric.cone_angles[i])});
        r.pass = r.pass && link.convex;
        ++r.samples;
      }
    }
  r.pass = r.pass && r.max_residual < 1e-8;
  return r;
}

CheckReport monotonicity_suite(std::mt19937_64& rng) {
  CheckReport r{"monotonicity", 1000, -std::numeric_limits<double>::infinity(), false};
  for (int k = 0; k < r.samples; ++k) {
    const LinkConfiguration c = random_link_configuration(rng);
    r.max_residual = std::max(r.max_residual, monotonicity_check(c.r_prev, c.r_mid, c.r_next, c.l_prev, c.l_next));
  }
  r.pass = r.max_residual < 0.0;
  return r;
}

CheckReport cap_suite(std::mt19937_64& rng) {
  CheckReport r{"cap_kernel", 50, 0.0, true};
  std::uniform_int_distribution<int> size(8, 40);
  for (int k = 0; k < r.samples; ++k) {
    const ConvexCap cap = random_cap(rng, size(rng));
    for (bool pin : {true, false}) {
      const int dim = cap_rigidity_kernel(cap, pin).dimension;
      const int expected = killing_field_count(cap, pin);
      r.max_residual = std::max(r.max_residual, static_cast<double>(std::abs(dim - expected)));
      if (dim != (pin ? 3 : 6)) r.pass = false;
    }
  }
  r.pass = r.pass && r.max_residual == 0.0;
  return r;
}

std::vector<CheckReport> pogorelov_suite(std::mt19937_64& rng) {
  const std::vector<Vec3> cloud = klein_cloud(rng, 500);
  CheckReport transfer{"killing_transfer", 6 * static_cast<int>(cloud.size()), 0.0, false};
  for (const Mat4& a : killing_basis())
    transfer.max_residual = std::max(transfer.max_residual, killing_transfer_check(a, cloud));
  transfer.pass = transfer.max_residual < 1e-6;

  CheckReport norms{"norm_relations", static_cast<int>(cloud.size()), 0.0, false};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const Vec3& k : cloud) {
    const MinkowskiPoint x = klein_unmap(KleinPoint{k});
    Vec4 z(normal(rng), normal(rng), normal(rng), 0.0);
    z += minkowski(z, x.coords()) * x.coords();
    const FieldDecomposition d = decompose(VectorFieldSample{x, z});
    const EuclideanSample e = pogorelov_map(VectorFieldSample{x, z});
    const Vec3 dir = e.point.normalized();
    const Vec3 er = e.vector.dot(dir) * dir;
    const double mu = distance(MinkowskiPoint::center(), x);
    norms.max_residual = std::max({norms.max_residual, std::abs(spacelike_norm(d.radial) - er.norm()),
                                   std::abs(spacelike_norm(d.lateral) - std::cosh(mu) * (e.vector - er).norm())});
  }
  norms.pass = norms.max_residual < 1e-10;

  // sinh(mu) times the unit radial field is not a Killing field.
  CheckReport control{"non_killing_control", static_cast<int>(cloud.size()), 0.0, false};
  control.max_residual = killing_residual(
      [](const MinkowskiPoint& x) -> Vec4 {
        return std::sinh(distance(MinkowskiPoint::center(), x)) * radial_direction(x);
      },
      cloud);
  control.pass = control.max_residual > 1e-2;
  return {transfer, norms, control};
}

} // namespace

std::vector<CheckReport> run_checks(const std::string& suite, std::uint64_t seed) {
  if (suite != "links" && suite != "caps" && suite != "pogorelov" && suite != "all")
    throw SchemaError("unknown suite '" + suite + "' (expected links, caps, pogorelov or all)");
  std::mt19937_64 rng(seed);
  std::vector<CheckReport> out;
  if (suite == "links" || suite == "all") {
    out.push_back(link_closure_check());
    out.push_back(monotonicity_suite(rng));
  }
  if (suite == "caps" || suite == "all") out.push_back(cap_suite(rng));
  if (suite == "pogorelov" || suite == "all")
    for (auto& r : pogorelov_suite(rng)) out.push_back(r);
  return out;
}

} // namespace fuchsian
