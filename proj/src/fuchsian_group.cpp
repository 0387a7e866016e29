#include "fuchsian/fuchsian_group.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace fuchsian {

namespace {

// The polygon walk loses up to four digits between a side and the vertex
// cycle, so the chart is evaluated in extended precision.
using Real = long double;
using RVec3 = Eigen::Matrix<Real, 3, 1>;
using RMat3 = Eigen::Matrix<Real, 3, 3>;
using RMat2 = Eigen::Matrix<Real, 2, 2>;

constexpr Real kPi = 3.14159265358979323846264338327950288L;
constexpr double kClosureTolerance = 1e-10;
constexpr int kClosureIterations = 50;

char inverse_letter(char c) {
  return std::islower(static_cast<unsigned char>(c))
             ? static_cast<char>(std::toupper(c))
             : static_cast<char>(std::tolower(c));
}

RMat3 translate_x(Real l) {
  RMat3 t;
  t << std::cosh(l), 0.0L, std::sinh(l), 0.0L, 1.0L, 0.0L, std::sinh(l), 0.0L, std::cosh(l);
  return t;
}

RMat3 rotate(Real phi) {
  RMat3 r;
  r << std::cos(phi), -std::sin(phi), 0.0L, std::sin(phi), std::cos(phi), 0.0L, 0.0L, 0.0L, 1.0L;
  return r;
}

const RMat3& gram3() {
  static const RMat3 j = RVec3(1.0L, 1.0L, -1.0L).asDiagonal();
  return j;
}

Real form3(const RVec3& a, const RVec3& b) { return a(0) * b(0) + a(1) * b(1) - a(2) * b(2); }

// Orthonormal frame [t, n, p] at p, t pointing towards q, n to its left.
RMat3 frame_towards(const RVec3& p, const RVec3& q) {
  RVec3 t = q + form3(p, q) * p;
  t += form3(p, t) * p;
  t /= std::sqrt(form3(t, t));
  RVec3 n = gram3() * p.cross(t);
  n /= std::sqrt(form3(n, n));
  RMat3 f;
  f.col(0) = t;
  f.col(1) = n;
  f.col(2) = p;
  return f;
}

RMat3 frame_inverse(const RMat3& f) { return gram3() * f.transpose() * gram3(); }

RVec3 extended(const MinkowskiPoint& p) {
  RVec3 v(p(0), p(1), p(3));
  return v / std::sqrt(-form3(v, v));
}

// Determinant of the three 2+1 vectors, positive when c is left of a -> b.
double left_of(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mat3 m;
  m.col(0) = a;
  m.col(1) = b;
  m.col(2) = c;
  return m.determinant() / (a.norm() * b.norm() * c.norm());
}

struct FullPolygon {
  std::vector<Real> lengths;  // per pair k
  std::vector<Real> theta, theta_bar;
};

void walk_data(int genus, const FullPolygon& f, std::vector<Real>& lengths,
               std::vector<Real>& angles) {
  const auto pattern = canonical_side_pattern(genus);
  lengths.resize(pattern.size());
  angles.resize(pattern.size());
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    const Side& s = pattern[j];
    lengths[j] = f.lengths[s.pair];
    angles[j] = s.bar ? f.theta_bar[s.pair] : f.theta[s.pair];
  }
}

// The closure walk runs in SL(2,R), the double cover of SO(2,1), where
// entries grow like e^{d/2} instead of e^d.
RVec3 closure_of(int genus, const FullPolygon& f) {
  std::vector<Real> lengths, angles;
  walk_data(genus, f, lengths, angles);
  RMat2 m = RMat2::Identity();
  const std::size_t n = lengths.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Real h = 0.5L * lengths[k];
    const Real phi = 0.5L * (kPi - angles[(k + 1) % n]);
    RMat2 t, r;
    t << std::exp(h), 0.0L, 0.0L, std::exp(-h);
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    m = m * t * r;
  }
  // The lift of a closed walk is +I or -I.
  if (m.trace() < 0.0L) m = -m;
  return RVec3(m(0, 0) - m(1, 1), m(0, 1) + m(1, 0), m(1, 0) - m(0, 1));
}

// Free coordinates plus the unknowns (b_1, b_2, θ_1).
FullPolygon assemble(int genus, const std::vector<double>& coords, const RVec3& u) {
  const int m = 2 * genus;
  FullPolygon f;
  f.lengths.assign(m, 0.0L);
  f.theta.assign(m, 0.0L);
  f.theta_bar.assign(m, 0.0L);
  Real rest = 0.0L;
  for (int k = 2; k < m; ++k) {
    f.lengths[k] = coords[k - 2];
    f.theta[k] = coords[(m - 2) + 2 * (k - 2)];
    f.theta_bar[k] = coords[(m - 2) + 2 * (k - 2) + 1];
    rest += f.theta[k] + f.theta_bar[k];
  }
  f.lengths[0] = u(0);
  f.lengths[1] = u(1);
  f.theta[0] = u(2);
  f.theta_bar[0] = u(2);
  f.theta[1] = kPi - u(2);
  f.theta_bar[1] = kPi - rest - u(2);
  return f;
}

// Newton on the three closure residuals.  Returns the final residual norm.
double solve_closure(int genus, const std::vector<double>& coords, RVec3& u) {
  auto residual = [&](const RVec3& v) { return closure_of(genus, assemble(genus, coords, v)); };
  RVec3 r = residual(u);
  Real norm = r.norm();
  for (int it = 0; it < kClosureIterations && std::isfinite(static_cast<double>(norm)); ++it) {
    RMat3 jac;
    for (int c = 0; c < 3; ++c) {
      const Real h = 1e-9L * std::max(Real(1), std::abs(u(c)));
      RVec3 up = u, um = u;
      up(c) += h;
      um(c) -= h;
      jac.col(c) = (residual(up) - residual(um)) / (2.0L * h);
    }
    const RVec3 step = jac.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) break;
    Real s = 1.0L;
    RVec3 trial = u + step;
    RVec3 rt = residual(trial);
    while (!(rt.norm() < norm) && s > 1e-4L) {
      s *= 0.5L;
      trial = u + s * step;
      rt = residual(trial);
    }
    if (!(rt.norm() < norm)) break;
    u = trial;
    r = rt;
    norm = rt.norm();
    if (norm < 1e-18L) break;
  }
  return static_cast<double>(norm);
}

struct Fixture {
  std::vector<double> coords;
  RVec3 unknowns;
};

Fixture solve_fixture(int genus) {
  const int m = 4 * genus;
  const int pairs = 2 * genus;
  const double alpha = 2.0 * M_PI / m;
  const double radius = std::acosh(1.0 / std::tan(M_PI / m) / std::tan(alpha / 2.0));
  const double side = std::acosh(std::cosh(radius) * std::cosh(radius) -
                                 std::sinh(radius) * std::sinh(radius) * std::cos(2.0 * M_PI / m));
  // x = (lengths per pair, θ_k and θ̄_k interleaved)
  Eigen::VectorXd x(pairs + 2 * pairs);
  x.head(pairs).setConstant(side);
  x.tail(2 * pairs).setConstant(alpha);
  // Condition iii) is reached by continuation: its target moves from the
  // regular value 2α to π while a minimum-norm Newton projection keeps the
  // other conditions satisfied.
  double target = 2.0 * alpha;
  auto constraints = [&](const Eigen::VectorXd& v) {
    FullPolygon f;
    for (int k = 0; k < pairs; ++k) {
      f.lengths.push_back(v(k));
      f.theta.push_back(v(pairs + 2 * k));
      f.theta_bar.push_back(v(pairs + 2 * k + 1));
    }
    Eigen::VectorXd r(6);
    r.head(3) = closure_of(genus, f).cast<double>();
    r(3) = v.tail(2 * pairs).sum() - 2.0 * M_PI;
    r(4) = v(pairs) + v(pairs + 2) - target;
    r(5) = v(pairs + 1) + v(pairs + 2) - target;
    return r;
  };
  constexpr int kStages = 20;
  for (int stage = 1; stage <= kStages; ++stage) {
    target = 2.0 * alpha + (M_PI - 2.0 * alpha) * stage / kStages;
    Eigen::VectorXd r = constraints(x);
    for (int it = 0; it < 100 && r.norm() > 1e-15; ++it) {
      Eigen::MatrixXd jac(6, x.size());
      for (int c = 0; c < x.size(); ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp(c) += 1e-7;
        xm(c) -= 1e-7;
        jac.col(c) = (constraints(xp) - constraints(xm)) / 2e-7;
      }
      const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
      double s = 1.0;
      Eigen::VectorXd trial = x + step;
      Eigen::VectorXd rt = constraints(trial);
      while (!(rt.norm() < r.norm()) && s > 1e-4) {
        s *= 0.5;
        trial = x + s * step;
        rt = constraints(trial);
      }
      if (!(rt.norm() < r.norm())) break;
      x = trial;
      r = rt;
    }
  }
  Fixture out;
  for (int k = 2; k < pairs; ++k) out.coords.push_back(x(k));
  for (int k = 2; k < pairs; ++k) {
    out.coords.push_back(x(pairs + 2 * k));
    out.coords.push_back(x(pairs + 2 * k + 1));
  }
  out.unknowns = RVec3(x(0), x(1), x(pairs));
  // Polish the unknowns on the exact chart relations.
  solve_closure(genus, out.coords, out.unknowns);
  return out;
}

const Fixture& cached_fixture(int genus) {
  static std::mutex mu;
  static std::map<int, Fixture> cache;  // node-based: references stay valid
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(genus);
  if (it == cache.end()) it = cache.emplace(genus, solve_fixture(genus)).first;
  return it->second;
}

// Side-pairing matrices from the walking frames of each side.
std::vector<Mat3> pairings_from_frames(int genus, const std::vector<RMat3>& frames,
                                       const std::vector<Real>& lengths) {
  std::vector<Mat3> out;
  for (int k = 0; k < 2 * genus; ++k) {
    const int j = side_index(genus, k, false);
    const int jb = side_index(genus, k, true);
    // Frame at the end of b̄_k turned back along it.
    const RMat3 back = frames[jb] * translate_x(lengths[jb]) * rotate(kPi);
    out.push_back((back * frame_inverse(frames[j])).cast<double>());
  }
  return out;
}

ZVCPolygon finish_polygon(int genus, const std::vector<double>& coords, const RVec3& u,
                          double residual) {
  const FullPolygon f = assemble(genus, coords, u);
  ZVCPolygon p;
  p.genus = genus;
  for (std::size_t k = 0; k < f.lengths.size(); ++k) {
    p.lengths.push_back(static_cast<double>(f.lengths[k]));
    p.theta.push_back(static_cast<double>(f.theta[k]));
    p.theta_bar.push_back(static_cast<double>(f.theta_bar[k]));
  }
  p.closure_residual = residual;
  for (double l : p.lengths)
    if (!(l > 0.0)) throw ChartViolation("closure solve produced a non-positive side length");
  for (double a : p.walk_angles())
    if (!(a > 0.0 && a < M_PI))
      throw ChartViolation("closure solve produced an interior angle outside (0, pi)");

  std::vector<Real> lengths, angles;
  walk_data(genus, f, lengths, angles);
  const std::size_t m = lengths.size();
  std::vector<RVec3> first;
  RMat3 frame = RMat3::Identity();
  for (std::size_t k = 0; k < m; ++k) {
    first.push_back(frame.col(2));
    frame = frame * translate_x(lengths[k]) * rotate(kPi - angles[(k + 1) % m]);
  }
  // Walk again from a frame that puts the vertex centroid at x_c and the
  // first vertex on the +x1 ray; partial products then stay small.
  RVec3 centroid = RVec3::Zero();
  for (const auto& v : first) centroid += v;
  centroid /= std::sqrt(-form3(centroid, centroid));
  frame = frame_inverse(frame_towards(centroid, first[0]));
  std::vector<RMat3> frames;
  for (std::size_t k = 0; k < m; ++k) {
    frames.push_back(frame);
    p.vertices.push_back(plane_point(frame.col(2).cast<double>()));
    frame = frame * translate_x(lengths[k]) * rotate(kPi - angles[(k + 1) % m]);
  }
  p.pairings = pairings_from_frames(genus, frames, lengths);

  for (std::size_t j = 0; j < m; ++j) {
    const Vec3 a = plane_coords(p.vertices[j]);
    const Vec3 b = plane_coords(p.vertices[(j + 1) % m]);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j || i == (j + 1) % m) continue;
      if (!(left_of(a, b, plane_coords(p.vertices[i])) > 0.0))
        throw ChartViolation("polygon is not convex");
    }
  }
  return p;
}

} // namespace

Word reduce_word(const Word& w) {
  Word out;
  for (char c : w) {
    if (!out.empty() && out.back() == inverse_letter(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

Word invert_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (char& c : out) c = inverse_letter(c);
  return out;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<Side> canonical_side_pattern(int genus) {
  std::vector<Side> out;
  for (int p = 0; p < genus; ++p) {
    out.push_back({2 * p, false});
    out.push_back({2 * p + 1, false});
    out.push_back({2 * p, true});
    out.push_back({2 * p + 1, true});
  }
  return out;
}

int side_index(int /*genus*/, int k, bool bar) { return 4 * (k / 2) + (k % 2) + (bar ? 2 : 0); }

std::vector<double> ZVCPolygon::coords() const {
  std::vector<double> out;
  const int m = 2 * genus;
  for (int k = 2; k < m; ++k) out.push_back(lengths[k]);
  for (int k = 2; k < m; ++k) {
    out.push_back(theta[k]);
    out.push_back(theta_bar[k]);
  }
  return out;
}

double ZVCPolygon::angle_sum() const {
  double s = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) s += theta[k] + theta_bar[k];
  return s;
}

std::vector<double> ZVCPolygon::walk_angles() const {
  std::vector<double> out;
  for (const Side& s : canonical_side_pattern(genus))
    out.push_back(s.bar ? theta_bar[s.pair] : theta[s.pair]);
  return out;
}

std::vector<double> ZVCPolygon::walk_lengths() const {
  std::vector<double> out;
  for (const Side& s : canonical_side_pattern(genus)) out.push_back(lengths[s.pair]);
  return out;
}

Mat3 walk_polygon(const std::vector<double>& lengths, const std::vector<double>& angles,
                  std::vector<MinkowskiPoint>* vertices) {
  const std::size_t m = lengths.size();
  RMat3 f = RMat3::Identity();
  if (vertices) vertices->clear();
  for (std::size_t k = 0; k < m; ++k) {
    if (vertices) vertices->push_back(plane_point(f.col(2).cast<double>()));
    f = f * translate_x(lengths[k]) * rotate(kPi - angles[(k + 1) % m]);
  }
  return f.cast<double>();
}

ZVCPolygon build_polygon(int genus, const std::vector<double>& coords) {
  if (genus < 2) throw ChartViolation("genus must be at least 2");
  if (static_cast<int>(coords.size()) != zvc_dimension(genus)) {
    std::ostringstream os;
    os << "expected " << zvc_dimension(genus) << " coordinates, got " << coords.size();
    throw ChartViolation(os.str());
  }
  for (double c : coords)
    if (!std::isfinite(c)) throw ChartViolation("non-finite coordinate");
  const int pairs = 2 * genus;
  for (int k = 0; k < pairs - 2; ++k)
    if (!(coords[k] > 0.0)) throw ChartViolation("side length must be positive");
  for (std::size_t k = pairs - 2; k < coords.size(); ++k)
    if (!(coords[k] > 0.0 && coords[k] < M_PI))
      throw ChartViolation("angle coordinate outside (0, pi)");

  RVec3 u = cached_fixture(genus).unknowns;
  double res = solve_closure(genus, coords, u);
  if (!(res < kClosureTolerance)) {
    // Continuation from the fixture along a straight chart segment.
    const auto& start = zvc_fixture(genus);
    u = cached_fixture(genus).unknowns;
    for (int steps : {8, 32}) {
      RVec3 v = u;
      bool ok = true;
      for (int s = 1; s <= steps && ok; ++s) {
        const double t = static_cast<double>(s) / steps;
        std::vector<double> c(coords.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = (1.0 - t) * start[i] + t * coords[i];
        ok = solve_closure(genus, c, v) < kClosureTolerance;
      }
      if (ok) {
        u = v;
        res = solve_closure(genus, coords, u);
        break;
      }
    }
  }
  if (!(res < kClosureTolerance)) throw ChartViolation("closure solve did not converge");
  return finish_polygon(genus, coords, u, res);
}

const std::vector<double>& zvc_fixture(int genus) {
  if (genus < 2) throw ChartViolation("genus must be at least 2");
  return cached_fixture(genus).coords;
}

FuchsianGroup FuchsianGroup::from_polygon_vertices(int genus,
                                                   std::vector<MinkowskiPoint> vertices) {
  const int m = static_cast<int>(vertices.size());
  if (m != 4 * genus) throw PairingFailure("polygon must have 4g vertices");
  std::vector<RMat3> frames;
  std::vector<Real> lengths;
  for (int j = 0; j < m; ++j) {
    const RVec3 a = extended(vertices[j]);
    const RVec3 b = extended(vertices[(j + 1) % m]);
    frames.push_back(frame_towards(a, b));
    lengths.push_back(std::acosh(-form3(a, b)));
  }
  return from_pairings(genus, std::move(vertices), pairings_from_frames(genus, frames, lengths));
}

FuchsianGroup FuchsianGroup::from_pairings(int genus, std::vector<MinkowskiPoint> vertices,
                                           const std::vector<Mat3>& pairings) {
  const auto pattern = canonical_side_pattern(genus);
  const int m = static_cast<int>(pattern.size());
  if (static_cast<int>(vertices.size()) != m || static_cast<int>(pairings.size()) != 2 * genus)
    throw PairingFailure("polygon must have 4g sides and 2g pairings");
  FuchsianGroup grp;
  grp.genus_ = genus;
  grp.polygon_ = std::move(vertices);
  auto vert = [&](int j) { return plane_coords(grp.polygon_[((j % m) + m) % m]); };

  for (int k = 0; k < 2 * genus; ++k) {
    const int j = side_index(genus, k, false);
    const int jb = side_index(genus, k, true);
    const Isometry g = extend_to_h3(pairings[k]);
    const double miss =
        std::max(distance(g.apply(plane_point(vert(j))), plane_point(vert(jb + 1))),
                 distance(g.apply(plane_point(vert(j + 1))), plane_point(vert(jb))));
    if (!(miss < 1e-6)) {
      std::ostringstream os;
      os << "generator " << k << " misses the paired side by " << miss;
      throw PairingFailure(os.str());
    }
    grp.generators_.push_back(g);
    grp.inverses_.push_back(g.inverse());
  }

  // Vertex cycle of V_0: side j maps V_j to V_{σ(j)+1}.
  Mat4 composite = Mat4::Identity();
  std::vector<double> angles(m);
  for (int j = 0; j < m; ++j) {
    const Vec3 prev = vert(j - 1), here = vert(j), next = vert(j + 1);
    angles[j] = hyperbolic_angle(distance(plane_point(prev), plane_point(next)),
                                 distance(plane_point(here), plane_point(prev)),
                                 distance(plane_point(here), plane_point(next)));
  }
  int v = 0;
  for (int step = 0; step < m; ++step) {
    const Side& s = pattern[v];
    const char c = s.bar ? static_cast<char>('A' + s.pair) : static_cast<char>('a' + s.pair);
    composite = grp.letter(c).matrix() * composite;
    grp.relator_.insert(grp.relator_.begin(), c);
    grp.cycle_angle_ += angles[v];
    v = (side_index(genus, s.pair, !s.bar) + 1) % m;
    if (v == 0) break;
  }
  grp.relation_residual_ = (composite - Mat4::Identity()).cwiseAbs().maxCoeff();
  return grp;
}

const Isometry& FuchsianGroup::letter(char c) const {
  if (std::islower(static_cast<unsigned char>(c))) return generators_.at(c - 'a');
  return inverses_.at(c - 'A');
}

Isometry FuchsianGroup::element(const Word& w) const {
  Mat4 m = Mat4::Identity();
  for (char c : w) m = m * letter(c).matrix();
  return Isometry::trusted(m);
}

double FuchsianGroup::polygon_area() const {
  double area = 0.0;
  const std::size_t m = polygon_.size();
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double a = distance(polygon_[i], polygon_[i + 1]);
    const double b = distance(polygon_[0], polygon_[i + 1]);
    const double c = distance(polygon_[0], polygon_[i]);
    area += M_PI - hyperbolic_angle(a, b, c) - hyperbolic_angle(b, c, a) -
            hyperbolic_angle(c, a, b);
  }
  return area;
}

MinkowskiPoint FuchsianGroup::interior_point() const {
  Vec4 s = Vec4::Zero();
  for (const auto& p : polygon_) s += p.coords();
  return MinkowskiPoint::normalized(s);
}

bool FuchsianGroup::contains(const MinkowskiPoint& p, double margin) const {
  const std::size_t m = polygon_.size();
  const Vec3 x = plane_coords(p);
  for (std::size_t j = 0; j < m; ++j)
    if (!(left_of(plane_coords(polygon_[j]), plane_coords(polygon_[(j + 1) % m]), x) > margin))
      return false;
  return true;
}

FuchsianGroup regular_group(int genus) {
  if (genus < 2) throw ChartViolation("genus must be at least 2");
  const int m = 4 * genus;
  const double alpha = 2.0 * M_PI / m;
  const double radius = std::acosh(1.0 / std::tan(M_PI / m) / std::tan(alpha / 2.0));
  std::vector<MinkowskiPoint> verts;
  for (int j = 0; j < m; ++j) {
    const double phi = 2.0 * M_PI * j / m;
    verts.push_back(plane_point(Vec3(std::sinh(radius) * std::cos(phi),
                                     std::sinh(radius) * std::sin(phi), std::cosh(radius))));
  }
  return FuchsianGroup::from_polygon_vertices(genus, std::move(verts));
}

FuchsianGroup group_from_polygon(const ZVCPolygon& p) {
  if (static_cast<int>(p.pairings.size()) == 2 * p.genus)
    return FuchsianGroup::from_pairings(p.genus, p.vertices, p.pairings);
  return FuchsianGroup::from_polygon_vertices(p.genus, p.vertices);
}

Isometry extend_to_h3(const Mat3& h) {
  const Mat3 j = gram3().cast<double>();
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() * h.cwiseAbs().maxCoeff());
  if (!h.allFinite() ||
      (h.transpose() * j * h - j).cwiseAbs().maxCoeff() > kIsometryTolerance * scale)
    throw NotAnIsometry("matrix does not preserve the 2+1 form");
  return Isometry::from_matrix(embed_plane_matrix(h));
}

// ---------------------------------------------------------------------------

ElementCatalog::ElementCatalog(FuchsianGroup group, std::size_t max_elements)
    : group_(std::move(group)), reference_(group_.interior_point()),
      max_elements_(max_elements) {
  insert(grid_, entries_, Entry{"", Isometry(), reference_.coords(), 0});
  level_end_.push_back(1);
  level_ = 0;
}

void ElementCatalog::cell_of(const Vec4& image, long cell[3]) {
  constexpr double h = 1e-4;
  cell[0] = static_cast<long>(std::floor(image(0) / (h * image(3))));
  cell[1] = static_cast<long>(std::floor(image(1) / (h * image(3))));
  cell[2] = static_cast<long>(std::floor(std::log(image(3)) / h));
}

ElementCatalog::Key ElementCatalog::cell_key(long ix, long iy, long iz) {
  return (static_cast<Key>(ix) * 73856093LL) ^ (static_cast<Key>(iy) * 19349663LL) ^
         (static_cast<Key>(iz) * 83492791LL);
}

long ElementCatalog::search(const Grid& grid, const std::vector<Entry>& list, const Vec4& image) {
  long cell[3];
  cell_of(image, cell);
  for (long dx = -1; dx <= 1; ++dx)
    for (long dy = -1; dy <= 1; ++dy)
      for (long dz = -1; dz <= 1; ++dz) {
        auto range = grid.equal_range(cell_key(cell[0] + dx, cell[1] + dy, cell[2] + dz));
        for (auto it = range.first; it != range.second; ++it) {
          const Vec4& other = list[it->second].image;
          if ((other - image).norm() < 1e-7 * image(3)) return static_cast<long>(it->second);
        }
      }
  return -1;
}

void ElementCatalog::insert(Grid& grid, std::vector<Entry>& list, Entry e) {
  long cell[3];
  cell_of(e.image, cell);
  grid.emplace(cell_key(cell[0], cell[1], cell[2]), list.size());
  list.push_back(std::move(e));
}

void ElementCatalog::ensure_level(int L) {
  std::string alphabet;
  for (int k = 0; k < 2 * group_.genus(); ++k) alphabet.push_back(static_cast<char>('A' + k));
  for (int k = 0; k < 2 * group_.genus(); ++k) alphabet.push_back(static_cast<char>('a' + k));
  while (level_ < L) {
    const std::size_t begin = level_ == 0 ? 0 : level_end_[level_ - 1];
    const std::size_t end = level_end_[level_];
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Word parent_word = entries_[idx].word;
      const Mat4 parent = entries_[idx].g.matrix();
      for (char c : alphabet) {
        if (!parent_word.empty() && parent_word.back() == inverse_letter(c)) continue;
        const Mat4 g = parent * group_.letter(c).matrix();
        const Vec4 image = MinkowskiPoint::normalized(g * reference_.coords()).coords();
        if (search(grid_, entries_, image) >= 0) continue;
        if (entries_.size() >= max_elements_) {
          std::ostringstream os;
          os << "element budget of " << max_elements_ << " exhausted at word length "
             << level_ + 1;
          throw TruncationUnstable(os.str());
        }
        insert(grid_, entries_, Entry{parent_word + c, Isometry::trusted(g), image, level_ + 1});
      }
    }
    level_end_.push_back(entries_.size());
    ++level_;
  }
}

std::size_t ElementCatalog::count_up_to(int L) const {
  if (L < 0) return 0;
  return level_end_[std::min(L, level_)];
}

long ElementCatalog::find(const Vec4& image) const { return search(grid_, entries_, image); }

Word ElementCatalog::canonical(const Mat4& m, const Word& fallback) {
  const Vec4 image = MinkowskiPoint::normalized(m * reference_.coords()).coords();
  long idx = search(grid_, entries_, image);
  if (idx >= 0) return entries_[idx].word;
  idx = search(extras_grid_, extras_, image);
  if (idx >= 0) return extras_[idx].word;
  const Word reduced = reduce_word(fallback);
  const int want = static_cast<int>(reduced.size());
  if (want > level_ && want <= 6) {
    try {
      ensure_level(want);
    } catch (const TruncationUnstable&) {
    }
    idx = search(grid_, entries_, image);
    if (idx >= 0) return entries_[idx].word;
  }
  insert(extras_grid_, extras_, Entry{reduced, Isometry::trusted(m), image, want});
  return reduced;
}

OrbitPointSet enumerate_orbit(const FuchsianGroup& group, const std::vector<MinkowskiPoint>& seeds,
                              int L) {
  OrbitPointSet out;
  out.seeds = seeds;
  out.max_word_length = std::max(L, 0);
  ElementCatalog catalog(group);
  catalog.ensure_level(out.max_word_length);
  const std::size_t count = catalog.count_up_to(out.max_word_length);

  constexpr double h = 1e-6;
  std::unordered_multimap<long long, std::size_t> grid;
  auto key_of = [&](const Vec4& x, long dx, long dy, long dz) {
    const long ix = static_cast<long>(std::floor(x(0) / (h * x(3)))) + dx;
    const long iy = static_cast<long>(std::floor(x(1) / (h * x(3)))) + dy;
    const long iz = static_cast<long>(std::floor(x(2) / (h * x(3)))) + dz;
    return (static_cast<long long>(ix) * 73856093LL) ^ (static_cast<long long>(iy) * 19349663LL) ^
           (static_cast<long long>(iz) * 83492791LL);
  };
  for (std::size_t e = 0; e < count; ++e) {
    const auto& entry = catalog.entries()[e];
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const MinkowskiPoint p = entry.g.apply(seeds[s]);
      bool dup = false;
      for (long dx = -1; dx <= 1 && !dup; ++dx)
        for (long dy = -1; dy <= 1 && !dup; ++dy)
          for (long dz = -1; dz <= 1 && !dup; ++dz) {
            auto range = grid.equal_range(key_of(p.coords(), dx, dy, dz));
            for (auto it = range.first; it != range.second; ++it)
              if (distance(out.points[it->second].point, p) < 1e-9) {
                dup = true;
                break;
              }
          }
      if (dup) continue;
      grid.emplace(key_of(p.coords(), 0, 0, 0), out.points.size());
      out.points.push_back({p, static_cast<int>(s), entry.word});
    }
  }
  return out;
}

} // namespace fuchsian
