#include "fuchsian/polyhedron.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fuchsian {

namespace {

constexpr int kSeedLevel = 3;
constexpr double kStrictTolerance = 1e-10;
constexpr double kFaceTolerance = 1e-10;

Vec3 klein(const MinkowskiPoint& p) { return klein_map(p).k; }

// Orbit points currently fed to the hull.
struct Cloud {
  std::vector<VertexLabel> labels;
  std::vector<Vec3> points;
  std::map<VertexLabel, int> index;

  bool add(const VertexLabel& label, const Vec3& x) {
    if (index.count(label)) return false;
    index.emplace(label, static_cast<int>(labels.size()));
    labels.push_back(label);
    points.push_back(x);
    return true;
  }
};

struct Context {
  PolyhedronParams params;
  std::shared_ptr<const FuchsianGroup> group;
  std::vector<MinkowskiPoint> seeds;
  ElementCatalog catalog;

  Context(const PolyhedronParams& p, std::size_t max_elements)
      : params(p), group(std::make_shared<const FuchsianGroup>(make_group(p))),
        seeds(seed_points(p, *group)), catalog(*group, max_elements) {}

  void add_level(Cloud& cloud, int level) {
    catalog.ensure_level(level);
    const std::size_t begin = catalog.count_up_to(level - 1);
    const std::size_t end = catalog.count_up_to(level);
    for (std::size_t e = begin; e < end; ++e) {
      const auto& entry = catalog.entries()[e];
      for (int i = 0; i < params.n(); ++i)
        cloud.add(VertexLabel{i, entry.word}, klein(entry.g.apply(seeds[i])));
    }
  }
};

std::string describe(const VertexLabel& v) { return v.str(); }

std::string describe_triangle(const std::array<VertexLabel, 3>& t) {
  return "[" + describe(t[0]) + ", " + describe(t[1]) + ", " + describe(t[2]) + "]";
}

// Strict-vertex test of every seed against the hull of the rest of the cloud.
ConvexityReport strict_vertex_report(const Cloud& cloud, int n) {
  ConvexityReport report;
  for (int i = 0; i < n; ++i) {
    const int self = cloud.index.at(VertexLabel{i, ""});
    std::vector<Vec3> others;
    std::vector<int> ids;
    for (int k = 0; k < static_cast<int>(cloud.points.size()); ++k)
      if (k != self) others.push_back(cloud.points[k]), ids.push_back(k);
    const ConvexHull hull = convex_hull(others);
    const Vec3& x = cloud.points[self];

    // Upper triangle whose projection contains the projection of x.
    int best = -1;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < hull.triangles.size(); ++t) {
      if (!(hull.normals[t](2) > 0.0)) continue;
      const auto& tri = hull.triangles[t];
      const Vec3 &a = others[tri[0]], &b = others[tri[1]], &c = others[tri[2]];
      const double area = (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
      if (!(area > 0.0)) continue;
      auto edge = [&](const Vec3& p, const Vec3& q) {
        return ((q(0) - p(0)) * (x(1) - p(1)) - (q(1) - p(1)) * (x(0) - p(0))) / area;
      };
      const double margin = std::min({edge(a, b), edge(b, c), edge(c, a)});
      if (margin > best_margin) best_margin = margin, best = static_cast<int>(t);
    }
    if (best < 0) {
      report.convex = false;
      report.vertex = i;
      report.witness = "no hull face above the projection of vertex " + std::to_string(i);
      return report;
    }
    const auto& tri = hull.triangles[best];
    const Vec3 &a = others[tri[0]], &b = others[tri[1]], &c = others[tri[2]];
    // (a, c, b) is clockwise seen from above.
    const double det = klein_det3(a, c, b, x);
    const double scale = (a - c).norm() * (a - b).norm() * (a - x).norm();
    const double rel = det / scale;
    if (!(rel > kStrictTolerance)) {
      report.convex = false;
      report.vertex = i;
      report.triangle = {cloud.labels[ids[tri[0]]], cloud.labels[ids[tri[2]]],
                         cloud.labels[ids[tri[1]]]};
      report.det = rel;
      std::ostringstream os;
      os.precision(6);
      os << "vertex " << i << " against " << describe_triangle(report.triangle)
         << ", det = " << rel;
      report.witness = os.str();
      return report;
    }
  }
  return report;
}

using Face = std::vector<VertexLabel>;

// Upper hull faces incident to the seeds, growing the cloud until every
// orbit point of length <= L lies below them.
std::vector<Face> incident_faces(Context& ctx, Cloud& cloud, int& cloud_level, int L) {
  const int n = ctx.params.n();
  for (int round = 0; round < 64; ++round) {
    const ConvexHull hull = convex_hull(cloud.points);
    std::vector<int> incident;
    bool closed = true;
    for (int i = 0; i < n && closed; ++i) {
      const int self = cloud.index.at(VertexLabel{i, ""});
      std::map<int, int> next_of, prev_of;
      int count = 0;
      for (std::size_t f = 0; f < hull.faces.size(); ++f) {
        const auto& verts = hull.faces[f].vertices;
        auto it = std::find(verts.begin(), verts.end(), self);
        if (it == verts.end()) continue;
        if (!(hull.faces[f].normal(2) > 0.0)) {
          closed = false;
          break;
        }
        const std::size_t k = static_cast<std::size_t>(it - verts.begin());
        next_of[verts[(k + 1) % verts.size()]] += 1;
        prev_of[verts[(k + verts.size() - 1) % verts.size()]] += 1;
        incident.push_back(static_cast<int>(f));
        ++count;
      }
      if (!closed) break;
      if (count == 0)
        throw NotConvex("vertex " + std::to_string(i) + " is not a vertex of the orbit hull", i,
                        "vertex " + std::to_string(i) + " inside the hull");
      // A closed fan: the successor and predecessor sets coincide.
      if (next_of != prev_of) closed = false;
      for (const auto& [v, c] : next_of)
        if (c != 1) closed = false;
    }
    if (!closed) {
      if (cloud_level >= L)
        throw TruncationUnstable("faces around the fundamental vertices do not close at word length " +
                                 std::to_string(L));
      ctx.add_level(cloud, ++cloud_level);
      continue;
    }

    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    bool grew = false;
    ctx.catalog.ensure_level(L);
    const std::size_t count = ctx.catalog.count_up_to(L);
    for (std::size_t e = 0; e < count; ++e) {
      const auto& entry = ctx.catalog.entries()[e];
      for (int i = 0; i < n; ++i) {
        const VertexLabel label{i, entry.word};
        if (cloud.index.count(label)) continue;
        const Vec3 q = klein(entry.g.apply(ctx.seeds[i]));
        for (int f : incident) {
          const HullFace& face = hull.faces[f];
          if (face.normal.dot(q) - face.offset > -kFaceTolerance) {
            cloud.add(label, q);
            grew = true;
            break;
          }
        }
      }
    }
    if (grew) continue;

    std::vector<Face> faces;
    for (int f : incident) {
      Face face;
      for (int v : hull.faces[f].vertices) face.push_back(cloud.labels[v]);
      faces.push_back(std::move(face));
    }
    return faces;
  }
  throw TruncationUnstable("hull did not settle after repeated growth");
}

Word product(const Word& a, const Word& b) { return reduce_word(a + b); }

// Translates the face so that vertex k becomes fundamental, starting there.
Face rebase(const Face& face, std::size_t k, ElementCatalog& catalog) {
  const Word inv = invert_word(face[k].word);
  Face out;
  for (std::size_t j = 0; j < face.size(); ++j) {
    const VertexLabel& v = face[(k + j) % face.size()];
    out.push_back(VertexLabel{v.index, j == 0 ? Word() : catalog.canonical(product(inv, v.word))});
  }
  return out;
}

std::set<Face> canonical_faces(const std::vector<Face>& faces, ElementCatalog& catalog) {
  std::set<Face> out;
  for (const Face& face : faces) {
    Face best;
    for (std::size_t k = 0; k < face.size(); ++k) {
      Face cand = rebase(face, k, catalog);
      if (best.empty() || std::lexicographical_compare(cand.begin(), cand.end(), best.begin(), best.end()))
        best = std::move(cand);
    }
    out.insert(std::move(best));
  }
  return out;
}

bool edge_less(const EdgeLabel& a, const EdgeLabel& b) {
  if (a.i != b.i) return a.i < b.i;
  if (a.j != b.j) return a.j < b.j;
  return shortlex_less(a.word, b.word);
}

Labeling fan_labeling(const std::set<Face>& faces, ElementCatalog& catalog, int genus, int n) {
  Labeling lab;
  lab.genus = genus;
  lab.n = n;
  std::map<std::string, EdgeLabel> edges;
  auto note_edge = [&](const VertexLabel& p, const VertexLabel& q, bool diagonal) {
    EdgeLabel e = canonical_edge(p, q, catalog);
    auto it = edges.find(e.key);
    if (it == edges.end()) {
      e.additional = diagonal;
      edges.emplace(e.key, e);
    } else if (it->second.additional != diagonal) {
      throw TruncationUnstable("edge " + e.key + " is both a face edge and a diagonal");
    }
    return e.key;
  };
  for (const Face& face : faces) {
    const std::size_t m = face.size();
    for (std::size_t j = 0; j < m; ++j) note_edge(face[j], face[(j + 1) % m], false);
  }
  for (const Face& face : faces) {
    const std::size_t m = face.size();
    for (std::size_t j = 1; j + 1 < m; ++j) {
      TriangleLabel t;
      t.corners = {face[0], face[j], face[j + 1]};
      for (int s = 0; s < 3; ++s) {
        const bool boundary = (s == 1) || (s == 0 && j == 1) || (s == 2 && j + 2 == m);
        t.edge_keys[s] = note_edge(t.corners[s], t.corners[(s + 1) % 3], !boundary);
      }
      lab.triangles.push_back(t);
    }
  }
  for (auto& [key, e] : edges) lab.edges.push_back(e);
  std::sort(lab.edges.begin(), lab.edges.end(), edge_less);
  attach_edge_sides(lab, catalog);
  return lab;
}

} // namespace

Eigen::VectorXd PolyhedronParams::to_vector() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(zvc.size()) + 3 * n());
  int k = 0;
  for (double z : zvc) x(k++) = z;
  for (const auto& b : base_points) x(k++) = b[0], x(k++) = b[1];
  for (double d : heights) x(k++) = d;
  return x;
}

PolyhedronParams PolyhedronParams::with_vector(const Eigen::VectorXd& x) const {
  if (!regular) return from_vector(genus, n(), x);
  Eigen::VectorXd full(zvc_dimension(genus) + x.size());
  full << Eigen::VectorXd::Zero(zvc_dimension(genus)), x;
  PolyhedronParams p = from_vector(genus, n(), full);
  p.zvc.clear();
  p.regular = true;
  return p;
}

PolyhedronParams PolyhedronParams::from_vector(int genus, int n, const Eigen::VectorXd& x) {
  PolyhedronParams p;
  p.genus = genus;
  const int z = zvc_dimension(genus);
  if (x.size() != z + 3 * n) throw InvalidPoint("parameter vector has the wrong dimension");
  int k = 0;
  for (int i = 0; i < z; ++i) p.zvc.push_back(x(k++));
  for (int i = 0; i < n; ++i) {
    const double u = x(k++);
    const double v = x(k++);
    p.base_points.push_back({u, v});
  }
  for (int i = 0; i < n; ++i) p.heights.push_back(x(k++));
  return p;
}

FuchsianGroup make_group(const PolyhedronParams& params) {
  if (params.regular) return regular_group(params.genus);
  if (static_cast<int>(params.zvc.size()) != zvc_dimension(params.genus))
    throw ChartViolation("expected " + std::to_string(zvc_dimension(params.genus)) + " ZVC coordinates");
  return group_from_polygon(build_polygon(params.genus, params.zvc));
}

std::vector<MinkowskiPoint> seed_points(const PolyhedronParams& params, const FuchsianGroup& group) {
  if (params.n() < 1) throw InvalidPoint("at least one vertex is required");
  if (params.base_points.size() != params.heights.size())
    throw InvalidPoint("base_points and heights differ in length");
  std::vector<MinkowskiPoint> out;
  for (int i = 0; i < params.n(); ++i) {
    const double d = params.heights[i];
    if (!(d > 0.0) || !std::isfinite(d))
      throw InvalidPoint("height of vertex " + std::to_string(i) + " must be positive");
    const auto& b = params.base_points[i];
    const MinkowskiPoint y = plane_point_from_klein(b[0], b[1]);
    if (!group.contains(y))
      throw InvalidPoint("base point of vertex " + std::to_string(i) +
                         " lies outside the fundamental polygon");
    out.push_back(lift_to_height(y, d));
  }
  return out;
}

std::string VertexLabel::str() const { return std::to_string(index) + ":" + word; }

int Labeling::edge_index(const std::string& key) const {
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (edges[k].key == key) return static_cast<int>(k);
  return -1;
}

std::vector<std::string> Labeling::keys() const {
  std::vector<std::string> out;
  for (const auto& e : edges) out.push_back(e.key);
  return out;
}

std::string edge_key(int i, int j, const Word& w) {
  return std::to_string(i) + "-" + std::to_string(j) + ":" + w;
}

EdgeLabel canonical_edge(const VertexLabel& p, const VertexLabel& q, ElementCatalog& catalog) {
  EdgeLabel e;
  if (p.index < q.index) {
    e.i = p.index, e.j = q.index;
    e.word = catalog.canonical(product(invert_word(p.word), q.word));
  } else if (p.index > q.index) {
    e.i = q.index, e.j = p.index;
    e.word = catalog.canonical(product(invert_word(q.word), p.word));
  } else {
    e.i = e.j = p.index;
    const Word w1 = catalog.canonical(product(invert_word(p.word), q.word));
    const Word w2 = catalog.canonical(product(invert_word(q.word), p.word));
    e.word = shortlex_less(w2, w1) ? w2 : w1;
  }
  e.key = edge_key(e.i, e.j, e.word);
  return e;
}

VertexLabel translate(const Word& w, const VertexLabel& label, ElementCatalog& catalog) {
  return VertexLabel{label.index, catalog.canonical(product(w, label.word))};
}

void attach_edge_sides(Labeling& labeling, ElementCatalog& catalog) {
  std::map<std::string, std::pair<int, int>> seen;  // key -> (left count, right count)
  for (const auto& t : labeling.triangles) {
    for (int s = 0; s < 3; ++s) {
      const VertexLabel& p = t.corners[s];
      const VertexLabel& q = t.corners[(s + 1) % 3];
      const VertexLabel& r = t.corners[(s + 2) % 3];
      const int idx = labeling.edge_index(t.edge_keys[s]);
      if (idx < 0) throw LabelMismatch("triangle edge " + t.edge_keys[s] + " is not in the labeling");
      EdgeLabel& e = labeling.edges[idx];
      const bool forward = p.index == e.i && q.index == e.j &&
                           catalog.canonical(product(invert_word(p.word), q.word)) == e.word;
      if (forward) {
        e.left = translate(invert_word(p.word), r, catalog);
        seen[e.key].first += 1;
      } else {
        e.right = translate(invert_word(q.word), r, catalog);
        seen[e.key].second += 1;
      }
    }
  }
  for (const auto& e : labeling.edges) {
    const auto it = seen.find(e.key);
    if (it == seen.end() || it->second.first != 1 || it->second.second != 1)
      throw TruncationUnstable("edge " + e.key + " does not border exactly two triangles");
  }
}

MinkowskiPoint FuchsianPolyhedron::point(const VertexLabel& v) const {
  return group->element(v.word).apply(vertices[v.index]);
}

std::vector<EdgeLabel> FuchsianPolyhedron::face_edges() const {
  std::vector<EdgeLabel> out;
  for (const auto& e : labeling.edges)
    if (!e.additional) out.push_back(e);
  return out;
}

std::vector<EdgeLabel> FuchsianPolyhedron::edges() const {
  return triangulated ? labeling.edges : face_edges();
}

ConvexityReport check_convexity(const PolyhedronParams& params, int L) {
  Context ctx(params, 400000);
  Cloud cloud;
  for (int level = 0; level <= std::min(L, kSeedLevel); ++level) ctx.add_level(cloud, level);
  return strict_vertex_report(cloud, params.n());
}

FuchsianPolyhedron build(const PolyhedronParams& params, const BuildOptions& options) {
  Context ctx(params, options.max_elements);
  Cloud cloud;
  int cloud_level = 0;
  for (; cloud_level <= kSeedLevel; ++cloud_level) ctx.add_level(cloud, cloud_level);
  --cloud_level;

  const ConvexityReport report = strict_vertex_report(cloud, params.n());
  if (!report.convex) throw NotConvex(report.witness, report.vertex, report.witness);

  std::set<Face> previous;
  int stable = -1;
  for (int L = kSeedLevel; L <= options.max_word_length; ++L) {
    const std::set<Face> faces = canonical_faces(incident_faces(ctx, cloud, cloud_level, L), ctx.catalog);
    if (L > kSeedLevel && faces == previous) {
      stable = L;
      break;
    }
    previous = faces;
  }
  if (stable < 0)
    throw TruncationUnstable("face set still changing at word length " +
                             std::to_string(options.max_word_length));

  FuchsianPolyhedron poly;
  poly.params = params;
  poly.group = ctx.group;
  poly.vertices = ctx.seeds;
  poly.stable_word_length = stable;
  for (const Face& f : previous) poly.faces.push_back(PolyhedronFace{f});
  poly.labeling = fan_labeling(previous, ctx.catalog, params.genus, params.n());

  const int expected = 6 * params.genus - 6 + 3 * params.n();
  if (static_cast<int>(poly.labeling.edges.size()) != expected ||
      3 * static_cast<int>(poly.labeling.triangles.size()) != 2 * expected) {
    std::ostringstream os;
    os << "fundamental triangulation has " << poly.labeling.edges.size() << " edges and "
       << poly.labeling.triangles.size() << " triangles, expected " << expected << " and "
       << 2 * expected / 3;
    throw TruncationUnstable(os.str());
  }
  return poly;
}

ConeMetricSurface induced_metric(const FuchsianPolyhedron& p) {
  ConeMetricSurface m;
  m.genus = p.params.genus;
  const Labeling& lab = p.labeling;
  std::map<std::string, std::vector<int>> slots;
  for (std::size_t t = 0; t < lab.triangles.size(); ++t) {
    const auto& tri = lab.triangles[t];
    m.triangles.push_back({tri.corners[0].index, tri.corners[1].index, tri.corners[2].index});
    m.corner_words.push_back({tri.corners[0].word, tri.corners[1].word, tri.corners[2].word});
    for (int s = 0; s < 3; ++s) slots[tri.edge_keys[s]].push_back(static_cast<int>(3 * t + s));
  }
  for (const auto& e : lab.edges) {
    const auto& pair = slots.at(e.key);
    m.gluing.push_back({pair.at(0), pair.at(1)});
    m.edge_ids.push_back(e.key);
    m.lengths[e.key] = distance(p.vertices[e.i], p.point(VertexLabel{e.j, e.word}));
  }
  try {
    return validate(m);
  } catch (const AngleOutOfRange& err) {
    throw AngleOverflow(err.what());
  }
}

FuchsianPolyhedron triangulate(const FuchsianPolyhedron& p) {
  FuchsianPolyhedron out = p;
  out.triangulated = true;
  return out;
}

std::string export_obj(const FuchsianPolyhedron& p, int copies) {
  ElementCatalog catalog(*p.group);
  catalog.ensure_level(std::max(copies, 0));
  std::ostringstream os;
  os << "# genus " << p.params.genus << ", " << p.params.n() << " vertices, copies " << copies << "\n";
  char line[128];
  int next = 1;
  const std::size_t count = catalog.count_up_to(std::max(copies, 0));
  for (std::size_t e = 0; e < count; ++e) {
    const Isometry& g = catalog.entries()[e].g;
    for (const auto& face : p.faces) {
      std::vector<int> ids;
      for (const auto& v : face.vertices) {
        const Vec3 k = klein(g.apply(p.point(v)));
        std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", k(0), k(1), k(2));
        os << line;
        ids.push_back(next++);
      }
      os << "f";
      for (int id : ids) os << " " << id;
      os << "\n";
    }
  }
  return os.str();
}

double orientation_det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
  Mat4 m;
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  m.row(2) = c.transpose();
  m.row(3) = d.transpose();
  return m.determinant() / (a.norm() * b.norm() * c.norm() * d.norm());
}

double klein_det3(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x) {
  Mat3 m;
  m.col(0) = a - b;
  m.col(1) = a - c;
  m.col(2) = a - x;
  return m.determinant();
}

} // namespace fuchsian
