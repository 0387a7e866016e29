#include "fuchsian/convex_hull.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

namespace fuchsian {

namespace {

struct Tri {
  int v[3];
  Vec3 n;
  double off;
  bool alive;
};

Tri make_tri(const std::vector<Vec3>& p, int a, int b, int c) {
  Tri t{{a, b, c}, Vec3::Zero(), 0.0, true};
  Vec3 n = (p[b] - p[a]).cross(p[c] - p[a]);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  t.n = n;
  t.off = n.dot(p[a]);
  return t;
}

long long edge_key(int a, int b, int n) {
  return static_cast<long long>(a) * static_cast<long long>(n) + b;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

} // namespace

double ConvexHull::max_excess(const Vec3& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles.size(); ++t)
    best = std::max(best, normals[t].dot(x) - offsets[t]);
  return best;
}

ConvexHull convex_hull(const std::vector<Vec3>& pts, double visibility_eps, double merge_tol) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw DegenerateTriangle("convex hull needs at least four points");
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  scale = std::max(scale, 1e-300);
  const double eps = visibility_eps * scale;

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (pts[i](0) < pts[i0](0)) i0 = i;
  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (i1 < 0 || best <= eps) throw DegenerateTriangle("all hull points coincide");
  const Vec3 dir = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > best) best = d, i2 = i;
  }
  if (i2 < 0 || best <= eps) throw DegenerateTriangle("all hull points are collinear");
  Tri base = make_tri(pts, i0, i1, i2);
  int i3 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(base.n.dot(pts[i]) - base.off);
    if (d > best) best = d, i3 = i;
  }
  if (i3 < 0 || best <= eps) throw DegenerateTriangle("all hull points are coplanar");
  if (base.n.dot(pts[i3]) - base.off > 0.0) std::swap(i1, i2);

  std::vector<Tri> tris;
  std::unordered_map<long long, int> edges;
  auto add = [&](int a, int b, int c) {
    const int id = static_cast<int>(tris.size());
    tris.push_back(make_tri(pts, a, b, c));
    edges[edge_key(a, b, n)] = id;
    edges[edge_key(b, c, n)] = id;
    edges[edge_key(c, a, n)] = id;
  };
  add(i0, i1, i2);
  add(i0, i3, i1);
  add(i1, i3, i2);
  add(i2, i3, i0);

  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
  std::mt19937 rng(20240601u);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> visible;
  std::vector<char> seen;
  for (int p : order) {
    visible.clear();
    int top = -1;
    double top_excess = eps;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const double excess = tris[t].n.dot(pts[p]) - tris[t].off;
      if (excess > top_excess) top_excess = excess, top = t;
    }
    if (top < 0) continue;
    // Grow the visible region from the most visible face so that it stays
    // connected and its boundary is a single horizon cycle.
    seen.assign(tris.size(), 0);
    seen[top] = 1;
    visible.push_back(top);
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Tri& t = tris[visible[q]];
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(edge_key(t.v[(e + 1) % 3], t.v[e], n));
        if (it == edges.end() || seen[it->second]) continue;
        const Tri& u = tris[it->second];
        if (u.n.dot(pts[p]) - u.off > eps) {
          seen[it->second] = 1;
          visible.push_back(it->second);
        }
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (int t : visible) {
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        auto it = edges.find(edge_key(b, a, n));
        if (it == edges.end() || !seen[it->second]) horizon.emplace_back(a, b);
      }
    }
    for (int t : visible) {
      tris[t].alive = false;
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(edge_key(tris[t].v[e], tris[t].v[(e + 1) % 3], n));
        if (it != edges.end() && it->second == t) edges.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) add(a, b, p);
  }

  ConvexHull hull;
  hull.is_vertex.assign(n, false);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!tris[t].alive) continue;
    hull.triangles.push_back({tris[t].v[0], tris[t].v[1], tris[t].v[2]});
    hull.normals.push_back(tris[t].n);
    hull.offsets.push_back(tris[t].off);
    for (int v : tris[t].v) hull.is_vertex[v] = true;
  }

  // Merge coplanar neighbours.
  const int m = static_cast<int>(hull.triangles.size());
  std::unordered_map<long long, int> tri_of_edge;
  for (int t = 0; t < m; ++t)
    for (int e = 0; e < 3; ++e)
      tri_of_edge[edge_key(hull.triangles[t][e], hull.triangles[t][(e + 1) % 3], n)] = t;
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  const double tol = merge_tol * scale;
  for (int t = 0; t < m; ++t) {
    for (int e = 0; e < 3; ++e) {
      const int a = hull.triangles[t][e], b = hull.triangles[t][(e + 1) % 3];
      auto it = tri_of_edge.find(edge_key(b, a, n));
      if (it == tri_of_edge.end() || it->second < t) continue;
      const int u = it->second;
      const int opp_u = hull.triangles[u][0] + hull.triangles[u][1] + hull.triangles[u][2] - a - b;
      const int opp_t = hull.triangles[t][(e + 2) % 3];
      if (std::abs(hull.normals[t].dot(pts[opp_u]) - hull.offsets[t]) < tol &&
          std::abs(hull.normals[u].dot(pts[opp_t]) - hull.offsets[u]) < tol)
        parent[find_root(parent, u)] = find_root(parent, t);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int t = 0; t < m; ++t) groups[find_root(parent, t)].push_back(t);
  for (const auto& [root, members] : groups) {
    std::map<int, int> next;  // boundary edge a -> b
    Vec3 normal = Vec3::Zero();
    for (int t : members) {
      const auto& tri = hull.triangles[t];
      normal += ((pts[tri[1]] - pts[tri[0]]).cross(pts[tri[2]] - pts[tri[0]]));
      for (int e = 0; e < 3; ++e) {
        const int a = tri[e], b = tri[(e + 1) % 3];
        auto it = tri_of_edge.find(edge_key(b, a, n));
        if (it != tri_of_edge.end() && find_root(parent, it->second) == root) continue;
        next[a] = b;
      }
    }
    HullFace face;
    face.normal = normal.normalized();
    if (next.empty()) continue;
    const int start = next.begin()->first;
    int v = start;
    for (std::size_t guard = 0; guard <= next.size(); ++guard) {
      face.vertices.push_back(v);
      v = next[v];
      if (v == start) break;
    }
    double off = 0.0;
    for (int w : face.vertices) off += face.normal.dot(pts[w]);
    face.offset = off / static_cast<double>(face.vertices.size());
    hull.faces.push_back(std::move(face));
  }
  return hull;
}

} // namespace fuchsian
