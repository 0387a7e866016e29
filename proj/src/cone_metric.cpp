#include "fuchsian/cone_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "fuchsian/hyperbolic.hpp"

namespace fuchsian {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::string slot_name(int slot) {
  std::ostringstream os;
  os << "slot " << slot << " (triangle " << slot / 3 << ", edge " << slot % 3 << ")";
  return os.str();
}

} // namespace

double ConeMetricSurface::corner_angle(int t, int s) const {
  // Corner s is between edges s-1 and s; the opposite edge is s+1.
  const double opposite = slot_length(t, (s + 1) % 3);
  const double b = slot_length(t, s);
  const double c = slot_length(t, (s + 2) % 3);
  return hyperbolic_angle(opposite, b, c);
}

std::vector<std::string> ConeMetricSurface::canonical_edge_order() const {
  struct Item {
    int lo, hi;
    std::string id;
  };
  std::vector<Item> items;
  for (std::size_t k = 0; k < gluing.size(); ++k) {
    const int slot = gluing[k][0];
    const int t = slot / 3, s = slot % 3;
    const int a = triangles[t][s], b = triangles[t][(s + 1) % 3];
    items.push_back({std::min(a, b), std::max(a, b), edge_ids[k]});
  }
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    if (x.lo != y.lo) return x.lo < y.lo;
    if (x.hi != y.hi) return x.hi < y.hi;
    if (x.id.size() != y.id.size()) return x.id.size() < y.id.size();
    return x.id < y.id;
  });
  std::vector<std::string> out;
  for (const auto& it : items) out.push_back(it.id);
  return out;
}

ConeMetricSurface validate(const ConeMetricSurface& raw) {
  ConeMetricSurface m = raw;
  const int T = static_cast<int>(m.triangles.size());
  if (T == 0) throw GluingMismatch("no triangles");
  if (m.genus < 0) throw EulerMismatch("negative genus");

  // Labels must be 0..n-1.
  std::set<int> labels;
  for (int t = 0; t < T; ++t)
    for (int v : m.triangles[t]) {
      if (v < 0) throw GluingMismatch("negative vertex label in triangle " + std::to_string(t));
      labels.insert(v);
    }
  m.n = static_cast<int>(labels.size());
  if (*labels.rbegin() != m.n - 1) throw GluingMismatch("vertex labels are not 0..n-1");

  // Gluing: a fixed-point-free involution on the 3T slots.
  if (static_cast<int>(m.gluing.size()) * 2 != 3 * T)
    throw GluingMismatch("gluing must pair all " + std::to_string(3 * T) + " edge slots");
  std::vector<int> partner(3 * T, -1);
  for (const auto& pair : m.gluing) {
    for (int slot : pair)
      if (slot < 0 || slot >= 3 * T) throw GluingMismatch("slot index out of range: " + std::to_string(slot));
    if (pair[0] == pair[1]) throw GluingMismatch(slot_name(pair[0]) + " glued to itself");
    for (int slot : pair)
      if (partner[slot] >= 0) throw GluingMismatch(slot_name(slot) + " glued twice");
    partner[pair[0]] = pair[1];
    partner[pair[1]] = pair[0];
  }

  if (m.edge_ids.empty())
    for (std::size_t k = 0; k < m.gluing.size(); ++k) m.edge_ids.push_back("e" + std::to_string(k));
  if (m.edge_ids.size() != m.gluing.size())
    throw GluingMismatch("edge_ids must parallel the gluing list");
  std::set<std::string> distinct(m.edge_ids.begin(), m.edge_ids.end());
  if (distinct.size() != m.edge_ids.size()) throw GluingMismatch("duplicate edge id");
  m.slot_edges.assign(T, {});
  for (std::size_t k = 0; k < m.gluing.size(); ++k) {
    const std::string& id = m.edge_ids[k];
    auto it = m.lengths.find(id);
    if (it == m.lengths.end()) throw GluingMismatch("edge " + id + " has no length");
    if (!(it->second > 0.0) || !std::isfinite(it->second))
      throw TriangleInequality("edge " + id + " has non-positive length");
    for (int slot : m.gluing[k]) m.slot_edges[slot / 3][slot % 3] = id;
    const int a = m.gluing[k][0], b = m.gluing[k][1];
    const auto& ta = m.triangles[a / 3];
    const auto& tb = m.triangles[b / 3];
    if (ta[a % 3] != tb[(b % 3 + 1) % 3] || ta[(a % 3 + 1) % 3] != tb[b % 3])
      throw GluingMismatch("edge " + id + ": " + slot_name(a) + " and " + slot_name(b) +
                           " join different vertices");
  }
  if (m.lengths.size() != m.edge_ids.size()) throw GluingMismatch("lengths name unknown edges");

  // Corners glued through edges must form one class per label.
  std::vector<int> parent(3 * T);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& pair : m.gluing) {
    const int ta = pair[0] / 3, sa = pair[0] % 3, tb = pair[1] / 3, sb = pair[1] % 3;
    parent[find_root(parent, 3 * ta + sa)] = find_root(parent, 3 * tb + (sb + 1) % 3);
    parent[find_root(parent, 3 * ta + (sa + 1) % 3)] = find_root(parent, 3 * tb + sb);
  }
  std::vector<std::set<int>> classes(m.n);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < 3; ++s) classes[m.triangles[t][s]].insert(find_root(parent, 3 * t + s));
  for (int v = 0; v < m.n; ++v)
    if (classes[v].size() != 1)
      throw GluingMismatch("vertex " + std::to_string(v) + " is split into " +
                           std::to_string(classes[v].size()) + " cone points");

  const int euler = m.n - static_cast<int>(m.gluing.size()) + T;
  if (euler != 2 - 2 * m.genus) {
    std::ostringstream os;
    os << "Euler characteristic " << euler << " does not match genus " << m.genus;
    throw EulerMismatch(os.str());
  }

  for (int t = 0; t < T; ++t) {
    const double a = m.slot_length(t, 0), b = m.slot_length(t, 1), c = m.slot_length(t, 2);
    if (!(a < b + c && b < a + c && c < a + b))
      throw TriangleInequality("triangle " + std::to_string(t) + " violates the triangle inequality");
  }

  m.cone_angles.assign(m.n, 0.0);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < 3; ++s) m.cone_angles[m.triangles[t][s]] += m.corner_angle(t, s);
  for (int v = 0; v < m.n; ++v)
    if (!(m.cone_angles[v] > 0.0 && m.cone_angles[v] < 2.0 * M_PI)) {
      std::ostringstream os;
      os.precision(17);
      os << "cone angle " << m.cone_angles[v] << " at vertex " << v << " outside (0, 2pi)";
      throw AngleOutOfRange(os.str());
    }
  if (!m.corner_words.empty() && static_cast<int>(m.corner_words.size()) != T)
    throw GluingMismatch("corner_words must parallel the triangles");
  return m;
}

std::vector<double> edge_vector(const ConeMetricSurface& m, const std::vector<std::string>& keys) {
  if (keys.size() != m.lengths.size()) {
    std::ostringstream os;
    os << "labeling has " << keys.size() << " edges, metric has " << m.lengths.size();
    throw LabelMismatch(os.str());
  }
  std::vector<double> out;
  for (const auto& k : keys) {
    auto it = m.lengths.find(k);
    if (it == m.lengths.end()) throw LabelMismatch("edge " + k + " not in metric");
    out.push_back(it->second * it->second);
  }
  return out;
}

double total_area(const ConeMetricSurface& m) {
  double area = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    area += M_PI - m.corner_angle(t, 0) - m.corner_angle(t, 1) - m.corner_angle(t, 2);
  return area;
}

double gauss_bonnet_area(const ConeMetricSurface& m) {
  double area = 2.0 * M_PI * (2 * m.genus - 2);
  for (double theta : m.cone_angles) area += 2.0 * M_PI - theta;
  return area;
}

ConeMetricSurface with_lengths(const ConeMetricSurface& m, const std::map<std::string, double>& lengths) {
  ConeMetricSurface out = m;
  out.lengths = lengths;
  return validate(out);
}

} // namespace fuchsian
