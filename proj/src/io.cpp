#include "fuchsian/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fuchsian {

namespace {

using Json = nlohmann::json;
using Path = std::vector<std::string>;

std::string join(const Path& path) {
  std::string out;
  for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
  return out.empty() ? "(root)" : out;
}

Path child(Path path, const std::string& key) {
  path.push_back(key);
  return path;
}

const Json& at_path(const JsonDocument& doc, const Path& path) {
  const Json* node = &doc.root();
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (!node->is_object() || !node->contains(path[k]))
      doc.fail(Path(path.begin(), path.begin() + static_cast<long>(k) + 1), "missing field");
    node = &(*node)[path[k]];
  }
  return *node;
}

double number(const JsonDocument& doc, const Path& path, const Json& v) {
  if (!v.is_number()) doc.fail(path, "expected a number");
  return v.get<double>();
}

int integer(const JsonDocument& doc, const Path& path, const Json& v) {
  if (!v.is_number_integer()) doc.fail(path, "expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const JsonDocument& doc, const Path& path, const Json& v) {
  if (!v.is_array()) doc.fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(doc, path, x));
  return out;
}

template <std::size_t N>
std::vector<std::array<int, N>> int_tuples(const JsonDocument& doc, const Path& path, const Json& v) {
  if (!v.is_array()) doc.fail(path, "expected an array");
  std::vector<std::array<int, N>> out;
  for (const auto& t : v) {
    if (!t.is_array() || t.size() != N) doc.fail(path, "expected entries of " + std::to_string(N) + " integers");
    std::array<int, N> a{};
    for (std::size_t k = 0; k < N; ++k) a[k] = integer(doc, path, t[k]);
    out.push_back(a);
  }
  return out;
}

OrderedJson vec_json(const Vec4& x) { return OrderedJson::array({x(0), x(1), x(2), x(3)}); }

} // namespace

JsonDocument::JsonDocument(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source)) {
  try {
    root_ = nlohmann::json::parse(text_);
  } catch (const nlohmann::json::parse_error& e) {
    // Locate the failing byte.
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text_.size());
    int line = 1, col = 1;
    for (std::size_t k = 0; k < byte; ++k) {
      if (text_[k] == '\n') ++line, col = 1;
      else ++col;
    }
    std::ostringstream os;
    os << source_ << ":" << line << ":" << col << ": malformed JSON";
    throw SchemaError(os.str());
  }
}

JsonDocument JsonDocument::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return JsonDocument(ss.str(), path);
}

int JsonDocument::line_of(const Path& path) const {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::size_t found = text_.find("\"" + key + "\"", pos);
    if (found == std::string::npos) break;
    pos = found;
  }
  return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
}

void JsonDocument::fail(const Path& path, const std::string& message) const {
  std::ostringstream os;
  os << source_ << ":" << line_of(path) << ": " << join(path) << ": " << message;
  throw SchemaError(os.str());
}

void read_group(const JsonDocument& doc, const Path& path, PolyhedronParams& out) {
  const Json& g = at_path(doc, path);
  if (!g.is_object()) doc.fail(path, "expected an object");
  out.genus = integer(doc, child(path, "genus"), at_path(doc, child(path, "genus")));
  if (out.genus < 2) doc.fail(child(path, "genus"), "genus must be at least 2");
  if (g.contains("preset")) {
    const Json& preset = g["preset"];
    if (!preset.is_string() || preset.get<std::string>() != "regular")
      doc.fail(child(path, "preset"), "the only preset is \"regular\"");
    out.regular = true;
    out.zvc.clear();
    return;
  }
  out.regular = false;
  out.zvc = numbers(doc, child(path, "zvc"), at_path(doc, child(path, "zvc")));
  if (static_cast<int>(out.zvc.size()) != zvc_dimension(out.genus))
    doc.fail(child(path, "zvc"), "expected " + std::to_string(zvc_dimension(out.genus)) + " coordinates");
}

PolyhedronParams read_polyhedron(const JsonDocument& doc, const Path& path) {
  PolyhedronParams p;
  if (!at_path(doc, path).is_object()) doc.fail(path, "expected an object");
  read_group(doc, child(path, "group"), p);
  const Path bp = child(path, "base_points");
  const Json& base = at_path(doc, bp);
  if (!base.is_array()) doc.fail(bp, "expected an array of [u, v] pairs");
  for (const auto& b : base) {
    if (!b.is_array() || b.size() != 2) doc.fail(bp, "expected an array of [u, v] pairs");
    p.base_points.push_back({number(doc, bp, b[0]), number(doc, bp, b[1])});
  }
  const Path hp = child(path, "heights");
  p.heights = numbers(doc, hp, at_path(doc, hp));
  if (p.heights.size() != p.base_points.size()) doc.fail(hp, "must have one height per base point");
  if (p.heights.empty()) doc.fail(hp, "at least one vertex is required");
  for (double d : p.heights)
    if (!(d > 0.0)) doc.fail(hp, "heights must be positive");
  return p;
}

ConeMetricSurface read_metric(const JsonDocument& doc, const Path& path) {
  ConeMetricSurface m;
  const Json& root = at_path(doc, path);
  if (!root.is_object()) doc.fail(path, "expected an object");
  m.genus = integer(doc, child(path, "genus"), at_path(doc, child(path, "genus")));
  m.triangles = int_tuples<3>(doc, child(path, "triangles"), at_path(doc, child(path, "triangles")));
  m.gluing = int_tuples<2>(doc, child(path, "gluing"), at_path(doc, child(path, "gluing")));
  const Path lp = child(path, "lengths");
  const Json& lengths = at_path(doc, lp);
  if (!lengths.is_object()) doc.fail(lp, "expected an object of edge id to length");
  for (const auto& [id, v] : lengths.items()) m.lengths[id] = number(doc, child(lp, id), v);
  if (root.contains("edge_ids")) {
    const Path ep = child(path, "edge_ids");
    if (!root["edge_ids"].is_array()) doc.fail(ep, "expected an array of strings");
    for (const auto& id : root["edge_ids"]) {
      if (!id.is_string()) doc.fail(ep, "expected an array of strings");
      m.edge_ids.push_back(id.get<std::string>());
    }
  }
  if (root.contains("corner_words")) {
    const Path cp = child(path, "corner_words");
    if (!root["corner_words"].is_array()) doc.fail(cp, "expected an array of word triples");
    for (const auto& t : root["corner_words"]) {
      if (!t.is_array() || t.size() != 3) doc.fail(cp, "expected an array of word triples");
      std::array<std::string, 3> w;
      for (int k = 0; k < 3; ++k) {
        if (!t[k].is_string()) doc.fail(cp, "words must be strings");
        w[k] = t[k].get<std::string>();
        for (char c : w[k])
          if (!((c >= 'a' && c < 'a' + 2 * m.genus) || (c >= 'A' && c < 'A' + 2 * m.genus)))
            doc.fail(cp, "invalid letter '" + std::string(1, c) + "' in word " + w[k]);
      }
      m.corner_words.push_back(w);
    }
  }
  return m;
}

OrderedJson to_json(const PolyhedronParams& p) {
  OrderedJson group;
  group["genus"] = p.genus;
  if (p.regular) group["preset"] = "regular";
  else group["zvc"] = p.zvc;
  OrderedJson out;
  out["group"] = group;
  OrderedJson base = OrderedJson::array();
  for (const auto& b : p.base_points) base.push_back({b[0], b[1]});
  out["base_points"] = base;
  out["heights"] = p.heights;
  return out;
}

OrderedJson to_json(const ConeMetricSurface& m) {
  OrderedJson out;
  out["genus"] = m.genus;
  out["triangles"] = m.triangles;
  out["gluing"] = m.gluing;
  out["edge_ids"] = m.edge_ids;
  OrderedJson lengths = OrderedJson::object();
  for (const auto& id : m.edge_ids) lengths[id] = m.lengths.at(id);
  out["lengths"] = lengths;
  if (!m.corner_words.empty()) out["corner_words"] = m.corner_words;
  if (!m.cone_angles.empty()) out["cone_angles"] = m.cone_angles;
  return out;
}

OrderedJson to_json(const FuchsianPolyhedron& p, const ConeMetricSurface& metric) {
  OrderedJson out;
  out["schema_version"] = kSchemaVersion;
  out["input"] = to_json(p.params);
  out["convex"] = true;
  out["stable_word_length"] = p.stable_word_length;
  OrderedJson verts = OrderedJson::array();
  for (const auto& v : p.vertices) verts.push_back(vec_json(v.coords()));
  out["vertices"] = verts;
  OrderedJson faces = OrderedJson::array();
  for (const auto& f : p.faces) {
    OrderedJson face = OrderedJson::array();
    for (const auto& v : f.vertices) face.push_back(v.str());
    faces.push_back(face);
  }
  out["faces"] = faces;
  OrderedJson edges = OrderedJson::array();
  for (const auto& e : p.labeling.edges) {
    OrderedJson je;
    je["key"] = e.key;
    je["i"] = e.i;
    je["j"] = e.j;
    je["word"] = e.word;
    je["additional"] = e.additional;
    je["length"] = metric.lengths.at(e.key);
    edges.push_back(je);
  }
  out["edges"] = edges;
  out["metric"] = to_json(metric);
  out["area"] = {{"triangles", total_area(metric)}, {"gauss_bonnet", gauss_bonnet_area(metric)}};
  return out;
}

OrderedJson to_json(const RigidityReport& r) {
  OrderedJson out;
  out["schema_version"] = kSchemaVersion;
  out["dimension"] = r.dimension;
  out["sigma_min"] = r.sigma_min;
  out["sigma_max"] = r.sigma_max;
  out["verdict"] = r.verdict();
  return out;
}

OrderedJson to_json(const RealizationResult& r) {
  OrderedJson out;
  out["schema_version"] = kSchemaVersion;
  out["params"] = to_json(r.params);
  out["residual"] = r.residual;
  out["iterations"] = r.iterations;
  out["edge_keys"] = r.labeling.keys();
  OrderedJson path = OrderedJson::array();
  for (const auto& s : r.path)
    path.push_back({{"t", s.t}, {"iterations", s.iterations}, {"residual", s.residual}, {"lambda", s.lambda}});
  out["homotopy"] = path;
  return out;
}

OrderedJson to_json(const std::vector<CheckReport>& reports) {
  OrderedJson out;
  out["schema_version"] = kSchemaVersion;
  OrderedJson list = OrderedJson::array();
  bool all = true;
  for (const auto& r : reports) {
    list.push_back({{"check", r.check}, {"samples", r.samples}, {"max_residual", r.max_residual}, {"pass", r.pass}});
    all = all && r.pass;
  }
  out["checks"] = list;
  out["pass"] = all;
  return out;
}

OrderedJson to_json(const OrbitPointSet& orbit) {
  OrderedJson out;
  out["schema_version"] = kSchemaVersion;
  out["max_word_length"] = orbit.max_word_length;
  OrderedJson pts = OrderedJson::array();
  for (const auto& p : orbit.points)
    pts.push_back({{"seed", p.seed}, {"word", p.word}, {"coords", vec_json(p.point.coords())}});
  out["points"] = pts;
  return out;
}

} // namespace fuchsian
