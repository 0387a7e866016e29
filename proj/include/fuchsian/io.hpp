#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuchsian/deformation_lab.hpp"
#include "fuchsian/edge_map.hpp"
#include "fuchsian/realizer.hpp"

namespace fuchsian {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Parsed input text with its source name, for line-anchored errors.
class JsonDocument {
public:
  /// Throws SchemaError with line and column on malformed text.
  JsonDocument(std::string text, std::string source);
  static JsonDocument from_file(const std::string& path);

  const nlohmann::json& root() const { return root_; }
  const std::string& source() const { return source_; }

  /// Line of the last key of `path` found in order through the text.
  int line_of(const std::vector<std::string>& path) const;
  /// SchemaError "source:line: a.b.c: message".
  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const;

private:
  std::string text_;
  std::string source_;
  nlohmann::json root_;
};

/// group.json at `path` inside the document: {"genus", "zvc"} or
/// {"genus", "preset": "regular"}.  Fills genus, regular and zvc.
void read_group(const JsonDocument& doc, const std::vector<std::string>& path, PolyhedronParams& out);

/// polyhedron.json: {"group": <group.json>, "base_points": [[u, v], ...],
/// "heights": [...]}.
PolyhedronParams read_polyhedron(const JsonDocument& doc, const std::vector<std::string>& path = {});

/// metric.json: {"genus", "triangles", "gluing", "lengths", optional
/// "edge_ids" and "corner_words"}.  Not validated.
ConeMetricSurface read_metric(const JsonDocument& doc, const std::vector<std::string>& path = {});

OrderedJson to_json(const PolyhedronParams& p);
OrderedJson to_json(const ConeMetricSurface& m);
OrderedJson to_json(const FuchsianPolyhedron& p, const ConeMetricSurface& metric);
OrderedJson to_json(const RigidityReport& r);
OrderedJson to_json(const RealizationResult& r);
OrderedJson to_json(const std::vector<CheckReport>& reports);
OrderedJson to_json(const OrbitPointSet& orbit);

} // namespace fuchsian
