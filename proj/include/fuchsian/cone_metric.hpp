#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "fuchsian/errors.hpp"

namespace fuchsian {

/// A closed surface glued from hyperbolic triangles.  Slot 3t+s is the edge
/// of triangle t from corner s to corner s+1; glued slots are traversed in
/// opposite directions.
struct ConeMetricSurface {
  int genus = 0;
  std::vector<std::array<int, 3>> triangles;  // cone point labels
  std::vector<std::array<int, 2>> gluing;     // slot pairs
  std::vector<std::string> edge_ids;          // per gluing pair
  std::map<std::string, double> lengths;      // per edge id
  /// Optional group words of the corners (orbit labels of a polyhedron).
  std::vector<std::array<std::string, 3>> corner_words;

  // Filled in by validate().
  int n = 0;
  std::vector<double> cone_angles;
  std::vector<std::array<std::string, 3>> slot_edges;

  double slot_length(int t, int s) const { return lengths.at(slot_edges[t][s]); }
  /// Angle of triangle t at corner s.
  double corner_angle(int t, int s) const;
  /// Edge ids sorted by (min label, max label, shortlex id).
  std::vector<std::string> canonical_edge_order() const;
};

/// Checks every invariant and computes cone angles.  Throws
/// TriangleInequality, GluingMismatch, EulerMismatch, AngleOutOfRange.
ConeMetricSurface validate(const ConeMetricSurface& raw);

/// Squared lengths in the order of `keys`.  Throws LabelMismatch.
std::vector<double> edge_vector(const ConeMetricSurface& m, const std::vector<std::string>& keys);

/// Sum over triangles of (π - α - β - γ).
double total_area(const ConeMetricSurface& m);

/// 2π(2g-2) + Σ(2π - θ_i)
double gauss_bonnet_area(const ConeMetricSurface& m);

/// Copy of m with new lengths per edge id, validated.
ConeMetricSurface with_lengths(const ConeMetricSurface& m, const std::map<std::string, double>& lengths);

} // namespace fuchsian
