#pragma once

#include <optional>
#include <vector>

#include "fuchsian/cone_metric.hpp"
#include "fuchsian/edge_map.hpp"

namespace fuchsian {

struct RealizationOptions {
  double tol = 1e-8;            // max relative squared-length error
  double min_blend_step = 1e-6;
  double initial_blend_step = 1.0;
  int max_iterations = 60;      // Gauss-Newton iterations per blend
  double jacobian_step = 1e-6;
};

struct RealizationProblem {
  ConeMetricSurface target;
  std::optional<PolyhedronParams> initial;  // default_initial(target) when empty
  RealizationOptions options;
};

struct HomotopyStep {
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double lambda = 0.0;
};

struct RealizationResult {
  PolyhedronParams params;
  Labeling labeling;
  double residual = 0.0;
  int iterations = 0;
  std::vector<HomotopyStep> path;
};

/// ZVC fixture group, base points on a small grid around the origin, equal
/// heights.
PolyhedronParams default_initial(const ConeMetricSurface& target, double height = 1.0);

/// Target lengths keyed like the labeling of `initial`: through corner
/// words when the metric carries them, else through a gluing-preserving
/// relabeling of the initial triangulation.  Throws CombinatoricsChange.
struct AlignedTarget {
  Labeling labeling;
  Eigen::VectorXd squared;  // canonical order of labeling
  std::vector<int> metric_edge;  // metric gluing index per labeling edge
};
AlignedTarget align_target(const ConeMetricSurface& target, const PolyhedronParams& initial);

/// Damped Gauss-Newton on Ed_P along a linear blend of squared lengths.
/// Throws HomotopyBlocked, DivergedStep, CombinatoricsChange.
RealizationResult solve(const RealizationProblem& problem);

} // namespace fuchsian
