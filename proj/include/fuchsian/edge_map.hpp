#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuchsian/polyhedron.hpp"

namespace fuchsian {

/// Squared fundamental-domain edge lengths of a fixed triangulation as a
/// function of the 6g-6+3n parameters.
struct EdgeMapEvaluation {
  PolyhedronParams params;
  Labeling labeling;
  Eigen::VectorXd values;
  Eigen::MatrixXd jacobian;         // empty unless requested
  Eigen::VectorXd singular_values;  // descending
  double step = 0.0;                // relative stencil width used
};

/// Smallest normalized dihedral determinant over the face edges and the
/// smallest projected triangle area; both positive iff the labeled surface
/// is locally convex and projects injectively.
struct LocalConvexity {
  double min_det = 0.0;
  double min_area = 0.0;
  std::string edge;  // edge attaining min_det
  bool convex() const { return min_det > 0.0 && min_area > 0.0; }
};

LocalConvexity local_convexity(const FuchsianGroup& group, const std::vector<MinkowskiPoint>& seeds,
                               const Labeling& labeling);

/// Builds the polyhedron, triangulates it and evaluates on its labeling.
EdgeMapEvaluation evaluate(const PolyhedronParams& params, const BuildOptions& options = {});

/// Evaluates on a reference labeling.  Throws CombinatoricsChange when the
/// labeled surface is no longer locally convex at params.
EdgeMapEvaluation evaluate(const PolyhedronParams& params, const Labeling& labeling);

/// Central differences with relative step h·max(1, |x_k|).  The step is
/// halved up to six times when a stencil point changes combinatorics.
EdgeMapEvaluation jacobian(const PolyhedronParams& params, const Labeling& labeling,
                           double step = 1e-6);
EdgeMapEvaluation jacobian(const PolyhedronParams& params, double step = 1e-6);

struct RigidityReport {
  int dimension = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool rigid = false;
  std::string verdict() const { return rigid ? "RIGID" : "INCONCLUSIVE"; }
};

inline constexpr double kRigidityThreshold = 1e-8;

/// RIGID iff the matrix is square and sigma_min / sigma_max > 1e-8.
RigidityReport rigidity_certificate(const Eigen::MatrixXd& jacobian);
RigidityReport rigidity_certificate(const PolyhedronParams& params, double step = 1e-6);

} // namespace fuchsian
