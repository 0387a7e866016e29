#include "fuchsian/edge_map.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace fuchsian {

namespace {

constexpr int kMaxHalvings = 6;

MinkowskiPoint labeled_point(const FuchsianGroup& group, const std::vector<MinkowskiPoint>& seeds,
                             const VertexLabel& v) {
  return group.element(v.word).apply(seeds.at(v.index));
}

Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return {};
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

} // namespace

LocalConvexity local_convexity(const FuchsianGroup& group, const std::vector<MinkowskiPoint>& seeds,
                               const Labeling& labeling) {
  LocalConvexity out;
  out.min_det = std::numeric_limits<double>::infinity();
  out.min_area = std::numeric_limits<double>::infinity();
  for (const auto& e : labeling.edges) {
    if (e.additional) continue;
    const Vec4 a = seeds.at(e.i).coords();
    const Vec4 b = labeled_point(group, seeds, VertexLabel{e.j, e.word}).coords();
    const Vec4 l = labeled_point(group, seeds, e.left).coords();
    const Vec4 r = labeled_point(group, seeds, e.right).coords();
    const double det = orientation_det4(a, b, l, r);
    if (det < out.min_det) out.min_det = det, out.edge = e.key;
  }
  for (const auto& t : labeling.triangles) {
    Vec3 k[3];
    for (int s = 0; s < 3; ++s) k[s] = klein_map(labeled_point(group, seeds, t.corners[s])).k;
    const double area = (k[1](0) - k[0](0)) * (k[2](1) - k[0](1)) - (k[1](1) - k[0](1)) * (k[2](0) - k[0](0));
    out.min_area = std::min(out.min_area, area);
  }
  return out;
}

EdgeMapEvaluation evaluate(const PolyhedronParams& params, const BuildOptions& options) {
  const FuchsianPolyhedron poly = triangulate(build(params, options));
  return evaluate(params, poly.labeling);
}

EdgeMapEvaluation evaluate(const PolyhedronParams& params, const Labeling& labeling) {
  const FuchsianGroup group = make_group(params);
  const std::vector<MinkowskiPoint> seeds = seed_points(params, group);
  if (labeling.n != params.n() || labeling.genus != params.genus)
    throw LabelMismatch("labeling does not match the parameter dimensions");
  const LocalConvexity lc = local_convexity(group, seeds, labeling);
  if (!lc.convex()) {
    if (!(lc.min_area > 0.0)) throw CombinatoricsChange("a labeled triangle flips in projection");
    throw CombinatoricsChange("edge " + lc.edge + " is no longer convex");
  }
  EdgeMapEvaluation out;
  out.params = params;
  out.labeling = labeling;
  out.values.resize(static_cast<Eigen::Index>(labeling.edges.size()));
  for (std::size_t k = 0; k < labeling.edges.size(); ++k) {
    const auto& e = labeling.edges[k];
    const double d = distance(seeds[e.i], labeled_point(group, seeds, VertexLabel{e.j, e.word}));
    out.values(static_cast<Eigen::Index>(k)) = d * d;
  }
  return out;
}

EdgeMapEvaluation jacobian(const PolyhedronParams& params, const Labeling& labeling, double step) {
  EdgeMapEvaluation out = evaluate(params, labeling);
  const Eigen::VectorXd x = params.to_vector();
  const Eigen::Index dim = x.size();
  double h = step;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, h *= 0.5) {
    Eigen::MatrixXd jac(out.values.size(), dim);
    try {
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double dx = h * std::max(1.0, std::abs(x(k)));
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += dx;
        xm(k) -= dx;
        const auto fp = evaluate(params.with_vector(xp), labeling);
        const auto fm = evaluate(params.with_vector(xm), labeling);
        jac.col(k) = (fp.values - fm.values) / (2.0 * dx);
      }
    } catch (const CombinatoricsChange&) {
      if (attempt == kMaxHalvings) throw;
      continue;
    }
    out.jacobian = jac;
    out.singular_values = singular_values_of(jac);
    out.step = h;
    return out;
  }
  throw CombinatoricsChange("stencil changes combinatorics");
}

EdgeMapEvaluation jacobian(const PolyhedronParams& params, double step) {
  const FuchsianPolyhedron poly = triangulate(build(params));
  return jacobian(params, poly.labeling, step);
}

RigidityReport rigidity_certificate(const Eigen::MatrixXd& jac) {
  RigidityReport r;
  r.dimension = static_cast<int>(jac.cols());
  const Eigen::VectorXd s = singular_values_of(jac);
  if (s.size() == 0) return r;
  r.sigma_max = s(0);
  // A non-square matrix has a nontrivial kernel or cokernel.
  r.sigma_min = jac.rows() == jac.cols() ? s(s.size() - 1) : 0.0;
  r.rigid = r.sigma_max > 0.0 && r.sigma_min / r.sigma_max > kRigidityThreshold;
  return r;
}

RigidityReport rigidity_certificate(const PolyhedronParams& params, double step) {
  return rigidity_certificate(jacobian(params, step).jacobian);
}

} // namespace fuchsian
