#include "fuchsian/realizer.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace fuchsian {

namespace {

constexpr double kLambdaMin = 1e-12;
constexpr double kLambdaMax = 1e3;
constexpr double kFlatDet = 1e-9;

bool edge_less(const EdgeLabel& a, const EdgeLabel& b) {
  if (a.i != b.i) return a.i < b.i;
  if (a.j != b.j) return a.j < b.j;
  return shortlex_less(a.word, b.word);
}

std::map<std::string, int> gluing_index(const ConeMetricSurface& m) {
  std::map<std::string, int> out;
  for (std::size_t k = 0; k < m.edge_ids.size(); ++k) out[m.edge_ids[k]] = static_cast<int>(k);
  return out;
}

// Labeling read off the corner words of the metric.
AlignedTarget align_by_words(const ConeMetricSurface& target, const PolyhedronParams& initial) {
  const FuchsianGroup group = make_group(initial);
  const std::vector<MinkowskiPoint> seeds = seed_points(initial, group);
  ElementCatalog catalog(group);
  catalog.ensure_level(3);
  const auto index = gluing_index(target);

  Labeling lab;
  lab.genus = target.genus;
  lab.n = target.n;
  std::map<std::string, EdgeLabel> edges;
  std::map<std::string, int> metric_of_key;
  for (std::size_t t = 0; t < target.triangles.size(); ++t) {
    TriangleLabel tri;
    for (int s = 0; s < 3; ++s)
      tri.corners[s] = VertexLabel{target.triangles[t][s], catalog.canonical(reduce_word(target.corner_words[t][s]))};
    for (int s = 0; s < 3; ++s) {
      const EdgeLabel e = canonical_edge(tri.corners[s], tri.corners[(s + 1) % 3], catalog);
      tri.edge_keys[s] = e.key;
      edges.emplace(e.key, e);
      const int k = index.at(target.slot_edges[t][s]);
      auto [it, fresh] = metric_of_key.emplace(e.key, k);
      if (!fresh && it->second != k)
        throw CombinatoricsChange("corner words glue metric edges " + target.edge_ids[it->second] +
                                  " and " + target.edge_ids[k] + " into one edge");
    }
    lab.triangles.push_back(tri);
  }
  if (edges.size() != target.edge_ids.size())
    throw CombinatoricsChange("corner words do not reproduce the metric's edges");
  for (auto& [key, e] : edges) lab.edges.push_back(e);
  std::sort(lab.edges.begin(), lab.edges.end(), edge_less);
  try {
    attach_edge_sides(lab, catalog);
  } catch (const TruncationUnstable& err) {
    throw CombinatoricsChange(err.what());
  }
  // Edges that are flat at the initial point are triangulation diagonals.
  for (auto& e : lab.edges) {
    const Vec4 a = seeds[e.i].coords();
    const Vec4 b = group.element(e.word).apply(seeds[e.j]).coords();
    const Vec4 l = group.element(e.left.word).apply(seeds[e.left.index]).coords();
    const Vec4 r = group.element(e.right.word).apply(seeds[e.right.index]).coords();
    e.additional = std::abs(orientation_det4(a, b, l, r)) < kFlatDet;
  }

  AlignedTarget out;
  out.labeling = lab;
  out.squared.resize(static_cast<Eigen::Index>(lab.edges.size()));
  for (std::size_t k = 0; k < lab.edges.size(); ++k) {
    const int m = metric_of_key.at(lab.edges[k].key);
    const double len = target.lengths.at(target.edge_ids[m]);
    out.squared(static_cast<Eigen::Index>(k)) = len * len;
    out.metric_edge.push_back(m);
  }
  return out;
}

// Gluing-preserving bijection between the metric's triangles and those of
// the initial polyhedron, respecting vertex labels.
AlignedTarget align_by_gluing(const ConeMetricSurface& target, const PolyhedronParams& initial) {
  const FuchsianPolyhedron poly = triangulate(build(initial));
  const Labeling& lab = poly.labeling;
  const int T = static_cast<int>(target.triangles.size());
  if (static_cast<int>(lab.triangles.size()) != T)
    throw CombinatoricsChange("metric and initial polyhedron have different triangle counts");

  std::vector<int> partner(3 * T);
  for (const auto& pair : target.gluing) partner[pair[0]] = pair[1], partner[pair[1]] = pair[0];
  std::map<std::string, std::vector<int>> key_slots;
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < 3; ++s) key_slots[lab.triangles[t].edge_keys[s]].push_back(3 * t + s);
  auto lab_partner = [&](int slot) {
    const auto& v = key_slots.at(lab.triangles[slot / 3].edge_keys[slot % 3]);
    return v[0] == slot ? v[1] : v[0];
  };
  auto label_of = [&](int t, int s) { return lab.triangles[t].corners[s].index; };

  for (int start = 0; start < T; ++start) {
    for (int rot = 0; rot < 3; ++rot) {
      std::vector<int> image(T, -1), shift(T, 0), used(T, 0);
      std::vector<int> stack{0};
      image[0] = start, shift[0] = rot, used[start] = 1;
      bool ok = true;
      while (!stack.empty() && ok) {
        const int t = stack.back();
        stack.pop_back();
        for (int s = 0; s < 3 && ok; ++s) {
          if (target.triangles[t][s] != label_of(image[t], (s + shift[t]) % 3)) {
            ok = false;
            break;
          }
          const int other = partner[3 * t + s];
          const int mapped = lab_partner(3 * image[t] + (s + shift[t]) % 3);
          const int t2 = other / 3, s2 = other % 3;
          const int rot2 = ((mapped % 3) - s2 + 3) % 3;
          if (image[t2] < 0) {
            if (used[mapped / 3]) {
              ok = false;
              break;
            }
            image[t2] = mapped / 3, shift[t2] = rot2, used[mapped / 3] = 1;
            stack.push_back(t2);
          } else if (image[t2] != mapped / 3 || shift[t2] != rot2) {
            ok = false;
          }
        }
      }
      if (!ok || std::find(image.begin(), image.end(), -1) != image.end()) continue;

      AlignedTarget out;
      out.labeling = lab;
      const auto index = gluing_index(target);
      std::map<std::string, int> metric_of_key;
      for (int t = 0; t < T; ++t)
        for (int s = 0; s < 3; ++s)
          metric_of_key[lab.triangles[image[t]].edge_keys[(s + shift[t]) % 3]] =
              index.at(target.slot_edges[t][s]);
      out.squared.resize(static_cast<Eigen::Index>(lab.edges.size()));
      for (std::size_t k = 0; k < lab.edges.size(); ++k) {
        const int m = metric_of_key.at(lab.edges[k].key);
        const double len = target.lengths.at(target.edge_ids[m]);
        out.squared(static_cast<Eigen::Index>(k)) = len * len;
        out.metric_edge.push_back(m);
      }
      return out;
    }
  }
  throw CombinatoricsChange("no relabeling maps the metric's triangulation onto the initial polyhedron");
}

struct Fit {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  double lambda = 0.0;
  bool converged = false;
};

Eigen::VectorXd relative_error(const Eigen::VectorXd& values, const Eigen::VectorXd& b) {
  return (values - b).cwiseQuotient(b);
}

// Levenberg-Marquardt on the relative squared-length errors.
Fit fit(const PolyhedronParams& shape, const Labeling& lab, Eigen::VectorXd x, const Eigen::VectorXd& b,
        const RealizationOptions& opt) {
  Fit out;
  out.x = x;
  Eigen::VectorXd f = relative_error(evaluate(shape.with_vector(x), lab).values, b);
  double lambda = 1e-6;
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.residual = f.cwiseAbs().maxCoeff();
    out.lambda = lambda;
    if (out.residual <= opt.tol) {
      out.converged = true;
      return out;
    }
    const Eigen::MatrixXd jac =
        b.cwiseInverse().asDiagonal() * jacobian(shape.with_vector(out.x), lab, opt.jacobian_step).jacobian;
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * f;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * normal.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = -damped.ldlt().solve(grad);
      const Eigen::VectorXd trial = out.x + step;
      try {
        const Eigen::VectorXd ft = relative_error(evaluate(shape.with_vector(trial), lab).values, b);
        if (ft.squaredNorm() < f.squaredNorm()) {
          out.x = trial;
          f = ft;
          lambda = std::max(lambda / 3.0, kLambdaMin);
          accepted = true;
          out.iterations = it + 1;
          continue;
        }
      } catch (const Error&) {
        // Leaves the chart or the combinatorics: treat as a rejected step.
      }
      lambda *= 10.0;
      if (lambda > kLambdaMax) {
        out.residual = f.cwiseAbs().maxCoeff();
        return out;
      }
    }
  }
  out.residual = f.cwiseAbs().maxCoeff();
  out.converged = out.residual <= opt.tol;
  return out;
}

} // namespace

PolyhedronParams default_initial(const ConeMetricSurface& target, double height) {
  static const double grid[][2] = {{0.0, 0.0},   {0.08, 0.0},   {0.0, 0.08},  {-0.08, 0.0},
                                   {0.0, -0.08}, {0.08, 0.08},  {-0.08, 0.08}, {-0.08, -0.08},
                                   {0.08, -0.08}};
  if (target.n > static_cast<int>(std::size(grid)))
    throw LabelMismatch("default initial supports at most 9 vertices");
  PolyhedronParams p;
  p.genus = target.genus;
  p.zvc = zvc_fixture(target.genus);
  for (int i = 0; i < target.n; ++i) {
    p.base_points.push_back({grid[i][0], grid[i][1]});
    p.heights.push_back(height);
  }
  return p;
}

AlignedTarget align_target(const ConeMetricSurface& target, const PolyhedronParams& initial) {
  if (target.genus != initial.genus || target.n != initial.n())
    throw LabelMismatch("metric and initial polyhedron differ in genus or vertex count");
  std::optional<AlignedTarget> found;
  if (!target.corner_words.empty()) {
    // Corner words fix the labeling, but it is only usable from an initial
    // point where that labeled surface is locally convex.
    try {
      AlignedTarget by_words = align_by_words(target, initial);
      const FuchsianGroup group = make_group(initial);
      if (local_convexity(group, seed_points(initial, group), by_words.labeling).convex())
        found = std::move(by_words);
    } catch (const CombinatoricsChange&) {
    }
  }
  AlignedTarget out = found ? std::move(*found) : align_by_gluing(target, initial);
  const int expected = 6 * target.genus - 6 + 3 * target.n;
  if (static_cast<int>(out.labeling.edges.size()) != expected)
    throw LabelMismatch("metric has " + std::to_string(out.labeling.edges.size()) + " edges, expected " +
                        std::to_string(expected));
  return out;
}

RealizationResult solve(const RealizationProblem& problem) {
  const ConeMetricSurface target = validate(problem.target);
  const PolyhedronParams initial = problem.initial ? *problem.initial : default_initial(target);
  if (initial.regular) throw ChartViolation("realization needs ZVC coordinates for the group");
  const RealizationOptions& opt = problem.options;

  const AlignedTarget aligned = align_target(target, initial);
  const Labeling& lab = aligned.labeling;
  const Eigen::VectorXd start = evaluate(initial, lab).values;
  const Eigen::VectorXd& goal = aligned.squared;

  auto blend_is_metric = [&](const Eigen::VectorXd& b) {
    std::map<std::string, double> lengths;
    for (std::size_t k = 0; k < aligned.metric_edge.size(); ++k)
      lengths[target.edge_ids[aligned.metric_edge[k]]] = std::sqrt(b(static_cast<Eigen::Index>(k)));
    try {
      with_lengths(target, lengths);
      return true;
    } catch (const ValidationError&) {
      return false;
    }
  };

  RealizationResult result;
  result.labeling = lab;
  Eigen::VectorXd x = initial.to_vector();
  double t = 0.0;
  double dt = opt.initial_blend_step;
  while (t < 1.0) {
    const double tn = std::min(1.0, t + dt);
    const Eigen::VectorXd b = (1.0 - tn) * start + tn * goal;
    if (!blend_is_metric(b)) {
      dt *= 0.5;
      if (dt < opt.min_blend_step) {
        std::ostringstream os;
        os << "blend at t = " << tn << " is not a cone metric with positive curvature";
        throw HomotopyBlocked(os.str());
      }
      continue;
    }
    const Fit f = fit(initial, lab, x, b, opt);
    result.iterations += f.iterations;
    if (!f.converged) {
      dt *= 0.5;
      if (dt < opt.min_blend_step) {
        std::ostringstream os;
        os << "Gauss-Newton stalled at t = " << tn << " with residual " << f.residual;
        throw DivergedStep(os.str());
      }
      continue;
    }
    x = f.x;
    t = tn;
    result.path.push_back(HomotopyStep{t, f.iterations, f.residual, f.lambda});
    result.residual = f.residual;
    dt = std::min(2.0 * dt, 1.0);
  }
  result.params = initial.with_vector(x);
  const ConvexityReport report = check_convexity(result.params);
  if (!report.convex) throw CombinatoricsChange("solution fails the strict vertex test: " + report.witness);
  return result;
}

} // namespace fuchsian
