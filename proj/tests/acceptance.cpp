// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Expected values come from closed forms computed here.

#include <Eigen/Geometry>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fuchsian/deformation_lab.hpp"
#include "fuchsian/realizer.hpp"
#include "instances.hpp"

using namespace fuchsian;
using namespace fuchsian::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed condition; the first failure is kept in the detail.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << " first failure: " << what << ";";
    pass = pass && ok;
  }
};

MinkowskiPoint random_point(std::mt19937_64& rng, double max_radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, max_radius);
  const Vec3 dir = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
  const double r = radius(rng);
  const Vec3 s = std::sinh(r) * dir;
  return MinkowskiPoint::normalized(Vec4(s(0), s(1), s(2), std::cosh(r)));
}

MinkowskiPoint random_plane_point(std::mt19937_64& rng, double max_radius) {
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI), radius(0.0, max_radius);
  const double r = radius(rng), a = angle(rng);
  return plane_point(Vec3(std::sinh(r) * std::cos(a), std::sinh(r) * std::sin(a), std::cosh(r)));
}

void kernel_identities(Outcome& out) {
  std::mt19937_64 rng(101);
  const MinkowskiPoint xc = MinkowskiPoint::center();
  double pyth = 0.0, ellipsoid = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const MinkowskiPoint x = random_point(rng, 3.0);
    const double lhs = std::cosh(distance(xc, x));
    const double rhs = std::cosh(height(x)) * std::cosh(distance(xc, project_to_plane(x)));
    pyth = std::max(pyth, std::abs(lhs - rhs));
  }
  std::uniform_real_distribution<double> depth(0.1, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const double d = depth(rng), r = std::tanh(d);
    const Vec3 q = klein_map(lift_to_height(random_plane_point(rng, 3.0), d)).k;
    ellipsoid = std::max(ellipsoid, std::abs(q(0) * q(0) + q(1) * q(1) + q(2) * q(2) / (r * r) - 1.0));
  }
  out.require(pyth < 1e-10, "Pythagoras");
  out.require(ellipsoid < 1e-10, "ellipsoid");
  out.detail << " pythagoras " << pyth << ", ellipsoid " << ellipsoid;
}

void group_soundness(Outcome& out) {
  const FuchsianGroup g = regular_group(2);
  const double area_error = std::abs(g.polygon_area() - 4 * M_PI);
  out.require(g.relation_residual() < 1e-9, "relation residual");
  out.require(area_error < 1e-6, "area");
  out.detail << " relation residual " << g.relation_residual() << ", |area - 4pi| " << area_error;
}

void construction(Outcome& out) {
  const double d = 1.0;
  const int genus = 2, n = 1;
  const FuchsianPolyhedron poly = triangulate(build(regular_params(d)));
  const ConeMetricSurface m = validate(induced_metric(poly));
  out.require(poly.stable_word_length <= 6, "stable by L <= 6");

  // Every edge joins two orbit points at height d; the chord law gives its
  // length from the distance of their feet on the plane.
  double chord = 0.0;
  for (const EdgeLabel& e : poly.labeling.edges) {
    const MinkowskiPoint a = poly.point({e.i, ""});
    const MinkowskiPoint b = poly.point({e.j, e.word});
    const double l = distance(project_to_plane(a), project_to_plane(b));
    const double expected = std::acosh(std::cosh(d) * std::cosh(d) * std::cosh(l) - std::sinh(d) * std::sinh(d));
    chord = std::max(chord, std::abs(m.lengths.at(e.key) - expected));
  }
  out.require(chord < 1e-9, "chord law");

  const int expected_edges = 6 * genus - 6 + 3 * n;
  out.require(static_cast<int>(poly.labeling.edges.size()) == expected_edges, "edge count");
  out.require(static_cast<int>(m.edge_ids.size()) == expected_edges, "metric edge count");

  // Triangle areas from the hyperbolic law of cosines, against
  // 2π(2g - 2) + Σ(2π - θ_i) with θ_i the summed corner angles.
  double area = 0.0;
  std::vector<double> cone(m.n, 0.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    double l[3];
    for (int s = 0; s < 3; ++s) l[s] = m.slot_length(static_cast<int>(t), s);
    double sum = 0.0;
    for (int s = 0; s < 3; ++s) {
      // Corner s sits between sides s and s+2, opposite side s+1.
      const double b = l[s], c = l[(s + 2) % 3], a = l[(s + 1) % 3];
      const double angle = std::acos((std::cosh(b) * std::cosh(c) - std::cosh(a)) / (std::sinh(b) * std::sinh(c)));
      sum += angle;
      cone[m.triangles[t][s]] += angle;
    }
    area += M_PI - sum;
  }
  double gauss_bonnet = 2 * M_PI * (2 * genus - 2);
  for (double theta : cone) gauss_bonnet += 2 * M_PI - theta;
  out.require(std::abs(area - gauss_bonnet) < 1e-6, "Gauss-Bonnet");
  for (double theta : cone) out.require(theta > 0.0 && theta < 2 * M_PI, "cone angle in (0, 2pi)");
  out.require(std::abs(cone[0] - m.cone_angles[0]) < 1e-9, "cone angle matches the metric");
  out.detail << " L = " << poly.stable_word_length << ", edges " << poly.labeling.edges.size() << ", chord error "
             << chord << ", cone angle " << cone[0] << ", |area - GB| " << std::abs(area - gauss_bonnet);
}

void rigidity(Outcome& out) {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_ratio = 1.0, min_decay = 1e300, max_decay = 0.0;
  int instances = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 20; ++k, ++instances) {
      const PolyhedronParams p = random_convex_params(rng, n);
      const EdgeMapEvaluation ev = jacobian(p);
      const RigidityReport r = rigidity_certificate(ev.jacobian);
      out.require(ev.jacobian.rows() == p.dimension() && ev.jacobian.cols() == p.dimension(), "square Jacobian");
      out.require(r.sigma_min / r.sigma_max > 1e-8, "sigma ratio");
      worst_ratio = std::min(worst_ratio, r.sigma_min / r.sigma_max);

      // |Ed(x + εv) - Ed(x) - εJv| should drop by 100 from ε = 1e-3 to 1e-4.
      // A direction whose ε = 1e-3 step leaves the labeling is redrawn.
      for (int attempt = 0; attempt < 10; ++attempt) {
        Eigen::VectorXd v(p.dimension());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        v.normalize();
        auto remainder = [&](double eps) {
          const Eigen::VectorXd f = evaluate(p.with_vector(p.to_vector() + eps * v), ev.labeling).values;
          return (f - ev.values - eps * ev.jacobian * v).norm();
        };
        try {
          const double decay = remainder(1e-3) / remainder(1e-4);
          min_decay = std::min(min_decay, decay);
          max_decay = std::max(max_decay, decay);
          out.require(decay > 30.0 && decay < 300.0, "quadratic decay");
          break;
        } catch (const CombinatoricsChange&) {
          out.require(attempt < 9, "no direction keeps the labeling");
        }
      }
    }
  }
  out.detail << " " << instances << " instances, min sigma ratio " << worst_ratio << ", remainder decay in ["
             << min_decay << ", " << max_decay << "]";
}

void realization(Outcome& out) {
  std::mt19937_64 rng(303);
  double worst_param = 0.0, worst_residual = 0.0, worst_spread = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = 1 + k % 3;
    const PolyhedronParams truth = random_convex_params(rng, n);
    const FuchsianPolyhedron poly = triangulate(build(truth));
    const ConeMetricSurface target = induced_metric(poly);
    Eigen::VectorXd first;
    for (int trial = 0; trial < 2; ++trial) {
      const PolyhedronParams start = jittered(truth, poly.labeling, rng, 0.10, 0.05);
      const RealizationResult r = solve({target, start, {}});
      const Eigen::VectorXd x = r.params.to_vector();
      const double err = (x - truth.to_vector()).cwiseAbs().maxCoeff();
      worst_param = std::max(worst_param, err);
      worst_residual = std::max(worst_residual, r.residual);
      out.require(err < 1e-5, "recovered parameters");
      out.require(r.residual < 1e-8, "residual");
      if (trial == 0) first = x;
      else {
        const double spread = (x - first).cwiseAbs().maxCoeff();
        worst_spread = std::max(worst_spread, spread);
        out.require(spread < 1e-5, "two jitters agree");
      }
    }
  }
  out.detail << " 10 instances, max parameter error " << worst_param << ", max residual " << worst_residual
             << ", max jitter spread " << worst_spread;
}

void pogorelov(Outcome& out) {
  std::mt19937_64 rng(404);
  const std::vector<Vec3> cloud = klein_cloud(rng, 500);
  for (const Vec3& k : cloud) out.require(k.norm() <= 0.95, "cloud radius");
  double worst = 0.0;
  for (const Mat4& a : killing_basis()) worst = std::max(worst, killing_transfer_check(a, cloud));
  out.require(worst < 1e-6, "Killing basis residual");

  // Radial parts keep their norm, lateral parts shrink by cosh μ with μ the
  // distance to x_c.
  std::normal_distribution<double> normal(0.0, 1.0);
  double norms = 0.0;
  for (const Vec3& k : cloud) {
    const MinkowskiPoint x = klein_unmap(KleinPoint{k});
    Vec4 z(normal(rng), normal(rng), normal(rng), normal(rng));
    z += minkowski(z, x.coords()) * x.coords();
    const FieldDecomposition d = decompose(VectorFieldSample::make(x, z));
    const double mu = distance(MinkowskiPoint::center(), x);
    const Vec3 er = pogorelov_map(VectorFieldSample::make(x, d.radial)).vector;
    const Vec3 el = pogorelov_map(VectorFieldSample::make(x, d.lateral)).vector;
    norms = std::max(norms, std::abs(er.norm() - spacelike_norm(d.radial)));
    norms = std::max(norms, std::abs(el.norm() - spacelike_norm(d.lateral) / std::cosh(mu)));
    // The radial image points along the Euclidean radius.
    norms = std::max(norms, er.cross(k.normalized()).norm());
  }
  out.require(norms < 1e-10, "radial/lateral norms");

  const double control = killing_residual(
      [](const MinkowskiPoint& x) -> Vec4 {
        return std::sinh(distance(MinkowskiPoint::center(), x)) * radial_direction(x);
      },
      cloud);
  out.require(control > 1e-2, "control field");
  out.detail << " max Killing residual " << worst << ", norm relation error " << norms << ", control residual "
             << control;
}

void links(Outcome& out) {
  std::mt19937_64 rng(505);
  std::vector<PolyhedronParams> cases = {regular_params(1.0), fixture_params(1), fixture_params(2), fixture_params(3)};
  for (int k = 0; k < 6; ++k) cases.push_back(random_convex_params(rng, 1 + k % 3));
  double beta = 0.0, side = 0.0;
  int vertices = 0;
  for (const PolyhedronParams& p : cases) {
    const FuchsianPolyhedron poly = triangulate(build(p));
    const ConeMetricSurface m = induced_metric(poly);
    for (int i = 0; i < p.n(); ++i, ++vertices) {
      const LinkPolygon link = link_of_vertex(poly, i);
      beta = std::max(beta, std::abs(link.beta_sum() - 2 * M_PI));
      side = std::max(side, std::abs(link.side_sum() - m.cone_angles[i]));
    }
  }
  out.require(beta < 1e-8, "beta sum");
  out.require(side < 1e-8, "side sum");

  double largest = -1e300;
  for (int k = 0; k < 1000; ++k) {
    const LinkConfiguration c = random_link_configuration(rng);
    const double v = monotonicity_check(c.r_prev, c.r_mid, c.r_next, c.l_prev, c.l_next);
    largest = std::max(largest, v);
    out.require(v < 0.0, "monotonicity");
  }
  out.detail << " " << vertices << " vertices, |sum beta - 2pi| " << beta << ", |side sum - cone angle| " << side
             << ", largest monotonicity value " << largest;
}

// Euclidean Killing fields (three translations, three rotations) on the cap
// vertices; the number of independent ones with no vertical motion on the
// boundary is 6 minus the rank of that restriction.
int killing_oracle(const ConvexCap& cap, bool pin, Eigen::MatrixXd* fields) {
  const int V = static_cast<int>(cap.vertices.size());
  Eigen::MatrixXd k(3 * V, 6);
  for (int f = 0; f < 6; ++f)
    for (int i = 0; i < V; ++i)
      k.block<3, 1>(3 * i, f) = f < 3 ? Vec3(Vec3::Unit(f)) : Vec3(Vec3::Unit(f - 3).cross(cap.vertices[i]));
  if (fields) *fields = k;
  if (!pin) return 6;
  Eigen::MatrixXd vertical(cap.boundary.size(), 6);
  for (std::size_t b = 0; b < cap.boundary.size(); ++b) vertical.row(b) = k.row(3 * cap.boundary[b] + 2);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vertical);
  qr.setThreshold(1e-10);
  return 6 - static_cast<int>(qr.rank());
}

void caps(Outcome& out) {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> count(8, 40);
  int pinned_dim = -1, free_dim = -1;
  for (int k = 0; k < 50; ++k) {
    const ConvexCap cap = random_cap(rng, count(rng));
    Eigen::MatrixXd fields;
    const int oracle_pinned = killing_oracle(cap, true, &fields);
    const int oracle_free = killing_oracle(cap, false, nullptr);
    const CapKernel pinned = cap_rigidity_kernel(cap, true);
    const CapKernel free = cap_rigidity_kernel(cap, false);
    out.require(pinned.dimension == 3, "pinned kernel 3");
    out.require(free.dimension == 6, "free kernel 6");
    out.require(pinned.dimension == oracle_pinned, "pinned kernel matches the oracle");
    out.require(free.dimension == oracle_free, "free kernel matches the oracle");
    out.require(killing_field_count(cap, true) == oracle_pinned, "library count pinned");
    out.require(killing_field_count(cap, false) == oracle_free, "library count free");
    // The free kernel is spanned by the Killing fields themselves.
    const Eigen::MatrixXd proj = free.basis * (free.basis.transpose() * fields);
    out.require((proj - fields).norm() < 1e-8 * fields.norm(), "Killing fields span the free kernel");
    pinned_dim = pinned.dimension;
    free_dim = free.dimension;
  }
  out.detail << " 50 caps, last kernels " << pinned_dim << " pinned / " << free_dim << " free";
}

} // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"kernel identities", kernel_identities},
      {"group soundness", group_soundness},
      {"construction and metric", construction},
      {"rigidity certificate", rigidity},
      {"realization round trip", realization},
      {"Pogorelov transfer", pogorelov},
      {"link calculus", links},
      {"convex-cap rigidity", caps},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " exception: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", index++, name, out.detail.str().c_str(),
                seconds);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
