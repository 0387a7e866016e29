#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "fuchsian/io.hpp"

using namespace fuchsian;

namespace {

struct Options {
  std::string input;
  std::string out;
  std::string obj;
  std::string initial;
  std::string suite = "all";
  std::optional<double> tol;
  std::uint64_t seed = 1;
  int max_word_length = 12;
  int copies = 1;
  double step = 1e-6;
};

void emit(const OrderedJson& j, const Options& o) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw SchemaError(o.out + ": cannot write file");
    f << text;
  }
}

int cmd_build(const Options& o) {
  const PolyhedronParams params = read_polyhedron(JsonDocument::from_file(o.input));
  BuildOptions bo;
  bo.max_word_length = o.max_word_length;
  const FuchsianPolyhedron poly = triangulate(build(params, bo));
  const ConeMetricSurface metric = induced_metric(poly);
  OrderedJson j = to_json(poly, metric);
  const double gap = std::abs(j["area"]["triangles"].get<double>() - j["area"]["gauss_bonnet"].get<double>());
  j["area"]["gauss_bonnet_ok"] = gap < o.tol.value_or(1e-6);
  if (!o.obj.empty()) {
    std::ofstream f(o.obj);
    if (!f) throw SchemaError(o.obj + ": cannot write file");
    f << export_obj(poly, o.copies);
    j["obj"] = o.obj;
  }
  emit(j, o);
  return 0;
}

int cmd_rigidity(const Options& o) {
  const PolyhedronParams params = read_polyhedron(JsonDocument::from_file(o.input));
  BuildOptions bo;
  bo.max_word_length = o.max_word_length;
  const FuchsianPolyhedron poly = triangulate(build(params, bo));
  const EdgeMapEvaluation ev = jacobian(params, poly.labeling, o.step);
  RigidityReport r = rigidity_certificate(ev.jacobian);
  if (o.tol) r.rigid = r.sigma_max > 0.0 && r.sigma_min / r.sigma_max > *o.tol;
  OrderedJson j = to_json(r);
  j["step"] = ev.step;
  j["threshold"] = o.tol.value_or(kRigidityThreshold);
  emit(j, o);
  return 0;
}

int cmd_realize(const Options& o) {
  const JsonDocument doc = JsonDocument::from_file(o.input);
  RealizationProblem problem;
  // Accepts a metric, a build bundle, or {"target", "initial", "tol"}.
  if (doc.root().contains("target")) {
    problem.target = read_metric(doc, {"target"});
    if (doc.root().contains("initial") && !doc.root()["initial"].is_null())
      problem.initial = read_polyhedron(doc, {"initial"});
    if (doc.root().contains("tol")) {
      if (!doc.root()["tol"].is_number()) doc.fail({"tol"}, "expected a number");
      problem.options.tol = doc.root()["tol"].get<double>();
    }
  } else if (doc.root().contains("metric")) {
    problem.target = read_metric(doc, {"metric"});
  } else {
    problem.target = read_metric(doc);
  }
  if (!o.initial.empty()) problem.initial = read_polyhedron(JsonDocument::from_file(o.initial));
  if (o.tol) problem.options.tol = *o.tol;
  emit(to_json(solve(problem)), o);
  return 0;
}

int cmd_checks(const Options& o) {
  const auto reports = run_checks(o.suite, o.seed);
  const OrderedJson j = to_json(reports);
  emit(j, o);
  return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_orbit(const Options& o) {
  const JsonDocument doc = JsonDocument::from_file(o.input);
  PolyhedronParams params;
  std::vector<MinkowskiPoint> seeds;
  if (doc.root().contains("group")) {
    params = read_polyhedron(doc);
    seeds = seed_points(params, make_group(params));
  } else {
    read_group(doc, {}, params);
  }
  const FuchsianGroup group = make_group(params);
  if (seeds.empty()) seeds.push_back(group.interior_point());
  emit(to_json(enumerate_orbit(group, seeds, std::min(o.max_word_length, 4))), o);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex Fuchsian polyhedra: construction, rigidity and realization"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Also write the JSON result to this file");
    sub->add_option("--tol", o.tol,
                    "Tolerance override: Gauss-Bonnet gap (build), sigma ratio (rigidity), "
                    "relative residual (realize); ignored by checks and orbit");
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--max-word-length", o.max_word_length, "Largest word length for the orbit hull")
        ->capture_default_str();
  };

  auto* build_cmd = app.add_subcommand("build", "Build the polyhedron of a polyhedron.json and its metric");
  build_cmd->add_option("input", o.input, "polyhedron.json")->required();
  build_cmd->add_option("--obj", o.obj, "Write the Klein-model mesh as OBJ");
  build_cmd->add_option("--copies", o.copies, "Word length of the translates in the OBJ")->capture_default_str();
  common(build_cmd);

  auto* rig_cmd = app.add_subcommand("rigidity", "Rank certificate of the edge-length map");
  rig_cmd->add_option("input", o.input, "polyhedron.json")->required();
  rig_cmd->add_option("--step", o.step, "Relative finite-difference step")->capture_default_str();
  common(rig_cmd);

  auto* real_cmd = app.add_subcommand("realize", "Find the polyhedron inducing a cone metric");
  real_cmd->add_option("input", o.input, "metric.json, a build bundle, or {target, initial, tol}")->required();
  real_cmd->add_option("--initial", o.initial, "polyhedron.json to start from");
  common(real_cmd);

  auto* checks_cmd = app.add_subcommand("checks", "Numerical checks of links, caps and the Pogorelov map");
  checks_cmd->add_option("--suite", o.suite, "links, caps, pogorelov or all")->capture_default_str();
  common(checks_cmd);

  auto* orbit_cmd = app.add_subcommand("orbit", "Dump the orbit of the seeds (word length at most 4)");
  orbit_cmd->add_option("input", o.input, "group.json or polyhedron.json")->required();
  common(orbit_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (*build_cmd) return cmd_build(o);
    if (*rig_cmd) return cmd_rigidity(o);
    if (*real_cmd) return cmd_realize(o);
    if (*checks_cmd) return cmd_checks(o);
    if (*orbit_cmd) return cmd_orbit(o);
  } catch (const NotConvex& e) {
    std::cerr << "error: " << e.what() << "\nwitness: " << e.witness() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
