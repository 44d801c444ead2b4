// cartan: verification front end.
//
// Every command prints a report {"command", "checks", "witnesses",
// "timings_ms", "version"}; exit status 0 when all checks pass, 1 when some
// check fails, 2 on input errors.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include <CLI11.hpp>

#include "cartan/continuation.hpp"
#include "cartan/cover.hpp"
#include "cartan/io.hpp"
#include "svg.hpp"

using namespace cartan;
using io::json;

namespace {

struct Globals {
  double tol = kTauGeo;
  std::uint64_t seed = 1;
  std::string out;
  bool svg = false;
};

void add_check(json& report, const CheckReport& r) { report["checks"].push_back(io::report_to_json(r)); }

CheckReport verdict(std::string property, bool pass, double residual, double tol, std::string note = {}) {
  CheckReport r;
  r.property = std::move(property);
  r.pass = pass;
  r.residual = residual;
  r.tolerance = tol;
  r.note = std::move(note);
  return r;
}

void write_svg(const Globals& g, const std::string& name, const svg::Canvas& canvas) {
  if (!g.svg) return;
  const auto dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
  io::write_text_file((dir / name).string(), canvas.render());
}

/// Point argument on the command line: JSON text, or a bare label.
Point parse_point(const io::LoadedSpace& s, const std::string& text, const std::string& what) {
  json ref;
  try {
    ref = json::parse(text);
  } catch (const json::parse_error&) {
    ref = text;
  }
  return s.resolve(ref, what);
}

/// Random point of a space that has a global bicombing, for default plans.
std::function<Point(std::mt19937_64&)> sampler(const io::LoadedSpace& s) {
  using K = io::LoadedSpace::Kind;
  switch (s.kind) {
    case K::Graph:
      return [g = s.graph](std::mt19937_64& rng) {
        const auto e = std::uniform_int_distribution<std::size_t>(0, g->edges().size() - 1)(rng);
        return g->edge_point(e, std::uniform_real_distribution<double>(0.0, g->edges()[e].length)(rng));
      };
    case K::Box:
    case K::Linf:
      return [b = s.linf](std::mt19937_64& rng) {
        Point p(b->dimension());
        for (std::size_t k = 0; k < p.size(); ++k)
          p[k] = b->bounded() ? std::uniform_real_distribution<double>(b->lo()[k], b->hi()[k])(rng)
                              : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return p;
      };
    case K::Cylinder:
      return [c = s.cylinder](std::mt19937_64& rng) {
        return Point{std::uniform_real_distribution<double>(0.0, c->circumference())(rng),
                     std::uniform_real_distribution<double>(0.0, c->height())(rng)};
      };
    case K::TightSpan: {
      auto E = std::make_shared<TightSpanComplex>(enumerate_cells(*s.metric));
      return [E](std::mt19937_64& rng) {
        const auto k = std::uniform_int_distribution<std::size_t>(0, E->cells.size() - 1)(rng);
        return sample_cell(E->cells[k], rng);
      };
    }
    default:
      throw io::InputError(s.description + ": no bicombing on a finite space");
  }
}

svg::P2 planar(const io::LoadedSpace& s, const Point& p, double ref_angle) {
  if (s.cylinder) return {s.cylinder->unwrap_near(ref_angle, p[0]), p[1]};
  return {p[0], p[1]};
}

std::vector<svg::P2> developed(const io::LoadedSpace& s, const std::vector<Point>& pts) {
  std::vector<svg::P2> out;
  double ref = pts.empty() ? 0.0 : pts.front()[0];
  for (const auto& p : pts) {
    out.push_back(planar(s, p, ref));
    ref = out.back()[0];
  }
  return out;
}

bool two_dimensional(const io::LoadedSpace& s) {
  return s.cylinder || (s.linf && s.linf->dimension() == 2);
}

// ---------------------------------------------------------------- commands

json cmd_validate(const Globals& g, const std::string& input) {
  json rep = io::make_report("validate");
  const bool file = std::filesystem::is_regular_file(input);
  if (file) {
    const json j = io::read_json_file(input);
    if (j.is_object() && j.contains("charts")) {
      const auto A = io::atlas_from_json(j, input);
      AtlasPlan plan;
      plan.seed = g.seed;
      for (const auto& r : validate_atlas(A.atlas, plan, g.tol)) add_check(rep, r);
      return rep;
    }
    if (j.is_object() && j.contains("d")) {
      auto raw = io::raw_metric_from_json(j, input);
      auto v = validate_metric(raw.d, raw.labels, kTauMetric);
      CheckReport r = verdict("metric-axioms", true, 0.0, kTauMetric);
      if (auto* bad = std::get_if<MetricViolation>(&v)) {
        r.pass = false;
        r.residual = bad->residual;
        r.note = bad->describe();
        for (auto i : bad->indices) r.witness.params.push_back(static_cast<double>(i));
      } else {
        rep["witnesses"]["points"] = std::get<DistanceMatrix>(v).size();
      }
      add_check(rep, r);
      return rep;
    }
    const auto s = io::space_from_json(j, input, true);
    add_check(rep, verdict("space", true, 0.0, 0.0, s.description));
    return rep;
  }
  const auto s = io::load_space(input);
  if (!s.model) throw io::InputError(input + ": nothing to validate");
  AtlasPlan plan;
  plan.seed = g.seed;
  for (const auto& r : validate_atlas(s.model->atlas, plan, g.tol)) add_check(rep, r);
  return rep;
}

json cmd_tightspan(const Globals& g, const std::string& input) {
  json rep = io::make_report("tightspan");
  const DistanceMatrix X = io::metric_from_json(io::read_json_file(input), input);
  const TightSpanComplex E = enumerate_cells(X);
  double ext = 0.0;
  for (const auto& c : E.cells)
    for (const auto& v : c.vertices) ext = std::max(ext, extremality_residual(v, X));
  add_check(rep, verdict("extremality", ext <= kTauMetric, ext, kTauMetric));
  const auto rows = kuratowski_embed(X);
  double iso = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    iso = std::max(iso, extremality_residual(rows[i], X));
    for (std::size_t j = 0; j < X.size(); ++j) iso = std::max(iso, std::abs(linf_distance(rows[i], rows[j]) - X(i, j)));
  }
  add_check(rep, verdict("embedding-isometry", iso <= kTauMetric, iso, kTauMetric));
  rep["witnesses"]["dimension"] = E.dimension;
  rep["witnesses"]["cells"] = E.cells.size();
  rep["witnesses"]["degenerate"] = E.degenerate;
  const json complex = io::complex_to_json(E);
  if (!g.out.empty()) io::write_text_file((std::filesystem::path(g.out) / "complex.json").string(), io::dump(complex));
  else rep["witnesses"]["complex"] = complex;

  if (g.svg && X.size() <= 4 && X.size() >= 2) {
    svg::Canvas canvas;
    for (const auto& c : E.cells) {
      std::vector<svg::P2> pts;
      for (const auto& v : c.vertices) pts.push_back({v[0], v[1]});
      if (c.dim == 2) {
        const svg::P2 m = {std::accumulate(pts.begin(), pts.end(), 0.0, [](double a, auto& p) { return a + p[0]; }) / pts.size(),
                           std::accumulate(pts.begin(), pts.end(), 0.0, [](double a, auto& p) { return a + p[1]; }) / pts.size()};
        std::sort(pts.begin(), pts.end(), [&](auto& a, auto& b) {
          return std::atan2(a[1] - m[1], a[0] - m[0]) < std::atan2(b[1] - m[1], b[0] - m[0]);
        });
        canvas.polygon(pts, "#8ab", "#345");
      } else if (c.dim == 1) {
        canvas.polyline(pts, "#345");
      }
    }
    for (const auto& r : rows) canvas.dot({r[0], r[1]}, "#c33");
    write_svg(g, "tightspan.svg", canvas);
  }
  return rep;
}

json cmd_check(const Globals& g, const std::string& space, const std::string& name, const std::string& plan_file) {
  json rep = io::make_report("check");
  const auto s = io::load_space(space);
  Bicombing sigma;
  if (name == "shortest-arc-graph" && s.graph) sigma = shortest_arc_bicombing(s.graph);
  else if (name == "linear-chart" && s.cylinder) sigma = cylinder_chart_bicombing(s.cylinder);
  else if (name == "linear-chart" && s.linf) sigma = *s.bicombing();
  else if (name == "tight-span-solver" && s.kind == io::LoadedSpace::Kind::TightSpan) sigma = tight_span_bicombing(*s.metric);
  else if (name == "tight-span-midpoint" && s.kind == io::LoadedSpace::Kind::TightSpan) sigma = midpoint_rule_bicombing(*s.metric);
  else throw io::InputError("bicombing '" + name + "' is not available on " + s.description);

  CheckPlan plan;
  if (!plan_file.empty()) {
    plan = io::plan_from_json(io::read_json_file(plan_file), s, plan_file);
  } else {
    std::mt19937_64 rng(g.seed);
    auto pick = sampler(s);
    for (int i = 0; i < 8; ++i) {
      Point a = pick(rng);
      plan.pairs.emplace_back(std::move(a), pick(rng));
    }
    for (int i = 0; i < 8; ++i) {
      std::array<Point, 4> q;
      for (auto& p : q) p = pick(rng);
      plan.quadruples.push_back(std::move(q));
    }
    rep["witnesses"]["plan"] = io::plan_to_json(plan);
  }
  for (const auto& r : check_all(sigma, plan, g.tol)) add_check(rep, r);
  return rep;
}

json cmd_develop(const Globals& g, const std::string& atlas_file, const std::string& path_file) {
  json rep = io::make_report("develop");
  const auto A = io::load_atlas(atlas_file);
  const PolyLinePath gamma = io::path_from_json(io::read_json_file(path_file), A.space, path_file);
  ContinuationOptions opts;
  opts.perturb.tol = g.tol;
  const auto G = global_bicombing(A.atlas, gamma.front(), gamma.back(), gamma, opts);
  const double bound = prefix_length(gamma, 1.0, A.atlas);
  add_check(rep, verdict("local-geodesic", G.path.residual <= g.tol, G.path.residual, g.tol));
  add_check(rep, verdict("length-bound", G.path.length <= bound + g.tol, std::max(0.0, G.path.length - bound), g.tol));
  const auto samples = G.path.path.sample(kCertifyLevel, A.atlas);
  rep["witnesses"]["length"] = G.path.length;
  rep["witnesses"]["path_length"] = bound;
  rep["witnesses"]["distance"] = A.atlas.space().distance(gamma.front(), gamma.back());
  rep["witnesses"]["geodesic_defect"] = G.geodesic_defect;
  rep["witnesses"]["steps"] = G.steps;
  rep["witnesses"]["geodesic"] = io::path_to_json(samples);
  if (g.svg && two_dimensional(A.space)) {
    svg::Canvas canvas;
    canvas.polyline(developed(A.space, gamma.points()), "#999");
    canvas.polyline(developed(A.space, samples.points()), "#c33", 2.0);
    write_svg(g, "develop.svg", canvas);
  }
  return rep;
}

json cmd_cover(const Globals& g, const std::string& atlas_file, const std::string& base_arg, double lmax,
               const std::string& target_arg) {
  json rep = io::make_report("cover");
  const auto A = io::load_atlas(atlas_file);
  if (A.net.empty()) throw io::InputError(atlas_file + ": atlas has no net");
  const Point base = parse_point(A.space, base_arg, "--base");
  CoverOptions opts;
  opts.perturb.tol = g.tol;
  const Cover C = build_cover(A.atlas, A.net, base, lmax, opts);
  add_check(rep, verdict("cover", true, 0.0, opts.tau_id,
                         std::to_string(C.perturbations) + " perturbations, " + std::to_string(C.skipped) +
                             " known extensions"));
  rep["witnesses"]["points"] = C.points.size();
  const auto& X = A.atlas.space();
  auto describe = [&](const std::vector<const CoverPoint*>& pts) {
    json arr = json::array();
    for (const auto* p : pts) arr.push_back({{"endpoint", p->endpoint}, {"length", p->length}});
    return arr;
  };
  if (!target_arg.empty()) {
    const Point target = parse_point(A.space, target_arg, "--target");
    bool on_net = false;
    for (const auto& p : A.net) on_net = on_net || X.distance(p, target) <= 1e-9;
    if (!on_net) throw io::InputError("--target: not a net point of the atlas");
    auto pre = preimages(C, target, X);
    std::sort(pre.begin(), pre.end(), [](auto* a, auto* b) { return a->length < b->length; });
    rep["witnesses"]["preimages"] = pre.size();
    rep["witnesses"]["preimage_paths"] = describe(pre);
  } else {
    auto pre = preimages(C, base, X);
    std::sort(pre.begin(), pre.end(), [](auto* a, auto* b) { return a->length < b->length; });
    rep["witnesses"]["preimages"] = pre.size();
    rep["witnesses"]["preimage_paths"] = describe(pre);
  }
  if (g.svg && two_dimensional(A.space)) {
    svg::Canvas canvas;
    for (const auto& p : C.points)
      canvas.polyline(developed(A.space, p.geodesic.path.sample(3, A.atlas).points()), "#58a", 0.7);
    canvas.dot(planar(A.space, base, base[0]), "#c33");
    write_svg(g, "cover.svg", canvas);
  }
  return rep;
}

WitnessSolver solver_for(const io::LoadedSpace& s, double tol) {
  using K = io::LoadedSpace::Kind;
  switch (s.kind) {
    case K::Finite: {
      auto X = std::static_pointer_cast<const FiniteSpace>(s.space);
      return [X](const BallFamily& F) {
        return helly_witness_finite(F, *X, {}, std::numeric_limits<double>::infinity());
      };
    }
    case K::Box:
    case K::Linf:
      return [b = s.linf, tol](const BallFamily& F) -> std::optional<Witness> {
        try {
          return helly_witness_linf(F, tol, b.get());
        } catch (const GeometryError&) {
          return std::nullopt;
        }
      };
    case K::TightSpan:
      return [X = *s.metric, tol](const BallFamily& F) -> std::optional<Witness> {
        try {
          return tight_span_helly_witness(F, X, tol);
        } catch (const GeometryError&) {
          return std::nullopt;
        }
      };
    case K::Graph:
      return geodesic_candidate_solver(shortest_arc_bicombing(s.graph));
    default:
      throw io::InputError(s.description + ": no witness solver for this space");
  }
}

json cmd_helly(const std::string& space, const std::string& family_file) {
  json rep = io::make_report("helly");
  const auto s = io::load_space(space);
  const BallFamily F = io::family_from_json(io::read_json_file(family_file), s, family_file);
  const auto feas = pairwise_feasible(F, *s.space);
  CheckReport pf = verdict("pairwise-feasible", feas.feasible, std::max(0.0, feas.worst_excess), kTauMetric);
  if (!feas.feasible) pf.witness.params = {static_cast<double>(feas.i), static_cast<double>(feas.j)};
  add_check(rep, pf);
  if (!feas.feasible) return rep;
  const auto w = solver_for(s, kTauMetric)(F);
  const double slack = w ? w->min_slack() : -std::numeric_limits<double>::infinity();
  CheckReport r = verdict("intersection-nonempty", w && slack >= -kTauMetric, w ? std::max(0.0, -slack) : 1.0, kTauMetric);
  if (w) {
    r.witness.points = {w->point};
    r.witness.params = w->slacks;
    rep["witnesses"]["witness"] = io::witness_to_json(*w);
  }
  if (!r.pass) r.note = "pairwise-feasible family without a common point";
  add_check(rep, r);
  return rep;
}

json cmd_halving(const std::string& space, const std::string& family_file, double r0) {
  json rep = io::make_report("halving");
  const auto s = io::load_space(space);
  const auto sigma = s.bicombing();
  if (!sigma) throw io::InputError(s.description + ": halving needs a bicombing");
  const BallFamily F = io::family_from_json(io::read_json_file(family_file), s, family_file);
  const auto feas = pairwise_feasible(F, *s.space);
  if (!feas.feasible) {
    CheckReport pf = verdict("pairwise-feasible", false, feas.worst_excess, kTauMetric);
    pf.witness.params = {static_cast<double>(feas.i), static_cast<double>(feas.j)};
    add_check(rep, pf);
    return rep;
  }
  const HalvingResult h = halving_witness(F, *sigma, solver_for(s, kTauMetric), r0);
  CheckReport r = verdict("halving-witness", h.witness.min_slack() >= -h.tolerance,
                          std::max(0.0, -h.witness.min_slack()), h.tolerance);
  r.witness.points = {h.witness.point};
  r.witness.params = h.witness.slacks;
  add_check(rep, r);
  rep["witnesses"]["witness"] = io::witness_to_json(h.witness);
  rep["witnesses"]["depth"] = h.depth;
  rep["witnesses"]["base_calls"] = h.base_calls;
  return rep;
}

json cmd_sphere(const Globals& g, int n) {
  json rep = io::make_report("sphere-counterexample");
  if (n < 6 || n % 3 != 0) throw io::InputError("--n: expected a multiple of 3 that is at least 6, got " + std::to_string(n));
  const SphereReport s = sphere_counterexample(n, 200, g.seed);
  for (const auto& c : s.checks) add_check(rep, c);
  rep["witnesses"] = {{"n", s.n},
                      {"x", s.x},
                      {"y", s.y},
                      {"z", s.z},
                      {"eps", s.eps},
                      {"r", s.r},
                      {"local_radius", s.local_radius},
                      {"box_point", s.box_witness.point},
                      {"box_slacks", s.box_witness.slacks}};
  return rep;
}

json cmd_generate(const Globals& g, const std::string& spec) {
  json rep = io::make_report("generate");
  const Model m = generate_model(spec);
  AtlasPlan plan;
  plan.seed = g.seed;
  for (const auto& r : validate_atlas(m.atlas, plan, g.tol)) add_check(rep, r);
  const json space = m.graph ? io::graph_to_json(*m.graph) : json{{"version", io::kFormatVersion}, {"model", m.name}};
  const json atlas = io::atlas_to_json(m);
  rep["witnesses"]["model"] = m.name;
  rep["witnesses"]["charts"] = m.atlas.charts().size();
  if (!g.out.empty()) {
    io::write_text_file((std::filesystem::path(g.out) / "space.json").string(), io::dump(space));
    io::write_text_file((std::filesystem::path(g.out) / "atlas.json").string(), io::dump(atlas));
  } else {
    rep["witnesses"]["space"] = space;
    rep["witnesses"]["atlas"] = atlas;
  }
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic bicombings, tight spans and local-to-global geodesics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "check tolerance")->check(CLI::Range(std::numeric_limits<double>::epsilon(), 1.0));
  app.add_option("--seed", g.seed, "seed for randomized plans");
  app.add_option("--out", g.out, "output directory for reports and files");
  app.add_flag("--svg", g.svg, "write SVG figures for 2-dimensional models");

  std::string a1, a2, plan, path, base, target;
  double lmax = 0.0, r0 = 0.0;
  int n = 12;
  std::function<json()> run;

  auto* validate = app.add_subcommand("validate", "validate a metric, graph, atlas file or model");
  validate->add_option("input", a1)->required();
  validate->callback([&] { run = [&] { return cmd_validate(g, a1); }; });

  auto* tightspan = app.add_subcommand("tightspan", "enumerate the tight span of a finite metric");
  tightspan->add_option("metric", a1)->required();
  tightspan->callback([&] { run = [&] { return cmd_tightspan(g, a1); }; });

  auto* check = app.add_subcommand("check", "run the bicombing checkers");
  check->add_option("space", a1)->required();
  check->add_option("bicombing", a2)->required();
  check->add_option("--plan", plan, "check plan file");
  check->callback([&] { run = [&] { return cmd_check(g, a1, a2, plan); }; });

  auto* develop = app.add_subcommand("develop", "continue local geodesics along a path");
  develop->add_option("atlas", a1)->required();
  develop->add_option("--path", path)->required();
  develop->callback([&] { run = [&] { return cmd_develop(g, a1, path); }; });

  auto* cover = app.add_subcommand("cover", "build the truncated universal cover");
  cover->add_option("atlas", a1)->required();
  cover->add_option("--base", base)->required();
  cover->add_option("--lmax", lmax)->required()->check(CLI::NonNegativeNumber);
  cover->add_option("--target", target, "net point whose preimages are listed");
  cover->callback([&] { run = [&] { return cmd_cover(g, a1, base, lmax, target); }; });

  auto* helly = app.add_subcommand("helly", "intersection witness for a ball family");
  helly->add_option("space", a1)->required();
  helly->add_option("family", a2)->required();
  helly->callback([&] { run = [&] { return cmd_helly(a1, a2); }; });

  auto* halving = app.add_subcommand("halving", "intersection witness by recursive halving");
  halving->add_option("space", a1)->required();
  halving->add_option("family", a2)->required();
  halving->add_option("--r0", r0)->required()->check(CLI::PositiveNumber);
  halving->callback([&] { run = [&] { return cmd_halving(a1, a2, r0); }; });

  auto* sphere = app.add_subcommand("sphere-counterexample", "local injectivity without a global retraction on C_n");
  sphere->add_option("--n", n, "cycle length, a multiple of 3");
  sphere->callback([&] { run = [&] { return cmd_sphere(g, n); }; });

  auto* generate = app.add_subcommand("generate", "write a model space and its default atlas");
  generate->add_option("model", a1)->required();
  generate->callback([&] { run = [&] { return cmd_generate(g, a1); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  json report;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    report = run();
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string command = "unknown";
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    report = io::make_report(command);
    add_check(report, verdict("error", false, 0.0, 0.0, e.what()));
  }
  report["timings_ms"]["total"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const std::string text = io::dump(report);
  std::cout << text;
  if (!g.out.empty()) {
    try {
      io::write_text_file((std::filesystem::path(g.out) / (report["command"].get<std::string>() + ".json")).string(), text);
    } catch (const io::InputError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  return io::report_passes(report) ? 0 : 1;
}
