#include "cartan/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cartan::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

std::size_t index(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected a nonnegative integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(where, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

Point numbers(const json& j, const std::string& where) {
  Point p;
  for (std::size_t i = 0; i < array(j, where).size(); ++i)
    p.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

std::string at(const std::string& where, const std::string& key) { return where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot write file");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void expect_fields(const json& j, const std::string& where, const std::vector<std::string>& allowed,
                   const std::vector<std::string>& required, bool versioned) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = it.key() == "version" || std::find(allowed.begin(), allowed.end(), it.key()) != allowed.end();
    if (!known) fail(where, "unknown field '" + it.key() + "'");
  }
  for (const auto& r : required)
    if (!j.contains(r)) fail(where, "missing field '" + r + "'");
  if (versioned) {
    const auto v = index(field(j, "version", where), at(where, "version"));
    if (v != kFormatVersion)
      fail(at(where, "version"), "unsupported version " + std::to_string(v) + " (expected " +
                                     std::to_string(kFormatVersion) + ")");
  }
}

// ------------------------------------------------------------------ spaces

RawMetric raw_metric_from_json(const json& j, const std::string& where, bool versioned) {
  expect_fields(j, where, {"labels", "d"}, {"d"}, versioned);
  RawMetric m;
  const json& d = array(field(j, "d", where), at(where, "d"));
  for (std::size_t i = 0; i < d.size(); ++i) m.d.push_back(numbers(d[i], at(at(where, "d"), i)));
  if (j.contains("labels")) {
    const json& l = array(j["labels"], at(where, "labels"));
    for (std::size_t i = 0; i < l.size(); ++i) m.labels.push_back(string(l[i], at(at(where, "labels"), i)));
  }
  return m;
}

DistanceMatrix metric_from_json(const json& j, const std::string& where, bool versioned) {
  RawMetric m = raw_metric_from_json(j, where, versioned);
  auto v = validate_metric(m.d, std::move(m.labels));
  if (auto* bad = std::get_if<MetricViolation>(&v)) fail(where, "not a metric: " + bad->describe());
  return std::get<DistanceMatrix>(std::move(v));
}

json metric_to_json(const DistanceMatrix& X) {
  return {{"version", kFormatVersion}, {"labels", X.labels()}, {"d", X.rows()}};
}

json graph_to_json(const MetricGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.length});
  return {{"version", kFormatVersion}, {"vertices", g.vertices()}, {"edges", edges}};
}

namespace {

std::shared_ptr<const MetricGraph> graph_from_json(const json& j, const std::string& where, bool versioned) {
  expect_fields(j, where, {"vertices", "edges"}, {"vertices", "edges"}, versioned);
  std::vector<std::string> names;
  const json& v = array(j["vertices"], at(where, "vertices"));
  for (std::size_t i = 0; i < v.size(); ++i) names.push_back(string(v[i], at(at(where, "vertices"), i)));
  std::vector<GraphEdge> edges;
  const json& e = array(j["edges"], at(where, "edges"));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string w = at(at(where, "edges"), i);
    if (!e[i].is_array() || e[i].size() != 3) fail(w, "expected [u, v, length]");
    edges.push_back({index(e[i][0], w + "[0]"), index(e[i][1], w + "[1]"), number(e[i][2], w + "[2]")});
  }
  try {
    return std::make_shared<const MetricGraph>(std::move(names), std::move(edges));
  } catch (const GeometryError& err) {
    fail(where, err.what());
  }
}

LoadedSpace from_model(Model m) {
  LoadedSpace s;
  s.description = m.name;
  s.space = m.atlas.space_ptr();
  if (m.graph) {
    s.kind = LoadedSpace::Kind::Graph;
    s.graph = m.graph;
  } else if (m.cylinder) {
    s.kind = LoadedSpace::Kind::Cylinder;
    s.cylinder = m.cylinder;
  } else {
    s.kind = LoadedSpace::Kind::Box;
    s.linf = m.box;
  }
  s.model = std::move(m);
  return s;
}

LoadedSpace from_spec(const std::string& spec, const std::string& where) {
  if (spec.rfind("linf(", 0) == 0 && spec.back() == ')') {
    const std::string arg = spec.substr(5, spec.size() - 6);
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || n < 1) fail(where, "invalid model spec '" + spec + "'");
    LoadedSpace s;
    s.kind = LoadedSpace::Kind::Linf;
    s.description = spec;
    s.linf = std::make_shared<const LinfSpace>(static_cast<std::size_t>(n));
    s.space = s.linf;
    return s;
  }
  try {
    return from_model(generate_model(spec));
  } catch (const GeometryError& e) {
    fail(where, e.what());
  }
}

}  // namespace

LoadedSpace space_from_json(const json& j, const std::string& where, bool versioned) {
  if (j.is_string()) return from_spec(j.get<std::string>(), where);
  if (!j.is_object()) fail(where, "expected a space object or model spec");
  LoadedSpace s;
  if (j.contains("d")) {
    s.kind = LoadedSpace::Kind::Finite;
    s.metric = metric_from_json(j, where, versioned);
    s.space = std::make_shared<const FiniteSpace>(*s.metric);
    s.description = "finite(" + std::to_string(s.metric->size()) + ")";
  } else if (j.contains("vertices")) {
    s.kind = LoadedSpace::Kind::Graph;
    s.graph = graph_from_json(j, where, versioned);
    s.space = s.graph;
    s.description = "graph(" + std::to_string(s.graph->vertex_count()) + ")";
  } else if (j.contains("model")) {
    expect_fields(j, where, {"model"}, {"model"}, versioned);
    return from_spec(string(j["model"], at(where, "model")), at(where, "model"));
  } else if (j.contains("tight-span")) {
    expect_fields(j, where, {"tight-span"}, {"tight-span"}, versioned);
    s.kind = LoadedSpace::Kind::TightSpan;
    s.metric = metric_from_json(j["tight-span"], at(where, "tight-span"), false);
    s.linf = std::make_shared<const LinfSpace>(s.metric->size());
    s.space = s.linf;
    s.description = "tight-span(" + std::to_string(s.metric->size()) + ")";
  } else if (j.contains("linf")) {
    expect_fields(j, where, {"linf"}, {"linf"}, versioned);
    return from_spec("linf(" + std::to_string(index(j["linf"], at(where, "linf"))) + ")", where);
  } else {
    fail(where, "unrecognized space object");
  }
  return s;
}

LoadedSpace load_space(const std::string& arg) {
  const bool is_file = arg.size() > 5 && arg.substr(arg.size() - 5) == ".json";
  if (is_file || std::filesystem::is_regular_file(arg)) return space_from_json(read_json_file(arg), arg, true);
  return from_spec(arg, "space '" + arg + "'");
}

Point LoadedSpace::resolve(const json& ref, const std::string& where) const {
  auto label_index = [&](const std::string& name, const std::vector<std::string>& labels) -> std::size_t {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == name) return i;
    fail(where, "unknown point label '" + name + "'");
  };
  switch (kind) {
    case Kind::Finite: {
      std::size_t i = 0;
      if (ref.is_string()) i = label_index(ref.get<std::string>(), metric->labels());
      else if (ref.is_array() && ref.size() == 1) i = index(ref[0], where + "[0]");
      else i = index(ref, where);
      if (i >= metric->size()) fail(where, "point index out of range");
      return FiniteSpace::point(i);
    }
    case Kind::TightSpan: {
      if (ref.is_string() || ref.is_number_integer()) {
        const std::size_t i = ref.is_string() ? label_index(ref.get<std::string>(), metric->labels())
                                              : index(ref, where);
        if (i >= metric->size()) fail(where, "point index out of range");
        return kuratowski_embed(*metric)[i];
      }
      Point p = numbers(ref, where);
      if (p.size() != metric->size()) fail(where, "expected " + std::to_string(metric->size()) + " coordinates");
      return p;
    }
    case Kind::Graph: {
      if (ref.is_string()) return graph->vertex_point(label_index(ref.get<std::string>(), graph->vertices()));
      std::size_t e = 0;
      double off = 0.0;
      if (ref.is_object()) {
        expect_fields(ref, where, {"edge", "offset"}, {"edge", "offset"}, false);
        e = index(ref["edge"], at(where, "edge"));
        off = number(ref["offset"], at(where, "offset"));
      } else {
        const Point p = numbers(ref, where);
        if (p.size() != 2 || p[0] != std::floor(p[0]) || p[0] < 0) fail(where, "expected [edge, offset]");
        e = static_cast<std::size_t>(p[0]);
        off = p[1];
      }
      if (e >= graph->edges().size()) fail(where, "edge index out of range");
      if (off < 0.0 || off > graph->edges()[e].length) fail(where, "offset outside the edge");
      return graph->edge_point(e, off);
    }
    case Kind::Cylinder: {
      Point p = numbers(ref, where);
      if (p.size() != 2 || !cylinder->contains(cylinder->normalize(p))) fail(where, "expected [angle, height] on the cylinder");
      return cylinder->normalize(p);
    }
    case Kind::Box:
    case Kind::Linf: {
      Point p = numbers(ref, where);
      if (p.size() != linf->dimension()) fail(where, "expected " + std::to_string(linf->dimension()) + " coordinates");
      if (!linf->contains(p)) fail(where, "point outside the box");
      return p;
    }
  }
  fail(where, "unsupported space");
}

std::optional<Bicombing> LoadedSpace::bicombing() const {
  switch (kind) {
    case Kind::Graph:
      return shortest_arc_bicombing(graph);
    case Kind::Box:
      return box_linear_bicombing(linf);
    case Kind::Linf: {
      Bicombing b;
      b.space = linf;
      b.eval = [](const Point& x, const Point& y, double t) { return lerp(x, y, t); };
      b.name = "linear";
      return b;
    }
    case Kind::TightSpan:
      return tight_span_bicombing(*metric);
    default:
      return std::nullopt;
  }
}

// ----------------------------------------------------------------- outputs

json point_to_json(const Point& p) { return json(p); }

json complex_to_json(const TightSpanComplex& E) {
  json cells = json::array();
  for (const auto& c : E.cells) {
    json pattern = json::array();
    for (const auto& [i, j] : c.pattern) pattern.push_back({i, j});
    cells.push_back({{"pattern", pattern}, {"dim", c.dim}, {"vertices", c.vertices}});
  }
  return {{"version", kFormatVersion}, {"cells", cells}, {"dimension", E.dimension}};
}

json report_to_json(const CheckReport& r) {
  return {{"property", r.property},
          {"pass", r.pass},
          {"residual", r.residual},
          {"tolerance", r.tolerance},
          {"witness", {{"points", r.witness.points}, {"params", r.witness.params}}},
          {"note", r.note}};
}

json witness_to_json(const Witness& w) {
  return {{"point", w.point}, {"slacks", w.slacks}, {"min_slack", w.min_slack()}};
}

// ------------------------------------------------------------------- plans

CheckPlan plan_from_json(const json& j, const LoadedSpace& s, const std::string& where) {
  expect_fields(j, where, {"pairs", "quadruples", "t_grid", "subsegments"}, {"t_grid"}, true);
  CheckPlan plan;
  plan.t_level = static_cast<int>(index(j["t_grid"], at(where, "t_grid")));
  if (plan.t_level > 12) fail(at(where, "t_grid"), "grid level above 12");
  if (j.contains("pairs")) {
    const json& a = array(j["pairs"], at(where, "pairs"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string w = at(at(where, "pairs"), i);
      if (!a[i].is_array() || a[i].size() != 2) fail(w, "expected [point, point]");
      plan.pairs.emplace_back(s.resolve(a[i][0], w + "[0]"), s.resolve(a[i][1], w + "[1]"));
    }
  }
  if (j.contains("quadruples")) {
    const json& a = array(j["quadruples"], at(where, "quadruples"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string w = at(at(where, "quadruples"), i);
      if (!a[i].is_array() || a[i].size() != 4) fail(w, "expected four points");
      std::array<Point, 4> q;
      for (std::size_t k = 0; k < 4; ++k) q[k] = s.resolve(a[i][k], at(w, k));
      plan.quadruples.push_back(std::move(q));
    }
  }
  if (j.contains("subsegments")) {
    const json& a = array(j["subsegments"], at(where, "subsegments"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Point ab = numbers(a[i], at(at(where, "subsegments"), i));
      if (ab.size() != 2 || !(0.0 <= ab[0] && ab[0] < ab[1] && ab[1] <= 1.0))
        fail(at(at(where, "subsegments"), i), "expected [a, b] with 0 <= a < b <= 1");
      plan.subsegments.emplace_back(ab[0], ab[1]);
    }
  }
  return plan;
}

json plan_to_json(const CheckPlan& plan) {
  json pairs = json::array(), quads = json::array();
  for (const auto& [a, b] : plan.pairs) pairs.push_back({a, b});
  for (const auto& q : plan.quadruples) quads.push_back({q[0], q[1], q[2], q[3]});
  json j{{"version", kFormatVersion}, {"pairs", pairs}, {"quadruples", quads}, {"t_grid", plan.t_level}};
  if (!plan.subsegments.empty()) {
    json segs = json::array();
    for (const auto& [a, b] : plan.subsegments) segs.push_back({a, b});
    j["subsegments"] = segs;
  }
  return j;
}

// --------------------------------------------------------------- families

BallFamily family_from_json(const json& j, const LoadedSpace& s, const std::string& where) {
  expect_fields(j, where, {"balls"}, {"balls"}, true);
  BallFamily F;
  const json& a = array(j["balls"], at(where, "balls"));
  if (a.empty()) fail(at(where, "balls"), "empty family");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string w = at(at(where, "balls"), i);
    expect_fields(a[i], w, {"center", "radius"}, {"center", "radius"}, false);
    const double r = number(a[i]["radius"], at(w, "radius"));
    if (r < 0.0) fail(at(w, "radius"), "negative radius");
    F.push_back({s.resolve(a[i]["center"], at(w, "center")), r});
  }
  return F;
}

json family_to_json(const BallFamily& F) {
  json balls = json::array();
  for (const auto& b : F) balls.push_back({{"center", b.center}, {"radius", b.radius}});
  return {{"version", kFormatVersion}, {"balls", balls}};
}

// ------------------------------------------------------------------- paths

PolyLinePath path_from_json(const json& j, const LoadedSpace& s, const std::string& where) {
  expect_fields(j, where, {"points", "params"}, {"points"}, true);
  std::vector<Point> pts;
  const json& a = array(j["points"], at(where, "points"));
  if (a.empty()) fail(at(where, "points"), "empty path");
  for (std::size_t i = 0; i < a.size(); ++i) pts.push_back(s.resolve(a[i], at(at(where, "points"), i)));
  try {
    if (j.contains("params")) return PolyLinePath(numbers(j["params"], at(where, "params")), std::move(pts));
    if (pts.size() == 1) return PolyLinePath({0.0}, std::move(pts));
    return PolyLinePath(std::move(pts));
  } catch (const GeometryError& e) {
    fail(where, e.what());
  }
}

json path_to_json(const PolyLinePath& c) {
  return {{"version", kFormatVersion}, {"points", c.points()}, {"params", c.params()}};
}

// ------------------------------------------------------------------ atlases

LoadedAtlas atlas_from_json(const json& j, const std::string& where) {
  expect_fields(j, where, {"space", "charts", "declared", "net"}, {"space", "charts"}, true);
  LoadedSpace s = space_from_json(j["space"], at(where, "space"), false);
  std::vector<Chart> charts;
  const json& a = array(j["charts"], at(where, "charts"));
  if (a.empty()) fail(at(where, "charts"), "no charts");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string w = at(at(where, "charts"), i);
    expect_fields(a[i], w, {"center", "radius", "bicombing"}, {"center", "radius", "bicombing"}, false);
    const std::string name = string(a[i]["bicombing"], at(w, "bicombing"));
    Bicombing sigma;
    if (name == "shortest-arc-graph" && s.graph) sigma = graph_chart_bicombing(s.graph);
    else if (name == "linear-chart" && s.cylinder) sigma = cylinder_chart_bicombing(s.cylinder);
    else if (name == "linear-chart" && s.kind == LoadedSpace::Kind::Box) sigma = box_linear_bicombing(s.linf);
    else if (name == "tight-span-solver" && s.kind == LoadedSpace::Kind::TightSpan) sigma = tight_span_bicombing(*s.metric);
    else fail(at(w, "bicombing"), "bicombing '" + name + "' is not available on " + s.description);
    const double r = number(a[i]["radius"], at(w, "radius"));
    if (!(r > 0.0)) fail(at(w, "radius"), "radius must be positive");
    charts.push_back({s.resolve(a[i]["center"], at(w, "center")), r, std::move(sigma)});
  }
  auto points = [&](const char* key, std::vector<Point> fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<Point> out;
    const json& p = array(j[key], at(where, key));
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back(s.resolve(p[i], at(at(where, key), i)));
    return out;
  };
  std::vector<Point> declared = points("declared", s.model ? s.model->atlas.declared() : std::vector<Point>{});
  std::vector<Point> net = points("net", s.model ? s.model->net : std::vector<Point>{});
  ChartAtlas atlas(s.space, std::move(charts), std::move(declared));
  return {std::move(s), std::move(atlas), std::move(net)};
}

LoadedAtlas load_atlas(const std::string& path) { return atlas_from_json(read_json_file(path), path); }

json atlas_to_json(const Model& m) {
  json charts = json::array();
  for (const auto& c : m.atlas.charts())
    charts.push_back({{"center", c.center}, {"radius", c.radius}, {"bicombing", c.sigma.name}});
  return {{"version", kFormatVersion},
          {"space", m.name},
          {"charts", charts},
          {"declared", m.atlas.declared()},
          {"net", m.net}};
}

// ----------------------------------------------------------------- reports

json make_report(const std::string& command) {
  return {{"command", command},
          {"checks", json::array()},
          {"witnesses", json::object()},
          {"timings_ms", json::object()},
          {"version", kArtifactVersion}};
}

bool report_passes(const json& report) {
  for (const auto& c : report["checks"])
    if (!c["pass"].get<bool>()) return false;
  return true;
}

}  // namespace cartan::io
