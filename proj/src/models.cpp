#include "cartan/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>
#include <sstream>

namespace cartan {

Bicombing graph_chart_bicombing(std::shared_ptr<const MetricGraph> g) {
  return shortest_arc_bicombing(std::move(g));
}

Bicombing cylinder_chart_bicombing(std::shared_ptr<const FlatCylinder> cyl) {
  Bicombing b;
  b.space = cyl;
  b.eval = [cyl](const Point& x, const Point& y, double t) { return cyl->straight(x, y, t); };
  b.domain = [cyl](const Point& p) { return cyl->contains(p); };
  b.name = "linear-chart";
  return b;
}

Bicombing box_linear_bicombing(std::shared_ptr<const LinfSpace> box) {
  Bicombing b;
  b.space = box;
  b.eval = [](const Point& x, const Point& y, double t) { return lerp(x, y, t); };
  b.domain = [box](const Point& p) { return box->contains(p); };
  b.name = "linear-chart";
  return b;
}

ChartAtlas graph_atlas(std::shared_ptr<const MetricGraph> g, double radius, double declared_spacing) {
  const Bicombing sigma = graph_chart_bicombing(g);
  std::vector<Chart> charts;
  for (std::size_t v = 0; v < g->vertex_count(); ++v) charts.push_back({g->vertex_point(v), radius, sigma});
  for (std::size_t e = 0; e < g->edges().size(); ++e)
    charts.push_back({g->edge_point(e, 0.5 * g->edges()[e].length), radius, sigma});
  return ChartAtlas(g, std::move(charts), g->net(declared_spacing));
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Model graph_model(std::string name, std::shared_ptr<const MetricGraph> g, double radius,
                  double net_spacing) {
  Model m{std::move(name), graph_atlas(g, radius, net_spacing / 2), g, nullptr, nullptr, {}, net_spacing};
  m.net = g->net(net_spacing);
  return m;
}

}  // namespace

Model cycle_model(int n) {
  if (n < 3) throw GeometryError("cycle: need at least 3 vertices");
  std::vector<std::string> names;
  std::vector<GraphEdge> edges;
  for (int i = 0; i < n; ++i) {
    names.push_back("v" + std::to_string(i));
    edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>((i + 1) % n), 1.0});
  }
  auto g = std::make_shared<const MetricGraph>(names, edges);
  const double r = std::min(2.0, n / 4.0 - 0.25);
  return graph_model("cycle(" + std::to_string(n) + ")", g, r, 0.5);
}

Model cylinder_model(double circumference, double height) {
  if (!(circumference >= 4.0) || !(height > 0.0))
    throw GeometryError("cylinder: need circumference >= 4 and positive height");
  auto cyl = std::make_shared<const FlatCylinder>(circumference, height);
  const Bicombing sigma = cylinder_chart_bicombing(cyl);
  const double r = std::min(2.0, circumference / 4.0 - 0.25);
  auto grid = [&](double h) {
    std::vector<Point> pts;
    const int na = static_cast<int>(std::ceil(circumference / h - 1e-9));
    const int nh = static_cast<int>(std::ceil(height / h - 1e-9));
    for (int j = 0; j <= nh; ++j)
      for (int i = 0; i < na; ++i)
        pts.push_back({circumference * i / na, height * j / nh});
    return pts;
  };
  std::vector<Chart> charts;
  for (const auto& c : grid(0.5)) charts.push_back({c, r, sigma});
  Model m{"cylinder(" + fmt(circumference) + "," + fmt(height) + ")",
          ChartAtlas(cyl, std::move(charts), grid(0.25)), nullptr, cyl, nullptr, grid(0.5), 0.5};
  return m;
}

Model tree_model(std::vector<std::string> vertices, std::vector<GraphEdge> edges) {
  auto g = std::make_shared<const MetricGraph>(std::move(vertices), std::move(edges));
  if (!g->is_tree()) throw GeometryError("tree: edge list does not form a tree");
  double longest = 0.0;
  for (const auto& e : g->edges()) longest = std::max(longest, e.length);
  std::ostringstream name;
  name << "tree(";
  for (std::size_t i = 0; i < g->edges().size(); ++i)
    name << (i ? "," : "") << g->edges()[i].u << "-" << g->edges()[i].v << ":" << g->edges()[i].length;
  name << ")";
  return graph_model(name.str(), g, longest, 0.25);
}

Model tripod_model(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw GeometryError("tripod: legs must be positive");
  Model m = tree_model({"o", "l1", "l2", "l3"}, {{0, 1, a}, {0, 2, b}, {0, 3, c}});
  m.name = "tripod(" + fmt(a) + "," + fmt(b) + "," + fmt(c) + ")";
  return m;
}

Model random_tree_model(std::uint64_t seed, int n) {
  if (n < 2) throw GeometryError("tree: need at least 2 vertices");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len(0.5, 1.5);
  std::vector<std::string> names;
  std::vector<GraphEdge> edges;
  for (int i = 0; i < n; ++i) names.push_back("t" + std::to_string(i));
  for (int i = 1; i < n; ++i) {
    const auto parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    // round to 1/64 so specs print exactly
    edges.push_back({static_cast<std::size_t>(parent), static_cast<std::size_t>(i),
                     std::round(len(rng) * 64.0) / 64.0});
  }
  return tree_model(std::move(names), std::move(edges));
}

Model rectangle_model(double w, double h) {
  if (!(w > 0 && h > 0)) throw GeometryError("rectangle: sides must be positive");
  auto box = std::make_shared<const LinfSpace>(Point{0.0, 0.0}, Point{w, h});
  const Bicombing sigma = box_linear_bicombing(box);
  auto grid = [&](double s) {
    std::vector<Point> pts;
    const int nx = static_cast<int>(std::ceil(w / s - 1e-9));
    const int ny = static_cast<int>(std::ceil(h / s - 1e-9));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) pts.push_back({w * i / nx, h * j / ny});
    return pts;
  };
  std::vector<Chart> charts;
  for (const auto& c : grid(0.5)) charts.push_back({c, 1.0, sigma});
  return Model{"rectangle(" + fmt(w) + "," + fmt(h) + ")",
               ChartAtlas(box, std::move(charts), grid(0.25)), nullptr, nullptr, box, grid(0.5), 0.5};
}

Model generate_model(const std::string& spec) {
  static const std::regex call(R"(\s*([a-z]+)\s*\((.*)\)\s*)");
  std::smatch m;
  if (!std::regex_match(spec, m, call)) throw GeometryError("unknown model spec '" + spec + "'");
  const std::string name = m[1];
  std::vector<std::string> args;
  {
    std::stringstream ss(m[2].str());
    std::string a;
    while (std::getline(ss, a, ',')) {
      a.erase(0, a.find_first_not_of(" \t"));
      a.erase(a.find_last_not_of(" \t") + 1);
      args.push_back(a);
    }
  }
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(args.at(i), &used);
      if (used != args[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw GeometryError("model spec '" + spec + "': argument " + std::to_string(i + 1) +
                          " is not a number");
    }
  };
  auto expect = [&](std::size_t n) {
    if (args.size() != n)
      throw GeometryError("model spec '" + spec + "': expected " + std::to_string(n) + " arguments");
  };
  if (name == "cycle") {
    expect(1);
    const double n = num(0);
    if (n != std::floor(n)) throw GeometryError("cycle: n must be an integer");
    return cycle_model(static_cast<int>(n));
  }
  if (name == "cylinder") {
    expect(2);
    return cylinder_model(num(0), num(1));
  }
  if (name == "tripod") {
    expect(3);
    return tripod_model(num(0), num(1), num(2));
  }
  if (name == "rectangle") {
    expect(2);
    return rectangle_model(num(0), num(1));
  }
  if (name == "tree") {
    if (!args.empty() && args[0] == "random") {
      expect(3);
      return random_tree_model(static_cast<std::uint64_t>(num(1)), static_cast<int>(num(2)));
    }
    static const std::regex edge(R"((\d+)-(\d+):([0-9.eE+-]+))");
    std::vector<GraphEdge> edges;
    std::size_t nv = 0;
    for (const auto& a : args) {
      std::smatch em;
      if (!std::regex_match(a, em, edge)) throw GeometryError("tree: bad edge '" + a + "'");
      const auto u = std::stoul(em[1]), v = std::stoul(em[2]);
      edges.push_back({u, v, std::stod(em[3])});
      nv = std::max({nv, u + 1, v + 1});
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < nv; ++i) names.push_back("t" + std::to_string(i));
    return tree_model(std::move(names), std::move(edges));
  }
  throw GeometryError("unknown model '" + name + "'");
}

}  // namespace cartan
