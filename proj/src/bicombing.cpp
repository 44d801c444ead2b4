#include "cartan/bicombing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cartan/lp.hpp"

namespace cartan {

namespace {

void require_defined(const Bicombing& s, const Point& p) {
  if (!s.defined_on(p)) throw GeometryError(s.name + ": evaluator undefined at a sampled point");
}

CheckReport make_report(std::string property, double tol) {
  CheckReport r;
  r.property = std::move(property);
  r.tolerance = tol;
  return r;
}

void consider(CheckReport& r, double violation, CheckWitness w) {
  if (violation > r.residual) {
    r.residual = violation;
    r.witness = std::move(w);
  }
}

void finish(CheckReport& r) { r.pass = r.residual <= r.tolerance; }

std::vector<std::pair<double, double>> subsegments_for(const CheckPlan& plan) {
  if (!plan.subsegments.empty()) return plan.subsegments;
  const auto g = dyadic_grid(std::min(plan.t_level, 3));
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i; j < g.size(); ++j) out.emplace_back(g[i], g[j]);
  return out;
}

}  // namespace

CheckReport check_geodesic(const Bicombing& s, const CheckPlan& plan, double tol) {
  auto r = make_report("geodesic", tol);
  const auto grid = dyadic_grid(plan.t_level);
  const auto& X = *s.space;
  for (const auto& [x, y] : plan.pairs) {
    require_defined(s, x);
    require_defined(s, y);
    const double D = X.distance(x, y);
    std::vector<Point> c;
    c.reserve(grid.size());
    for (double t : grid) c.push_back(s(x, y, t));
    consider(r, X.distance(c.front(), x), {{x, y}, {0.0}});
    consider(r, X.distance(c.back(), y), {{x, y}, {1.0}});
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const double defect = std::abs(X.distance(c[i], c[j]) - (grid[j] - grid[i]) * D);
        consider(r, defect, {{x, y}, {grid[i], grid[j]}});
      }
  }
  finish(r);
  return r;
}

CheckReport check_consistency(const Bicombing& s, const CheckPlan& plan, double tol) {
  auto r = make_report("consistency", tol);
  const auto grid = dyadic_grid(plan.t_level);
  const auto segs = subsegments_for(plan);
  const auto& X = *s.space;
  for (const auto& [x, y] : plan.pairs) {
    require_defined(s, x);
    require_defined(s, y);
    for (const auto& [a, b] : segs) {
      if (a < 0 || b > 1 || a > b) throw GeometryError("check_consistency: subsegment outside [0,1]");
      const Point pa = s(x, y, a);
      const Point pb = s(x, y, b);
      for (double t : grid) {
        const double v = X.distance(s(pa, pb, t), s(x, y, (1 - t) * a + t * b));
        consider(r, v, {{x, y}, {a, b, t}});
      }
    }
  }
  finish(r);
  return r;
}

CheckReport check_conical(const Bicombing& s, const CheckPlan& plan, double tol) {
  auto r = make_report("conical", tol);
  const auto grid = dyadic_grid(plan.t_level);
  const auto& X = *s.space;
  for (const auto& q : plan.quadruples) {
    for (const auto& p : q) require_defined(s, p);
    const double dy = X.distance(q[0], q[2]);
    const double dz = X.distance(q[1], q[3]);
    for (double t : grid) {
      const double lhs = X.distance(s(q[0], q[1], t), s(q[2], q[3], t));
      consider(r, lhs - ((1 - t) * dy + t * dz), {{q[0], q[1], q[2], q[3]}, {t}});
    }
  }
  finish(r);
  return r;
}

CheckReport check_convexity(const Bicombing& s, const CheckPlan& plan, double tol) {
  auto r = make_report("convexity", tol);
  const auto grid = dyadic_grid(plan.t_level);
  const std::size_t n = grid.size() - 1;
  const auto& X = *s.space;
  for (const auto& q : plan.quadruples) {
    for (const auto& p : q) require_defined(s, p);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      f[i] = X.distance(s(q[0], q[1], grid[i]), s(q[2], q[3], grid[i]));
    // Midpoint convexity on every nested dyadic level.
    for (std::size_t step = n / 2; step >= 1; step /= 2) {
      for (std::size_t i = step; i + step <= n; i += step) {
        const double defect = f[i] - 0.5 * (f[i - step] + f[i + step]);
        consider(r, defect,
                 {{q[0], q[1], q[2], q[3]}, {grid[i - step], grid[i], grid[i + step]}});
      }
      if (step == 1) break;
    }
  }
  finish(r);
  return r;
}

CheckReport check_reversibility(const Bicombing& s, const CheckPlan& plan, double tol) {
  auto r = make_report("reversibility", tol);
  const auto grid = dyadic_grid(plan.t_level);
  const auto& X = *s.space;
  for (const auto& [y, z] : plan.pairs) {
    require_defined(s, y);
    require_defined(s, z);
    for (double t : grid) consider(r, X.distance(s(z, y, t), s(y, z, 1 - t)), {{y, z}, {t}});
  }
  finish(r);
  return r;
}

std::vector<CheckReport> check_all(const Bicombing& s, const CheckPlan& plan, double tol) {
  return {check_geodesic(s, plan, tol), check_consistency(s, plan, tol), check_conical(s, plan, tol),
          check_convexity(s, plan, tol), check_reversibility(s, plan, tol)};
}

// ------------------------------------------------------------ ConvexPolytope

ConvexPolytope::ConvexPolytope(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw GeometryError("ConvexPolytope: no vertices");
  for (const auto& v : vertices_)
    if (v.size() != vertices_.front().size()) throw GeometryError("ConvexPolytope: mixed dimensions");
}

bool ConvexPolytope::contains(const Point& p, double tol) const {
  if (p.size() != dimension()) return false;
  const std::size_t k = vertices_.size();
  LinearProgram lp;
  lp.variables = k;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = vertices_[j][i];
    lp.eq_rows.push_back(row);
    lp.eq_rhs.push_back(p[i]);
  }
  lp.eq_rows.emplace_back(k, 1.0);
  lp.eq_rhs.push_back(1.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> row(k, 0.0);
    row[j] = -1.0;
    lp.le_rows.push_back(row);
    lp.le_rhs.push_back(0.0);
  }
  return solve_lp(lp, tol).feasible();
}

Bicombing linear_bicombing(const ConvexPolytope& C) {
  Bicombing b;
  b.space = std::make_shared<LinfSpace>(C.dimension());
  b.domain = [C](const Point& p) { return C.contains(p); };
  b.eval = [C](const Point& x, const Point& y, double t) {
    if (!C.contains(x) || !C.contains(y)) throw GeometryError("linear: endpoint outside the polytope");
    return lerp(x, y, t);
  };
  b.name = "linear";
  return b;
}

Bicombing shortest_arc_bicombing(std::shared_ptr<const MetricGraph> g) {
  Bicombing b;
  b.space = g;
  b.eval = [g](const Point& x, const Point& y, double t) { return g->shortest_arc(x, y, t); };
  b.domain = [g](const Point& p) { return g->contains(p); };
  b.name = "shortest-arc-graph";
  return b;
}

// -------------------------------------------------------------------- solver

namespace {

void require_on_hull(const DistanceMatrix& X, const Point& p) {
  if (p.size() != X.size() || !is_admissible(p, X).admissible ||
      extremality_residual(p, X) > 1e-8)
    throw GeometryError("solve_convex_bicombing: point outside the tight span");
}

}  // namespace

ExtremalFunction tight_span_midpoint(const DistanceMatrix& X, const Point& x, const Point& y) {
  Point m = lerp(x, y, 0.5);
  if (extremality_residual(m, X) <= 1e-13) return m;
  return project_to_extremal(m, X, 1e-13, 200000).f;
}

PolyLinePath midpoint_subdivision_path(const DistanceMatrix& X, const Point& x, const Point& y,
                                       int depth) {
  require_on_hull(X, x);
  require_on_hull(X, y);
  if (linf_distance(x, y) == 0.0) return PolyLinePath({0.0}, {x});
  std::vector<Point> pts{x, y};
  for (int level = 0; level < depth; ++level) {
    std::vector<Point> next;
    next.reserve(2 * pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      next.push_back(pts[i]);
      next.push_back(tight_span_midpoint(X, pts[i], pts[i + 1]));
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  return PolyLinePath(std::move(pts));
}

namespace {

Point midpoint_rule_point(const DistanceMatrix& X, const Point& x, const Point& y, double t) {
  t = std::clamp(t, 0.0, 1.0);
  Point a = x, b = y;
  double lo = 0.0, hi = 1.0;
  for (int level = 0; level < 40; ++level) {
    if (t == lo) return a;
    if (t == hi) return b;
    if (linf_distance(a, b) == 0.0) return a;
    const double mid = 0.5 * (lo + hi);
    Point m = tight_span_midpoint(X, a, b);
    if (t == mid) return m;
    if (t < mid) {
      b = std::move(m);
      hi = mid;
    } else {
      a = std::move(m);
      lo = mid;
    }
  }
  return lerp(a, b, (t - lo) / (hi - lo));
}

std::function<bool(const Point&)> tight_span_domain(const DistanceMatrix& X) {
  return [X](const Point& p) {
    return p.size() == X.size() && is_admissible(p, X, 1e-8).admissible &&
           extremality_residual(p, X) <= 1e-8;
  };
}

}  // namespace

Bicombing midpoint_rule_bicombing(const DistanceMatrix& X) {
  Bicombing b;
  b.space = std::make_shared<LinfSpace>(X.size());
  b.domain = tight_span_domain(X);
  b.eval = [X](const Point& x, const Point& y, double t) { return midpoint_rule_point(X, x, y, t); };
  b.name = "tight-span-midpoint";
  return b;
}

PolyLinePath solve_convex_bicombing(const TightSpanGeodesics& G, const Point& x, const Point& y,
                                    int depth, double tol) {
  const auto& X = G.complex().X;
  require_on_hull(X, x);
  require_on_hull(X, y);
  if (linf_distance(x, y) == 0.0) return PolyLinePath({0.0}, {x});
  const auto path = G.solve(x, y).path.resample(dyadic_grid(depth), lerp);
  const double defect = geodesic_defect(path, LinfSpace(X.size()));
  if (defect > tol)
    throw GeometryError("solve_convex_bicombing: geodesic defect " + std::to_string(defect) +
                        " above tolerance");
  return path;
}

PolyLinePath solve_convex_bicombing(const DistanceMatrix& X, const Point& x, const Point& y,
                                    int depth, double tol) {
  return solve_convex_bicombing(TightSpanGeodesics(enumerate_cells(X)), x, y, depth, tol);
}

Bicombing tight_span_bicombing(const DistanceMatrix& X) {
  struct State {
    explicit State(const DistanceMatrix& X) : geodesics(enumerate_cells(X)) {}
    TightSpanGeodesics geodesics;
    std::mutex lock;
    std::map<std::pair<Point, Point>, PolyLinePath> cache;
  };
  auto state = std::make_shared<State>(X);
  Bicombing b;
  b.space = std::make_shared<LinfSpace>(X.size());
  b.domain = tight_span_domain(X);
  b.eval = [state](const Point& x, const Point& y, double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    const auto key = std::make_pair(x, y);
    {
      std::lock_guard<std::mutex> g(state->lock);
      if (auto it = state->cache.find(key); it != state->cache.end()) return it->second.at(t, lerp);
    }
    auto path = state->geodesics.solve(x, y).path;
    const Point p = path.at(t, lerp);
    std::lock_guard<std::mutex> g(state->lock);
    state->cache.emplace(key, std::move(path));
    return p;
  };
  b.name = "tight-span-solver";
  return b;
}

}  // namespace cartan
