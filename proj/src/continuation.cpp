#include "cartan/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

namespace {

LocalGeodesicPath constant_geodesic(const Point& p, const ChartAtlas& A) {
  const auto k = A.best_chart(p);
  if (!k) throw GeometryError("continuation: start point lies in no chart");
  return certify_local_geodesic(ChartPath::constant(p, *k), A);
}

}  // namespace

double prefix_length(const PolyLinePath& gamma, double s, const ChartAtlas& A) {
  const auto& X = A.space();
  const auto& t = gamma.params();
  const auto& p = gamma.points();
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (t[i + 1] <= s) {
      L += X.distance(p[i], p[i + 1]);
    } else {
      if (s > t[i]) L += X.distance(p[i], gamma.at(s, A.interpolator()));
      break;
    }
  }
  return L;
}

Continuation continue_along_path(const PolyLinePath& gamma, const ChartAtlas& A,
                                 const ContinuationOptions& opts) {
  if (gamma.size() == 0) throw GeometryError("continue_along_path: empty path");
  const auto& X = A.space();
  const auto interp = A.interpolator();
  Continuation out;
  out.s.push_back(0.0);
  out.geodesics.push_back(constant_geodesic(gamma.front(), A));
  out.prefix_lengths.push_back(0.0);

  double s = 0.0;
  double step = opts.initial_step;
  while (s < 1.0) {
    const auto& cur = out.geodesics.back();
    double delta = std::min(step, 1.0 - s);
    Point target = gamma.at(s + delta, interp);
    while (!(X.distance(cur.path.end(), target) < 0.5 * cur.epsilon)) {
      delta *= 0.5;
      if (delta < opts.delta_min)
        throw GeometryError("continue_along_path: step stalled below delta_min at s=" +
                            std::to_string(s));
      target = gamma.at(s + delta, interp);
    }
    const double s_next = (1.0 - s - delta) <= 1e-15 ? 1.0 : s + delta;
    if (s_next == 1.0) target = gamma.back();
    LocalGeodesicPath next = perturb_geodesic(cur, gamma.front(), target, A, nullptr, opts.perturb);
    const double bound = prefix_length(gamma, s_next, A);
    if (next.length > bound + opts.perturb.tol)
      throw GeometryError("continue_along_path: length " + std::to_string(next.length) +
                          " exceeds path prefix " + std::to_string(bound) + " at s=" +
                          std::to_string(s_next));
    out.s.push_back(s_next);
    out.geodesics.push_back(std::move(next));
    out.prefix_lengths.push_back(bound);
    s = s_next;
    step = 2.0 * delta;
  }
  return out;
}

GlobalGeodesic global_bicombing(const ChartAtlas& A, const Point& x, const Point& y,
                                const PolyLinePath& gamma, const ContinuationOptions& opts) {
  const auto& X = A.space();
  if (X.distance(gamma.front(), x) > kTauMetric || X.distance(gamma.back(), y) > kTauMetric)
    throw GeometryError("global_bicombing: path does not connect the given points");
  auto cont = continue_along_path(gamma, A, opts);
  GlobalGeodesic g;
  g.steps = cont.geodesics.size() - 1;
  g.path = std::move(cont.geodesics.back());
  g.geodesic_defect = geodesic_defect(g.path.path.sample(kCertifyLevel, A), X);
  return g;
}

CheckReport check_global_convexity(const ChartAtlas& A, const LocalGeodesicPath& xy,
                                   const LocalGeodesicPath& xy_bar, const LocalGeodesicPath& xx_bar,
                                   const LocalGeodesicPath& yy_bar, int t_level, double tol,
                                   const ContinuationOptions& opts) {
  const auto& X = A.space();
  CheckReport r;
  r.property = "global-convexity";
  r.tolerance = tol;
  auto near = [&](const Point& a, const Point& b) { return X.distance(a, b) <= kTauSample; };
  if (!near(xy.path.start(), xx_bar.path.start()) || !near(xy.path.end(), yy_bar.path.start()) ||
      !near(xy_bar.path.start(), xx_bar.path.end()) || !near(xy_bar.path.end(), yy_bar.path.end()))
    throw GeometryError("check_global_convexity: endpoints of the four geodesics do not match");

  const auto grid = dyadic_grid(t_level);
  std::vector<double> chained(grid.size(), 0.0);
  LocalGeodesicPath cur = xy;
  double s = 0.0, step = opts.initial_step;
  std::vector<double> partition{0.0};
  while (s < 1.0) {
    double delta = std::min(step, 1.0 - s);
    Point p, q;
    for (;;) {
      p = xx_bar.path.at(s + delta, A);
      q = yy_bar.path.at(s + delta, A);
      if (X.distance(cur.path.start(), p) < 0.5 * cur.epsilon &&
          X.distance(cur.path.end(), q) < 0.5 * cur.epsilon)
        break;
      delta *= 0.5;
      if (delta < opts.delta_min)
        throw GeometryError("check_global_convexity: chaining stalled at s=" + std::to_string(s));
    }
    LocalGeodesicPath next = perturb_geodesic(cur, p, q, A, nullptr, opts.perturb);
    for (std::size_t i = 0; i < grid.size(); ++i)
      chained[i] += X.distance(cur.path.at(grid[i], A), next.path.at(grid[i], A));
    cur = std::move(next);
    s = (1.0 - s - delta) <= 1e-15 ? 1.0 : s + delta;
    partition.push_back(s);
    step = 2.0 * delta;
  }

  const double closure = chart_path_distance(cur.path, xy_bar.path, A);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double rhs = (1 - t) * xx_bar.length + t * yy_bar.length;
    const double v = chained[i] + closure - rhs;
    if (v > r.residual) {
      r.residual = v;
      r.witness = {{xy.path.start(), xy.path.end(), xy_bar.path.start(), xy_bar.path.end()}, {t}};
    }
  }
  r.note = std::to_string(partition.size() - 1) + " chained steps, closure " + std::to_string(closure);
  r.pass = r.residual <= tol;
  return r;
}

}  // namespace cartan
