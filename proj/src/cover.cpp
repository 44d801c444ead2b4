#include "cartan/cover.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace cartan {

Cover build_cover(const ChartAtlas& A, const std::vector<Point>& net, const Point& base,
                  double l_max, const CoverOptions& opts) {
  const auto& X = A.space();
  if (!(l_max >= 0.0) || !std::isfinite(l_max)) throw GeometryError("build_cover: invalid l_max");
  std::size_t base_index = net.size();
  for (std::size_t i = 0; i < net.size(); ++i)
    if (X.distance(net[i], base) <= 1e-12) base_index = i;
  if (base_index == net.size()) throw GeometryError("build_cover: base point is not a net point");

  double radius = opts.neighbour_radius;
  if (radius <= 0.0) {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < net.size(); ++i)
      for (std::size_t j = i + 1; j < net.size(); ++j) {
        const double d = X.distance(net[i], net[j]);
        if (d > 1e-12) h = std::min(h, d);
      }
    radius = 1.01 * h;
  }
  const double margin = opts.margin >= 0.0 ? opts.margin : 2.0 * radius;

  std::vector<std::vector<std::size_t>> nbrs(net.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j) {
      const double d = X.distance(net[i], net[j]);
      if (i != j && d > 1e-12 && d <= radius) nbrs[i].push_back(j);
    }

  std::vector<CoverPoint> all;
  std::vector<std::vector<std::size_t>> over(net.size());
  const auto k0 = A.best_chart(base);
  if (!k0) throw GeometryError("build_cover: base point lies in no chart");
  {
    auto g = certify_local_geodesic(ChartPath::constant(base, *k0), A);
    all.push_back({g, base, 0.0, base_index});
    over[base_index].push_back(0);
  }

  Cover cover;
  cover.base = base;
  cover.l_max = l_max;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (all[i].length > l_max + margin) continue;
    const LocalGeodesicPath c = all[i].geodesic;  // `all` grows below
    for (std::size_t w : nbrs[all[i].net_index]) {
      if (!(X.distance(c.path.end(), net[w]) < c.epsilon))
        throw GeometryError("build_cover: net resolution insufficient, neighbour spacing exceeds "
                            "the perturbation radius " + std::to_string(c.epsilon));
      bool known = false;
      for (std::size_t j : over[w])
        if (chart_path_distance(c.path, all[j].geodesic.path, A) < c.epsilon) {
          known = true;
          break;
        }
      if (known) {
        ++cover.skipped;
        continue;
      }
      LocalGeodesicPath next = perturb_geodesic(c, base, net[w], A, nullptr, opts.perturb);
      ++cover.perturbations;
      bool duplicate = false;
      for (std::size_t j : over[w]) {
        const double D = chart_path_distance(next.path, all[j].geodesic.path, A);
        if (D < opts.tau_id) {
          duplicate = true;
          break;
        }
        if (D < std::min(next.epsilon, all[j].geodesic.epsilon))
          throw GeometryError("build_cover: duplicate-collapse ambiguity, path distance " +
                              std::to_string(D));
      }
      if (duplicate) continue;
      const double L = next.length;
      all.push_back({std::move(next), net[w], L, w});
      over[w].push_back(all.size() - 1);
      queue.push_back(all.size() - 1);
      if (all.size() > opts.max_points) throw GeometryError("build_cover: point budget exceeded");
    }
  }
  for (auto& p : all)
    if (p.length <= l_max + kTauGeo) cover.points.push_back(std::move(p));
  return cover;
}

std::vector<const CoverPoint*> preimages(const Cover& cover, const Point& target,
                                         const MetricSpace& X, double tol) {
  std::vector<const CoverPoint*> out;
  for (const auto& p : cover.points)
    if (X.distance(p.endpoint, target) <= tol) out.push_back(&p);
  return out;
}

CoverPoint cover_retraction(const CoverPoint& c, double s, const ChartAtlas& A) {
  if (!(s >= 0.0 && s <= 1.0)) throw GeometryError("cover_retraction: s outside [0,1]");
  if (s == 1.0) return c;
  const ChartPath r = c.geodesic.path.restrict(0.0, s, A);
  CoverPoint out;
  out.geodesic = certify_local_geodesic(r, A);
  out.endpoint = r.end();
  out.length = out.geodesic.length;
  out.net_index = c.net_index;
  return out;
}

}  // namespace cartan
