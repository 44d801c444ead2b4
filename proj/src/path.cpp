#include "cartan/path.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

PolyLinePath::PolyLinePath(std::vector<double> params, std::vector<Point> points)
    : params_(std::move(params)), points_(std::move(points)) {
  if (params_.size() != points_.size() || points_.empty())
    throw GeometryError("PolyLinePath: parameters and points must be nonempty and aligned");
  if (params_.front() != 0.0 || (params_.size() > 1 && params_.back() != 1.0))
    throw GeometryError("PolyLinePath: parameters must run from 0 to 1");
  for (std::size_t i = 1; i < params_.size(); ++i)
    if (!(params_[i] > params_[i - 1]))
      throw GeometryError("PolyLinePath: parameters must increase strictly");
}

PolyLinePath::PolyLinePath(std::vector<Point> points) {
  if (points.empty()) throw GeometryError("PolyLinePath: empty");
  const std::size_t n = points.size();
  params_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    params_[i] = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) params_.back() = 1.0;
  points_ = std::move(points);
}

Point PolyLinePath::at(double t, const SegmentInterpolator& interp) const {
  if (points_.size() == 1 || t <= 0.0) return points_.front();
  if (t >= 1.0) return points_.back();
  const auto it = std::upper_bound(params_.begin(), params_.end(), t);
  const auto hi = static_cast<std::size_t>(it - params_.begin());
  const std::size_t lo = hi - 1;
  if (params_[lo] == t) return points_[lo];
  if (!interp) throw GeometryError("PolyLinePath: parameter off the sample grid and no interpolator");
  const double u = (t - params_[lo]) / (params_[hi] - params_[lo]);
  return interp(points_[lo], points_[hi], u);
}

PolyLinePath PolyLinePath::resample(const std::vector<double>& params,
                                    const SegmentInterpolator& interp) const {
  std::vector<Point> pts;
  pts.reserve(params.size());
  for (double t : params) pts.push_back(at(t, interp));
  return PolyLinePath(params, std::move(pts));
}

double path_length(const PolyLinePath& c, const MetricSpace& space) {
  double L = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) L += space.distance(c.points()[i - 1], c.points()[i]);
  return L;
}

double path_distance(const PolyLinePath& c, const PolyLinePath& c2, const MetricSpace& space,
                     const SegmentInterpolator& interp) {
  std::vector<double> ts;
  std::set_union(c.params().begin(), c.params().end(), c2.params().begin(), c2.params().end(),
                 std::back_inserter(ts));
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double m = 0.0;
  for (double t : ts) m = std::max(m, space.distance(c.at(t, interp), c2.at(t, interp)));
  return m;
}

double geodesic_defect(const PolyLinePath& c, const MetricSpace& space) {
  const auto& p = c.points();
  const auto& t = c.params();
  const double D = space.distance(p.front(), p.back());
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      worst = std::max(worst, std::abs(space.distance(p[i], p[j]) - (t[j] - t[i]) * D));
  return worst;
}

Point lerp(const Point& a, const Point& b, double t) {
  if (a.size() != b.size()) throw GeometryError("lerp: dimension mismatch");
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1 - t) * a[i] + t * b[i];
  return out;
}

std::vector<double> dyadic_grid(int level) {
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = static_cast<double>(k) / static_cast<double>(n);
  return g;
}

}  // namespace cartan
