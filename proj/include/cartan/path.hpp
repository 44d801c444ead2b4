// Sampled polyline paths, their lengths and the sup-distance between paths.
#pragma once

#include <functional>
#include <vector>

#include "cartan/spaces.hpp"

namespace cartan {

/// Evaluates the point at fraction t between two consecutive samples.
using SegmentInterpolator = std::function<Point(const Point&, const Point&, double)>;

class PolyLinePath {
 public:
  PolyLinePath() = default;
  /// Parameters must increase strictly from 0 to 1 (a single sample at 0 is a
  /// constant path).
  PolyLinePath(std::vector<double> params, std::vector<Point> points);
  /// Uniformly spaced parameters.
  explicit PolyLinePath(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& params() const { return params_; }
  const std::vector<Point>& points() const { return points_; }
  const Point& front() const { return points_.front(); }
  const Point& back() const { return points_.back(); }

  /// Point at parameter t; between samples the interpolator is used.
  Point at(double t, const SegmentInterpolator& interp) const;
  /// Samples at the given sorted parameters.
  PolyLinePath resample(const std::vector<double>& params, const SegmentInterpolator& interp) const;

 private:
  std::vector<double> params_;
  std::vector<Point> points_;
};

/// Sum of distances between consecutive samples.
double path_length(const PolyLinePath& c, const MetricSpace& space);

/// sup_t d(c(t), c'(t)) evaluated on the union of both parameter sets.
/// With a null interpolator both paths must share their parameters exactly.
double path_distance(const PolyLinePath& c, const PolyLinePath& c2, const MetricSpace& space,
                     const SegmentInterpolator& interp = nullptr);

/// max over sample pairs of |d(c(s), c(t)) - |s - t| d(c(0), c(1))|.
double geodesic_defect(const PolyLinePath& c, const MetricSpace& space);

/// Linear interpolation, for paths in l-infinity.
Point lerp(const Point& a, const Point& b, double t);

/// Parameters k / 2^level, k = 0..2^level.
std::vector<double> dyadic_grid(int level);

}  // namespace cartan
