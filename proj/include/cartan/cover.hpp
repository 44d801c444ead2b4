// Truncated universal cover: consistent local geodesics from a base point.
#pragma once

#include <vector>

#include "cartan/perturb.hpp"

namespace cartan {

struct CoverPoint {
  LocalGeodesicPath geodesic;  // starts at the base point
  Point endpoint;              // exp image
  double length = 0.0;
  std::size_t net_index = 0;
};

struct CoverOptions {
  double tau_id = 1e-4;        // identification threshold on path distance
  double neighbour_radius = 0; // 0: 1.01 x the smallest nonzero net spacing
  double margin = -1;          // extension slack above l_max; negative: 2 x neighbour radius
  std::size_t max_points = 200000;
  PerturbOptions perturb;
};

struct Cover {
  Point base;
  double l_max = 0.0;
  std::vector<CoverPoint> points;  // length <= l_max, in discovery order
  std::size_t perturbations = 0;
  std::size_t skipped = 0;         // extensions recognized as existing points
};

/// Breadth-first continuation over the net starting from the constant path at
/// the base, which must be a net point. Two cover points over the same net
/// point are identified when their path distance is below tau_id; a distance
/// between tau_id and the perturbation radius is reported as an ambiguity.
Cover build_cover(const ChartAtlas& A, const std::vector<Point>& net, const Point& base,
                  double l_max, const CoverOptions& opts = {});

/// Cover points over `target` (a point within 1e-9 of some net point).
std::vector<const CoverPoint*> preimages(const Cover& cover, const Point& target,
                                         const MetricSpace& X, double tol = 1e-9);

/// r_s(c): t -> c(st).
CoverPoint cover_retraction(const CoverPoint& c, double s, const ChartAtlas& A);

}  // namespace cartan
