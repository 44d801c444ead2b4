// Continuation of local geodesics along paths, the resulting global bicombing,
// and the chained convexity check.
#pragma once

#include <vector>

#include "cartan/perturb.hpp"

namespace cartan {

struct ContinuationOptions {
  double delta_min = 1e-6;   // smallest admissible parameter step
  double initial_step = 0.25;
  PerturbOptions perturb;
};

struct Continuation {
  std::vector<double> s;                     // 0 = s_0 < ... < s_m = 1
  std::vector<LocalGeodesicPath> geodesics;  // from gamma(0) to gamma(s_k)
  std::vector<double> prefix_lengths;        // L(gamma|[0, s_k])
};

/// Each geodesic is obtained from the previous one by moving its endpoint
/// along gamma by less than half its perturbation radius. Throws when the step
/// falls below delta_min or a length bound L_k <= L(gamma|[0, s_k]) + tol fails.
Continuation continue_along_path(const PolyLinePath& gamma, const ChartAtlas& A,
                                 const ContinuationOptions& opts = {});

/// Length of gamma restricted to [0, s], interpolating inside charts.
double prefix_length(const PolyLinePath& gamma, double s, const ChartAtlas& A);

struct GlobalGeodesic {
  LocalGeodesicPath path;
  double geodesic_defect = 0.0;  // against the model metric on the sampled path
  std::size_t steps = 0;
};

/// Final element of the continuation of gamma, which must run from x to y.
GlobalGeodesic global_bicombing(const ChartAtlas& A, const Point& x, const Point& y,
                                const PolyLinePath& gamma, const ContinuationOptions& opts = {});

/// Verifies d(s_xy(t), s_x'y'(t)) <= (1-t) L(s_xx') + t L(s_yy') on a dyadic
/// grid by chaining: geodesics between s_xx'(s_k) and s_yy'(s_k) are built by
/// continuation and consecutive ones compared inside their perturbation
/// radius. The residual also covers the mismatch between the last chained
/// geodesic and s_x'y'.
CheckReport check_global_convexity(const ChartAtlas& A, const LocalGeodesicPath& xy,
                                   const LocalGeodesicPath& xy_bar, const LocalGeodesicPath& xx_bar,
                                   const LocalGeodesicPath& yy_bar, int t_level = 4,
                                   double tol = kTauGeo, const ContinuationOptions& opts = {});

}  // namespace cartan
