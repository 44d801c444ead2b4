// Moving the endpoints of a consistent local geodesic: the thirds iteration.
#pragma once

#include <vector>

#include "cartan/atlas.hpp"

namespace cartan {

struct PerturbOptions {
  double tol = kTauGeo;        // stop once the combined gap drops below this
  int max_iterations = 200;    // per recursion level
  int max_depth = 60;
  double eta_top = 1e-3;       // child tolerance relative to the previous gap, top level
  double eta_deep = 0.1;       // same, below the top level
  bool certify = true;
};

/// Record of the outermost iteration.
struct PerturbTrace {
  std::vector<double> p_gaps;  // d(p_{n-1}, p_n)
  std::vector<double> q_gaps;  // d(q_{n-1}, q_n)
  std::vector<double> gaps;    // p_gaps + q_gaps
  int iterations = 0;
  int depth = 0;               // deepest recursion level reached
  long base_solves = 0;
  long shortcuts = 0;          // calls whose endpoints were already within tolerance
};

/// The consistent local geodesic from xbar to ybar near c. Requires
/// d(c(0), xbar) < c.epsilon and d(c(1), ybar) < c.epsilon. Throws on a
/// violated precondition, an exhausted iteration budget, or a violated length
/// bound L <= L(c) + d(c(0), xbar) + d(c(1), ybar) + tol.
LocalGeodesicPath perturb_geodesic(const LocalGeodesicPath& c, const Point& xbar, const Point& ybar,
                                   const ChartAtlas& A, PerturbTrace* trace = nullptr,
                                   const PerturbOptions& opts = {});

}  // namespace cartan
