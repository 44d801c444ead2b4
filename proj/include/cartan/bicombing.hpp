// Geodesic bicombings as evaluators, sampling-based property checkers, and the
// midpoint solver for the convex bicombing of a finite tight span.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cartan/path.hpp"
#include "cartan/spaces.hpp"
#include "cartan/tight_span.hpp"
#include "cartan/tight_span_geodesic.hpp"

namespace cartan {

using BicombingFn = std::function<Point(const Point&, const Point&, double)>;

struct Bicombing {
  SpacePtr space;
  BicombingFn eval;
  std::function<bool(const Point&)> domain;  // empty: defined on the whole space
  std::string name;

  Point operator()(const Point& x, const Point& y, double t) const { return eval(x, y, t); }
  bool defined_on(const Point& p) const { return !domain || domain(p); }
  /// Interpolator view for PolyLinePath evaluation.
  SegmentInterpolator interpolator() const {
    return [f = eval](const Point& a, const Point& b, double t) { return f(a, b, t); };
  }
};

struct CheckWitness {
  std::vector<Point> points;
  std::vector<double> params;
};

struct CheckReport {
  std::string property;
  bool pass = true;
  double residual = 0.0;  // worst violation found (0 when nothing was sampled)
  double tolerance = 0.0;
  CheckWitness witness;
  std::string note;
};

struct CheckPlan {
  std::vector<std::pair<Point, Point>> pairs;
  std::vector<std::array<Point, 4>> quadruples;  // (y, z, y', z')
  int t_level = 4;                               // dyadic grid of 2^k + 1 values
  /// Subsegments (a, b) for the consistency check; empty means all pairs of
  /// the level-min(t_level, 3) grid.
  std::vector<std::pair<double, double>> subsegments;
};

CheckReport check_geodesic(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);
CheckReport check_consistency(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);
CheckReport check_conical(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);
CheckReport check_convexity(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);
CheckReport check_reversibility(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);

/// All five checkers in a fixed order.
std::vector<CheckReport> check_all(const Bicombing& s, const CheckPlan& plan, double tol = kTauGeo);

/// Convex hull of finitely many points of l-infinity^n.
class ConvexPolytope {
 public:
  explicit ConvexPolytope(std::vector<Point> vertices);
  /// Membership by convex-combination feasibility.
  bool contains(const Point& p, double tol = 1e-9) const;
  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t dimension() const { return vertices_.front().size(); }

 private:
  std::vector<Point> vertices_;
};

/// (x, y, t) -> (1 - t) x + t y on C. Evaluation outside C throws.
Bicombing linear_bicombing(const ConvexPolytope& C);

/// Shortest-arc evaluator on a metric graph, optionally restricted to a ball.
Bicombing shortest_arc_bicombing(std::shared_ptr<const MetricGraph> g);

// ----------------------------------------------------------------- solver

/// Midpoint of x and y in the tight span: the centre of the admissible-midpoint
/// box, which is (x + y) / 2, projected back to the extremal functions.
ExtremalFunction tight_span_midpoint(const DistanceMatrix& X, const Point& x, const Point& y);

inline constexpr int kDefaultSolverDepth = 12;

/// Dyadic path from x to y by recursive subdivision with tight_span_midpoint.
/// Geodesic and reversible, but neither consistent nor convex once the path
/// crosses between cells.
PolyLinePath midpoint_subdivision_path(const DistanceMatrix& X, const Point& x, const Point& y,
                                       int depth = kDefaultSolverDepth);

/// Evaluator "tight-span-midpoint": the midpoint rule by bisection descent
/// (exact on dyadic parameters down to depth 40, linear below).
Bicombing midpoint_rule_bicombing(const DistanceMatrix& X);

/// The canonical geodesic of E(X) from x to y (see tight_span_geodesic.hpp)
/// sampled on the dyadic grid of the given depth. Throws if an endpoint is
/// off E(X) or the samples miss the geodesic tolerance.
PolyLinePath solve_convex_bicombing(const TightSpanGeodesics& G, const Point& x, const Point& y,
                                    int depth = kDefaultSolverDepth, double tol = kTauGeo);
PolyLinePath solve_convex_bicombing(const DistanceMatrix& X, const Point& x, const Point& y,
                                    int depth = kDefaultSolverDepth, double tol = kTauGeo);

/// Evaluator "tight-span-solver" over E(X) in l-infinity^n, exact on the
/// canonical geodesics. Solved paths are cached per endpoint pair.
Bicombing tight_span_bicombing(const DistanceMatrix& X);

}  // namespace cartan
