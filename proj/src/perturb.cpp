#include "cartan/perturb.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

namespace {

constexpr double kToleranceFloor = 1e-14;

class Solver {
 public:
  Solver(const ChartAtlas& A, const PerturbOptions& opts, PerturbTrace* trace)
      : A_(A), X_(A.space()), opts_(opts), trace_(trace) {}

  // Consistent local geodesic from p to q near ref, accurate to about tol.
  ChartPath solve(const ChartPath& ref, const Point& p, const Point& q, double tol, int depth) {
    if (trace_) trace_->depth = std::max(trace_->depth, depth);
    if (depth > opts_.max_depth) throw GeometryError("perturb_geodesic: recursion depth exceeded");

    const double dp = X_.distance(p, ref.start());
    const double dq = X_.distance(q, ref.end());
    if (depth > 0 && std::max(dp, dq) <= tol) {
      if (trace_) ++trace_->shortcuts;
      return ref.with_endpoints(p, q);
    }

    std::vector<Point> pts{p, q, ref.start()};
    for (const auto& piece : ref.pieces()) pts.push_back(piece.to);
    if (const auto k = A_.chart_containing(pts, 0.0, ref.pieces().front().chart)) {
      if (trace_) ++trace_->base_solves;
      return ChartPath::segment(p, q, *k);
    }

    const double eta = depth == 0 ? opts_.eta_top : opts_.eta_deep;
    ChartPath left = ref.restrict(0.0, 2.0 / 3.0, A_);
    ChartPath right = ref.restrict(1.0 / 3.0, 1.0, A_);
    Point pn = ref.at(1.0 / 3.0, A_);
    Point qn = ref.at(2.0 / 3.0, A_);
    double gap = std::max(dp, dq);
    for (int n = 1;; ++n) {
      const double child_tol = std::max(kToleranceFloor, eta * gap);
      // Alternating: the second geodesic starts from the updated p.
      ChartPath c = solve(left, p, qn, child_tol, depth + 1);
      Point p_next = c.at(0.5, A_);
      ChartPath c2 = solve(right, p_next, q, child_tol, depth + 1);
      Point q_next = c2.at(0.5, A_);
      const double gp = X_.distance(pn, p_next);
      const double gq = X_.distance(qn, q_next);
      gap = gp + gq;
      if (depth == 0 && trace_) {
        trace_->p_gaps.push_back(gp);
        trace_->q_gaps.push_back(gq);
        trace_->gaps.push_back(gap);
        trace_->iterations = n;
      }
      left = std::move(c);
      right = std::move(c2);
      pn = std::move(p_next);
      qn = std::move(q_next);
      if (gap < tol) break;
      if (n >= opts_.max_iterations)
        throw GeometryError("perturb_geodesic: iteration budget exhausted with gap " +
                            std::to_string(gap));
    }
    // left covers [0, 2/3] and right [1/3, 1]; they agree on [1/3, 2/3].
    ChartPath head = left.restrict(0.0, 0.75, A_);
    ChartPath tail = right.restrict(0.25, 1.0, A_);
    return ChartPath::join(head, tail, 0.5).merged(A_, std::max(10.0 * tol, 1e-12));
  }

 private:
  const ChartAtlas& A_;
  const MetricSpace& X_;
  const PerturbOptions& opts_;
  PerturbTrace* trace_;
};

}  // namespace

LocalGeodesicPath perturb_geodesic(const LocalGeodesicPath& c, const Point& xbar, const Point& ybar,
                                   const ChartAtlas& A, PerturbTrace* trace,
                                   const PerturbOptions& opts) {
  const auto& X = A.space();
  const double dx = X.distance(c.path.start(), xbar);
  const double dy = X.distance(c.path.end(), ybar);
  if (!(dx < c.epsilon) || !(dy < c.epsilon))
    throw GeometryError("perturb_geodesic: perturbation (" + std::to_string(dx) + ", " +
                        std::to_string(dy) + ") out of range, epsilon " +
                        std::to_string(c.epsilon));
  if (trace) *trace = {};
  if (dx == 0.0 && dy == 0.0) return c;

  Solver solver(A, opts, trace);
  ChartPath out = solver.solve(c.path, xbar, ybar, opts.tol, 0);
  LocalGeodesicPath result;
  if (opts.certify) {
    result = certify_local_geodesic(out, A, opts.tol);
  } else {
    result.path = std::move(out);
    result.epsilon = perturbation_radius(result.path, A);
    result.length = result.path.length(A);
  }
  const double bound = c.length + dx + dy + opts.tol;
  if (result.length > bound)
    throw GeometryError("perturb_geodesic: length " + std::to_string(result.length) +
                        " exceeds bound " + std::to_string(bound));
  return result;
}

}  // namespace cartan
