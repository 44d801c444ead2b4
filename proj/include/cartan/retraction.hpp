// Geodesics and loop shortening in a subset X of l-infinity^n that is a
// 1-Lipschitz retract of a neighbourhood.
#pragma once

#include <functional>
#include <string>

#include "cartan/bicombing.hpp"

namespace cartan {

/// rho: neighbourhood of X -> X, 1-Lipschitz and the identity on X.
using Retraction = std::function<Point(const Point&)>;

/// Geodesic from x to y in X: while d(x, y) > r, the l-infinity segment point z
/// at distance r from x is replaced by rho(z), which splits d(x, y) additively;
/// the pieces below scale r are filled in with `chart`. Parameters are
/// proportional to arc length.
///
/// Throws when rho moves x or y, fails the 1-Lipschitz or idempotence check on
/// the visited points, breaks additivity beyond tau_metric, or when the result
/// has geodesic defect above tau_geo.
PolyLinePath retraction_geodesic(const Point& x, const Point& y, const Retraction& rho,
                                 const BicombingFn& chart, double r, int samples_per_piece = 8);

struct ShortenResult {
  enum class Status { Shortened, Contracted, AuditFailed, NoDecrease };
  Status status = Status::NoDecrease;
  PolyLinePath loop;            // closed; two equal samples when contracted
  double length_before = 0.0;
  double length_after = 0.0;
  double eta = 0.0;             // length_before - length_after
  double bound = 0.0;           // max(0, length_before - 8 r)
  std::string note;
};

std::string to_string(ShortenResult::Status s);

/// One step of loop shortening. The annulus lives in the l-infinity plane:
/// its outer boundary is the square of perimeter L = L(gamma), sampled at the
/// arc-length positions of gamma's samples, and its inner boundary the square
/// at distance r inside it, sampled along the same rays. gamma is extended to
/// the inner square by the mean of the lower and upper McShane extensions and
/// rho of the result is the new loop, of length at most L - 8r. When L <= 8r
/// the centre of the square is used instead and the loop contracts to a point.
/// A loop that is not 1-Lipschitz on the outer square is reported as
/// AuditFailed.
ShortenResult shorten_loop(const PolyLinePath& gamma, const Retraction& rho, double r);

}  // namespace cartan
