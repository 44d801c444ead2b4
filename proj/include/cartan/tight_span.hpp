// Injective hull (tight span) of a small finite metric space, realized as the
// complex of bounded faces of { f : f(x) + f(y) >= d(x,y) } inside l-infinity^n.
#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "cartan/metric.hpp"

namespace cartan {

/// An extremal function on the points of a DistanceMatrix. Plain coordinates
/// so it can be handed to l-infinity routines directly.
using ExtremalFunction = Point;

struct Admissibility {
  bool admissible = false;
  double worst_residual = 0.0;  // min over pairs of f(x) + f(y) - d(x,y)
  std::size_t x = 0, y = 0;
};

Admissibility is_admissible(std::span<const double> f, const DistanceMatrix& X,
                            double tol = kTauMetric);

/// p(f)(x) = max_y (d(x,y) - f(y)).
Point conjugate(std::span<const double> f, const DistanceMatrix& X);

/// max_x |f(x) - p(f)(x)|; zero exactly on extremal functions.
double extremality_residual(std::span<const double> f, const DistanceMatrix& X);

struct Projection {
  ExtremalFunction f;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped fixed-point iteration f <- (f + p(f)) / 2 from an admissible g.
/// The result is extremal and lies below g pointwise.
Projection project_to_extremal(std::span<const double> g, const DistanceMatrix& X,
                               double tol = kTauMetric, int max_iterations = 10000);

/// 1-Lipschitz retraction of l-infinity^n onto the tight span:
/// g -> project(max(g, p(g))).
ExtremalFunction retract_to_tight_span(std::span<const double> g, const DistanceMatrix& X);

double tight_span_distance(std::span<const double> f, std::span<const double> g);

using PointPair = std::pair<std::size_t, std::size_t>;

struct TightSpanCell {
  std::vector<PointPair> pattern;  // pairs (i <= j) with f(i) + f(j) = d(i,j) on the cell
  int dim = 0;
  std::vector<Point> vertices;
};

struct TightSpanComplex {
  DistanceMatrix X;
  std::vector<TightSpanCell> cells;
  int dimension = 0;
  bool degenerate = false;  // some vertex has more tight constraints than coordinates
};

inline constexpr std::size_t kMaxTightSpanPoints = 6;

TightSpanComplex enumerate_cells(const DistanceMatrix& X, std::size_t max_points = kMaxTightSpanPoints);

int combinatorial_dimension(const TightSpanComplex& E);

/// Pairs (i <= j) tight at f within tol.
std::vector<PointPair> tight_pattern(std::span<const double> f, const DistanceMatrix& X,
                                     double tol = kTauMetric);

/// Random point of a cell (Dirichlet-weighted convex combination of its vertices).
Point sample_cell(const TightSpanCell& cell, std::mt19937_64& rng);

/// Vertex average; lies in the relative interior of the cell.
Point cell_centroid(const TightSpanCell& cell);

}  // namespace cartan
