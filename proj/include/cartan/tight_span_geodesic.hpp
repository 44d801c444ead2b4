// Canonical geodesics of the tight span E(X) of a finite metric space.
//
// Inside a maximal cell the tight graph splits the points into bipartite
// components; moving within the cell shifts each component by +u on one side
// and -u on the other. The cell carries the Euclidean metric sqrt(sum_i u_i^2)
// in these rates. The geodesic from x to y is the l-infinity geodesic through
// a chain of maximal cells, straight inside each cell, of least total length
// in the cell metrics.
#pragma once

#include <cstddef>
#include <vector>

#include "cartan/path.hpp"
#include "cartan/tight_span.hpp"

namespace cartan {

struct TightSpanGeodesic {
  PolyLinePath path;               // breakpoints, parametrized by l-infinity arclength
  std::vector<std::size_t> cells;  // chain of maximal cells, one per segment
  double length = 0.0;             // total length in the cell metrics
  int chains_solved = 0;
};

class TightSpanGeodesics {
 public:
  explicit TightSpanGeodesics(TightSpanComplex E);

  const TightSpanComplex& complex() const { return E_; }
  /// Indices into complex().cells of the cells that are faces of no other cell.
  const std::vector<std::size_t>& maximal_cells() const { return maximal_; }

  /// Maximal cells containing p (pattern contained in the tight pairs of p).
  std::vector<std::size_t> carriers(const Point& p, double tol = 1e-8) const;

  /// Throws GeometryError if x or y is off E(X) or no chain admits a geodesic.
  TightSpanGeodesic solve(const Point& x, const Point& y) const;

 private:
  struct Chain;
  bool chain_feasible(const Chain& c) const;
  bool solve_chain(Chain& c) const;

  TightSpanComplex E_;
  std::vector<std::size_t> maximal_;
  std::vector<std::vector<double>> scale_;  // per maximal cell: 1/sqrt(component size)
  std::vector<std::vector<bool>> adjacent_;
};

}  // namespace cartan
