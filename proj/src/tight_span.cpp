#include "cartan/tight_span.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <limits>
#include <set>

namespace cartan {

namespace {

struct Constraint {
  std::size_t i, j;
};

std::vector<Constraint> all_constraints(std::size_t n) {
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.push_back({i, j});
  return out;
}

double constraint_value(const Constraint& c, std::span<const double> f) {
  return c.i == c.j ? 2.0 * f[c.i] : f[c.i] + f[c.j];
}

// Solves the square system A f = b; false if singular.
bool solve_square(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-12) return false;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return true;
}

int affine_rank(const std::vector<Point>& pts) {
  if (pts.size() <= 1) return 0;
  std::vector<std::vector<double>> M;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    std::vector<double> row(pts[0].size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = pts[k][i] - pts[0][i];
    M.push_back(std::move(row));
  }
  int rank = 0;
  const std::size_t cols = M[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < M.size(); ++c) {
    std::size_t piv = r;
    for (std::size_t k = r + 1; k < M.size(); ++k)
      if (std::abs(M[k][c]) > std::abs(M[piv][c])) piv = k;
    if (std::abs(M[piv][c]) < 1e-9) continue;
    std::swap(M[piv], M[r]);
    for (std::size_t k = r + 1; k < M.size(); ++k) {
      const double f = M[k][c] / M[r][c];
      for (std::size_t j = c; j < cols; ++j) M[k][j] -= f * M[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

bool covers_all(std::uint32_t mask, const std::vector<Constraint>& cons, std::size_t n) {
  std::vector<bool> hit(n, false);
  for (std::size_t k = 0; k < cons.size(); ++k)
    if (mask & (1u << k)) hit[cons[k].i] = hit[cons[k].j] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

}  // namespace

Admissibility is_admissible(std::span<const double> f, const DistanceMatrix& X, double tol) {
  if (f.size() != X.size()) throw GeometryError("is_admissible: length mismatch");
  Admissibility a;
  a.worst_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i; j < X.size(); ++j) {
      const double r = f[i] + f[j] - X(i, j);
      if (r < a.worst_residual) a = {false, r, i, j};
    }
  a.admissible = a.worst_residual >= -tol;
  return a;
}

Point conjugate(std::span<const double> f, const DistanceMatrix& X) {
  Point p(X.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t y = 0; y < X.size(); ++y) p[x] = std::max(p[x], X(x, y) - f[y]);
  return p;
}

double extremality_residual(std::span<const double> f, const DistanceMatrix& X) {
  const Point p = conjugate(f, X);
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r = std::max(r, std::abs(f[i] - p[i]));
  return r;
}

Projection project_to_extremal(std::span<const double> g, const DistanceMatrix& X, double tol,
                               int max_iterations) {
  const auto adm = is_admissible(g, X);
  if (!adm.admissible)
    throw GeometryError("project_to_extremal: input not admissible, residual " +
                        std::to_string(adm.worst_residual));
  Projection out{Point(g.begin(), g.end()), 0, 0.0};
  for (;;) {
    const Point p = conjugate(out.f, X);
    double r = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) r = std::max(r, out.f[i] - p[i]);
    out.residual = r;
    if (r < tol) return out;
    if (out.iterations >= max_iterations)
      throw GeometryError("project_to_extremal: no convergence after " +
                          std::to_string(max_iterations) + " iterations, residual " +
                          std::to_string(r));
    for (std::size_t i = 0; i < p.size(); ++i) out.f[i] = 0.5 * (out.f[i] + p[i]);
    ++out.iterations;
  }
}

ExtremalFunction retract_to_tight_span(std::span<const double> g, const DistanceMatrix& X) {
  Point q = conjugate(g, X);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::max(q[i], g[i]);
  return project_to_extremal(q, X, 1e-12, 100000).f;
}

double tight_span_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw GeometryError("tight_span_distance: space mismatch");
  return linf_distance(f, g);
}

std::vector<PointPair> tight_pattern(std::span<const double> f, const DistanceMatrix& X, double tol) {
  std::vector<PointPair> out;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i; j < X.size(); ++j)
      if (std::abs(f[i] + f[j] - X(i, j)) <= tol) out.emplace_back(i, j);
  return out;
}

TightSpanComplex enumerate_cells(const DistanceMatrix& X, std::size_t max_points) {
  const std::size_t n = X.size();
  if (n == 0) throw GeometryError("enumerate_cells: empty space");
  if (n > max_points)
    throw GeometryError("enumerate_cells: " + std::to_string(n) + " points exceeds limit " +
                        std::to_string(max_points));
  const auto cons = all_constraints(n);
  const std::size_t m = cons.size();

  // Vertices of the admissible polyhedron: feasible basic solutions.
  struct Vertex {
    Point f;
    std::uint32_t tight;
  };
  std::vector<Vertex> verts;
  bool degenerate = false;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& c = cons[pick[r]];
      A[r][c.i] += 1.0;
      A[r][c.j] += 1.0;
      b[r] = X(c.i, c.j);
    }
    std::vector<double> f;
    if (solve_square(A, b, f)) {
      bool feasible = true;
      std::uint32_t tight = 0;
      for (std::size_t k = 0; k < m && feasible; ++k) {
        const double s = constraint_value(cons[k], f) - X(cons[k].i, cons[k].j);
        if (s < -kTauMetric) feasible = false;
        if (std::abs(s) <= kTauMetric) tight |= 1u << k;
      }
      if (feasible) {
        const bool seen = std::any_of(verts.begin(), verts.end(), [&](const Vertex& v) {
          return linf_distance(v.f, f) <= kTauMetric;
        });
        if (!seen) {
          if (static_cast<std::size_t>(std::popcount(tight)) > n) degenerate = true;
          verts.push_back({f, tight});
        }
      }
    }
    // next n-combination of m
    std::size_t k = n;
    while (k > 0 && pick[k - 1] == m - n + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t r = k; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }

  // Face patterns: closure of vertex tight sets under intersection.
  std::set<std::uint32_t> patterns;
  for (const auto& v : verts) patterns.insert(v.tight);
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<std::uint32_t> cur(patterns.begin(), patterns.end());
    for (std::size_t a = 0; a < cur.size(); ++a)
      for (std::size_t b = a + 1; b < cur.size(); ++b)
        if (patterns.insert(cur[a] & cur[b]).second) grew = true;
  }

  TightSpanComplex E;
  E.X = X;
  E.degenerate = degenerate;
  for (auto mask : patterns) {
    if (!covers_all(mask, cons, n)) continue;  // unbounded face: not in the hull
    TightSpanCell cell;
    for (std::size_t k = 0; k < m; ++k)
      if (mask & (1u << k)) cell.pattern.emplace_back(cons[k].i, cons[k].j);
    for (const auto& v : verts)
      if ((v.tight & mask) == mask) cell.vertices.push_back(v.f);
    if (cell.vertices.empty()) continue;
    cell.dim = affine_rank(cell.vertices);
    E.dimension = std::max(E.dimension, cell.dim);
    E.cells.push_back(std::move(cell));
  }
  std::sort(E.cells.begin(), E.cells.end(), [](const TightSpanCell& a, const TightSpanCell& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.pattern < b.pattern;
  });
  return E;
}

int combinatorial_dimension(const TightSpanComplex& E) {
  int d = 0;
  for (const auto& c : E.cells) d = std::max(d, c.dim);
  return d;
}

Point sample_cell(const TightSpanCell& cell, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(cell.vertices.size());
  double total = 0.0;
  for (auto& x : w) total += (x = ex(rng));
  Point p(cell.vertices[0].size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += w[k] / total * cell.vertices[k][i];
  return p;
}

Point cell_centroid(const TightSpanCell& cell) {
  Point p(cell.vertices[0].size(), 0.0);
  for (const auto& v : cell.vertices)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += v[i] / static_cast<double>(cell.vertices.size());
  return p;
}

}  // namespace cartan
