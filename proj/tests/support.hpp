// Shared helpers for the test binaries: random metrics, dense paths and
// brute-force oracles that do not go through the library code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cartan/metric.hpp"
#include "cartan/path.hpp"

namespace testing {

using cartan::Point;
using Matrix = std::vector<std::vector<double>>;

/// Floyd-Warshall on a random connected weighted graph with n vertices.
inline Matrix random_graph_metric(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 3.0) {
  std::uniform_real_distribution<double> w(lo, hi);
  std::bernoulli_distribution extra(0.4);
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d(n, std::vector<double>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (int i = 1; i < n; ++i) {
    const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
    d[i][j] = d[j][i] = w(rng);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (d[i][j] == inf && extra(rng)) d[i][j] = d[j][i] = w(rng);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Entries drawn in [1, 2]: every triangle inequality holds strictly.
inline Matrix random_generic_metric(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> w(1.0, 2.0);
  Matrix d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d[i][j] = d[j][i] = w(rng);
  return d;
}

/// All n^3 triples.
inline bool brute_force_metric(const Matrix& d, double tol = 1e-9) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i][j] != d[j][i] || (i != j && d[i][j] <= 0) || (i == j && d[i][j] != 0)) return false;
      for (std::size_t k = 0; k < n; ++k)
        if (d[i][k] > d[i][j] + d[j][k] + tol) return false;
    }
  return true;
}

inline double coord_max(const Point& u, const Point& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

/// Shortest-path distance on the cycle with n unit edges.
inline double cycle_distance(double a, double b, double n) {
  const double d = std::fmod(std::abs(a - b), n);
  return std::min(d, n - d);
}

/// Straight pieces between consecutive corners, each split into k samples.
inline cartan::PolyLinePath dense(const std::vector<Point>& corners, int k = 8) {
  std::vector<Point> out;
  for (std::size_t i = 0; i + 1 < corners.size(); ++i)
    for (int j = 0; j < k; ++j) out.push_back(cartan::lerp(corners[i], corners[i + 1], double(j) / k));
  out.push_back(corners.back());
  return cartan::PolyLinePath(out);
}

/// Dimension of the tight-span cell whose relative interior holds f: the
/// number of bipartite components of the tight graph {x, y : f(x) + f(y) = d(x, y)}
/// (a tight loop at x, meaning f(x) = 0, makes its component non-bipartite).
inline int tight_graph_dimension(const Point& f, const Matrix& d, double tol = 1e-7) {
  const int n = static_cast<int>(d.size());
  std::vector<int> colour(n, -1);
  int bipartite = 0;
  for (int s = 0; s < n; ++s) {
    if (colour[s] >= 0) continue;
    bool ok = true;
    std::vector<int> stack{s};
    colour[s] = 0;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y) {
        if (std::abs(f[x] + f[y] - d[x][y]) > tol) continue;
        if (colour[y] < 0) {
          colour[y] = 1 - colour[x];
          stack.push_back(y);
        } else if (colour[y] == colour[x]) {
          ok = false;
        }
      }
    }
    bipartite += ok;
  }
  return bipartite;
}

/// Four-point condition: the tight span of four points is 2-dimensional iff the
/// largest of the three pair sums strictly exceeds the other two.
inline int four_point_dimension(const Matrix& d, double tol = 1e-9) {
  std::vector<double> s{d[0][1] + d[2][3], d[0][2] + d[1][3], d[0][3] + d[1][2]};
  std::sort(s.begin(), s.end());
  return s[2] > s[1] + tol ? 2 : 1;
}

}  // namespace testing
