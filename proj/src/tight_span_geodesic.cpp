#include "cartan/tight_span_geodesic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cartan/lp.hpp"
#include "cartan/metric.hpp"

namespace cartan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool pattern_subset(const std::vector<PointPair>& small, const std::vector<PointPair>& large) {
  return std::includes(large.begin(), large.end(), small.begin(), small.end());
}

// 1/sqrt(size) of the bipartite component of each point in the tight graph of
// the pattern; points of odd components never move inside the cell.
std::vector<double> component_scale(const std::vector<PointPair>& pattern, std::size_t n) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& [a, b] : pattern) parent[find(a)] = find(b);
  std::vector<double> size(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) size[find(a)] += 1.0;
  std::vector<double> s(n);
  for (std::size_t a = 0; a < n; ++a) s[a] = 1.0 / std::sqrt(size[find(a)]);
  return s;
}

bool on_tight_span(const DistanceMatrix& X, const Point& p) {
  return p.size() == X.size() && is_admissible(p, X, 1e-8).admissible &&
         extremality_residual(p, X) <= 1e-8;
}

// l <= a . v + c <= u over the stacked free breakpoints v.
struct Row {
  std::vector<double> a;
  double c = 0.0;
  double lo = -kInf;
  double hi = kInf;
};

}  // namespace

// Points P_0 = x, P_1..P_K free, P_{K+1} = y. Segment k joins P_k and P_{k+1}
// and lies in cells[k] when k < cells.size(). A prefix chain has one free end
// point in its last cell followed by an unconstrained segment to y.
struct TightSpanGeodesics::Chain {
  const Point* x = nullptr;
  const Point* y = nullptr;
  std::size_t xstar = 0;
  double sign = 1.0;
  std::vector<std::size_t> cells;  // positions in maximal_
  bool prefix = false;
  std::vector<double> v;  // solution
  double length = kInf;

  std::size_t free_points() const { return prefix ? cells.size() : cells.size() - 1; }
};

TightSpanGeodesics::TightSpanGeodesics(TightSpanComplex E) : E_(std::move(E)) {
  const std::size_t n = E_.X.size();
  for (std::size_t i = 0; i < E_.cells.size(); ++i) {
    auto pi = E_.cells[i].pattern;
    std::sort(pi.begin(), pi.end());
    bool maximal = true;
    for (std::size_t j = 0; j < E_.cells.size() && maximal; ++j) {
      if (j == i) continue;
      auto pj = E_.cells[j].pattern;
      std::sort(pj.begin(), pj.end());
      if (pj.size() < pi.size() && pattern_subset(pj, pi)) maximal = false;
    }
    if (maximal) maximal_.push_back(i);
  }
  for (std::size_t i : maximal_) {
    std::sort(E_.cells[i].pattern.begin(), E_.cells[i].pattern.end());
    scale_.push_back(component_scale(E_.cells[i].pattern, n));
  }
  const std::size_t m = maximal_.size();
  adjacent_.assign(m, std::vector<bool>(m, false));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      for (const auto& p : E_.cells[maximal_[a]].vertices)
        for (const auto& q : E_.cells[maximal_[b]].vertices)
          if (linf_distance(p, q) <= 1e-9) adjacent_[a][b] = true;
    }
}

std::vector<std::size_t> TightSpanGeodesics::carriers(const Point& p, double tol) const {
  auto tight = tight_pattern(p, E_.X, tol);
  std::sort(tight.begin(), tight.end());
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < maximal_.size(); ++k)
    if (pattern_subset(E_.cells[maximal_[k]].pattern, tight)) out.push_back(k);
  return out;
}

namespace {

struct Builder {
  std::size_t n;
  std::size_t K;  // free points
  const Point& x;
  const Point& y;

  std::size_t nv() const { return K * n; }

  // Adds coef * P_k(i) to the row.
  void add(Row& r, std::size_t k, std::size_t i, double coef) const {
    if (k == 0)
      r.c += coef * x[i];
    else if (k == K + 1)
      r.c += coef * y[i];
    else
      r.a[(k - 1) * n + i] += coef;
  }
  Row row() const { return Row{std::vector<double>(nv(), 0.0)}; }
};

std::vector<Row> constraint_rows(const Builder& B, const DistanceMatrix& X,
                                 const std::vector<const std::vector<PointPair>*>& patterns,
                                 std::size_t segments, std::size_t xstar, double sign) {
  const std::size_t n = B.n;
  std::vector<Row> rows;
  for (std::size_t k = 1; k <= B.K; ++k) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        Row r = B.row();
        B.add(r, k, a, 1.0);
        B.add(r, k, b, 1.0);
        r.lo = X(a, b);
        rows.push_back(std::move(r));
      }
    // P_k lies in the cells of the segments on either side.
    for (std::size_t s : {k - 1, k}) {
      if (s >= patterns.size()) continue;
      for (const auto& [a, b] : *patterns[s]) {
        Row r = B.row();
        B.add(r, k, a, 1.0);
        B.add(r, k, b, 1.0);
        r.lo = r.hi = X(a, b);
        rows.push_back(std::move(r));
      }
    }
  }
  // Every segment advances x* by its full l-infinity length.
  for (std::size_t k = 0; k < segments; ++k)
    for (std::size_t z = 0; z < n; ++z) {
      if (z == xstar) continue;
      for (double pm : {1.0, -1.0}) {
        Row r = B.row();
        B.add(r, k + 1, xstar, sign);
        B.add(r, k, xstar, -sign);
        B.add(r, k + 1, z, pm);
        B.add(r, k, z, -pm);
        r.lo = 0.0;
        rows.push_back(std::move(r));
      }
    }
  return rows;
}

LpResult feasibility(const std::vector<Row>& rows, std::size_t nv) {
  LinearProgram lp;
  lp.variables = nv;
  for (const auto& r : rows) {
    if (r.lo == r.hi) {
      lp.eq_rows.push_back(r.a);
      lp.eq_rhs.push_back(r.lo - r.c);
      continue;
    }
    if (r.lo > -kInf) {
      std::vector<double> neg(r.a);
      for (auto& v : neg) v = -v;
      lp.le_rows.push_back(std::move(neg));
      lp.le_rhs.push_back(r.c - r.lo);
    }
    if (r.hi < kInf) {
      lp.le_rows.push_back(r.a);
      lp.le_rhs.push_back(r.hi - r.c);
    }
  }
  return solve_lp(lp, 1e-10);
}

// Minimizes sum_k |M_k v + m_k|_2 subject to the constraint rows by ADMM on
// z = K v + c, with the norm blocks handled by block soft thresholding.
std::vector<double> admm(const std::vector<Row>& blocks_rows, std::size_t block, const std::vector<Row>& cons,
                         std::vector<double> v0, double scale) {
  const std::size_t nv = v0.size();
  const std::size_t nb = blocks_rows.size();
  const std::size_t r = nb + cons.size();
  Eigen::MatrixXd K(r, nv);
  Eigen::VectorXd c(r), lo(r), hi(r);
  for (std::size_t i = 0; i < r; ++i) {
    const Row& row = i < nb ? blocks_rows[i] : cons[i - nb];
    for (std::size_t j = 0; j < nv; ++j) K(i, j) = row.a[j];
    c(i) = row.c;
    lo(i) = row.lo;
    hi(i) = row.hi;
  }
  const Eigen::MatrixXd KtK = K.transpose() * K;
  const double sigma = 1e-9;
  const double alpha = 1.6;
  double rho = 1.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  auto factor = [&] {
    ldlt.compute(rho * KtK + sigma * Eigen::MatrixXd::Identity(nv, nv));
  };
  factor();

  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(v0.data(), nv);
  Eigen::VectorXd z = K * v + c;
  for (std::size_t i = nb; i < r; ++i) z(i) = std::clamp(z(i), lo(i), hi(i));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(r);
  const double eps = 1e-12 * std::max(1.0, scale);

  for (int it = 1; it <= 200000; ++it) {
    v = ldlt.solve(rho * K.transpose() * (z - u - c) + sigma * v);
    const Eigen::VectorXd kv = K * v + c;
    const Eigen::VectorXd q = alpha * kv + (1.0 - alpha) * z;
    const Eigen::VectorXd w = q + u;
    Eigen::VectorXd znew(r);
    for (std::size_t b = 0; b < nb; b += block) {
      const double norm = w.segment(b, block).norm();
      const double f = norm > 1.0 / rho ? 1.0 - 1.0 / (rho * norm) : 0.0;
      znew.segment(b, block) = f * w.segment(b, block);
    }
    for (std::size_t i = nb; i < r; ++i) znew(i) = std::clamp(w(i), lo(i), hi(i));
    u = w - znew;
    const double rp = (kv - znew).lpNorm<Eigen::Infinity>();
    const double rd = rho * (K.transpose() * (znew - z)).lpNorm<Eigen::Infinity>();
    z = std::move(znew);
    if (rp <= eps && rd <= eps) break;
    if (it % 50 == 0) {
      const double ratio = std::sqrt(rp / std::max(rd, 1e-300));
      if (ratio > 5.0 || ratio < 0.2) {
        const double next = std::clamp(rho * ratio, 1e-6, 1e6);
        u *= rho / next;
        rho = next;
        factor();
      }
    }
  }
  return std::vector<double>(v.data(), v.data() + nv);
}

}  // namespace

bool TightSpanGeodesics::chain_feasible(const Chain& ch) const {
  const std::size_t n = E_.X.size();
  const Builder B{n, ch.free_points(), *ch.x, *ch.y};
  std::vector<const std::vector<PointPair>*> patterns;
  for (std::size_t k : ch.cells) patterns.push_back(&E_.cells[maximal_[k]].pattern);
  const std::size_t segments = ch.free_points() + 1;
  return feasibility(constraint_rows(B, E_.X, patterns, segments, ch.xstar, ch.sign), B.nv()).feasible();
}

bool TightSpanGeodesics::solve_chain(Chain& ch) const {
  const std::size_t n = E_.X.size();
  const Builder B{n, ch.free_points(), *ch.x, *ch.y};
  std::vector<const std::vector<PointPair>*> patterns;
  for (std::size_t k : ch.cells) patterns.push_back(&E_.cells[maximal_[k]].pattern);
  const std::size_t segments = ch.cells.size();
  const auto cons = constraint_rows(B, E_.X, patterns, segments, ch.xstar, ch.sign);

  std::vector<Row> blocks;
  for (std::size_t k = 0; k < segments; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      Row r = B.row();
      const double w = scale_[ch.cells[k]][i];
      B.add(r, k + 1, i, w);
      B.add(r, k, i, -w);
      blocks.push_back(std::move(r));
    }
  auto length = [&](const std::vector<double>& v) {
    double total = 0.0;
    for (std::size_t k = 0; k < segments; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Row& r = blocks[k * n + i];
        double e = r.c;
        for (std::size_t j = 0; j < v.size(); ++j) e += r.a[j] * v[j];
        s += e * e;
      }
      total += std::sqrt(s);
    }
    return total;
  };
  if (B.nv() == 0) {
    ch.v.clear();
    ch.length = length(ch.v);
    return true;
  }
  const auto start = feasibility(cons, B.nv());
  if (!start.feasible()) return false;
  ch.v = admm(blocks, n, cons, start.x, linf_distance(*ch.x, *ch.y));
  ch.length = length(ch.v);
  return true;
}

TightSpanGeodesic TightSpanGeodesics::solve(const Point& x, const Point& y) const {
  const auto& X = E_.X;
  if (!on_tight_span(X, x) || !on_tight_span(X, y))
    throw GeometryError("tight span geodesic: point outside the tight span");
  const std::size_t n = X.size();
  TightSpanGeodesic out;
  const double D = linf_distance(x, y);
  if (D == 0.0) {
    out.path = PolyLinePath({0.0}, {x});
    return out;
  }

  Chain base;
  base.x = &x;
  base.y = &y;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(y[i] - x[i]) > std::abs(y[base.xstar] - x[base.xstar])) base.xstar = i;
  base.sign = y[base.xstar] >= x[base.xstar] ? 1.0 : -1.0;

  // Cells meeting the l-infinity interval between x and y; a geodesic only
  // passes through these.
  std::vector<bool> usable(maximal_.size());
  for (std::size_t k = 0; k < maximal_.size(); ++k) {
    Chain one = base;
    one.cells = {k};
    one.prefix = true;
    usable[k] = chain_feasible(one);
  }
  const auto ends = carriers(y);
  Chain best;
  int solved = 0;
  std::vector<std::size_t> stack;

  // Depth-first over chains of distinct adjacent maximal cells, pruned by the
  // feasibility of a geodesic through the prefix.
  auto visit = [&](auto&& self) -> void {
    Chain pre = base;
    pre.cells = stack;
    pre.prefix = true;
    if (!chain_feasible(pre)) return;
    if (std::find(ends.begin(), ends.end(), stack.back()) != ends.end()) {
      Chain full = base;
      full.cells = stack;
      if (solve_chain(full)) {
        ++solved;
        if (full.length < best.length - 1e-12) best = std::move(full);
      }
    }
    for (std::size_t next = 0; next < maximal_.size(); ++next) {
      if (!usable[next] || !adjacent_[stack.back()][next]) continue;
      if (std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
      stack.push_back(next);
      self(self);
      stack.pop_back();
    }
  };
  for (std::size_t first : carriers(x)) {
    stack = {first};
    visit(visit);
  }
  if (best.cells.empty())
    throw GeometryError("tight span geodesic: no chain of cells carries a geodesic");

  std::vector<Point> pts{x};
  for (std::size_t k = 0; k < best.free_points(); ++k)
    pts.emplace_back(best.v.begin() + static_cast<std::ptrdiff_t>(k * n),
                     best.v.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  pts.push_back(y);

  std::vector<double> params{0.0};
  std::vector<Point> kept{x};
  double run = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double step = linf_distance(kept.back(), pts[k]);
    if (k + 1 < pts.size() && step <= 1e-12 * D) continue;
    run += step;
    params.push_back(std::min(run / D, 1.0));
    kept.push_back(pts[k]);
  }
  params.back() = 1.0;
  for (std::size_t k = params.size() - 1; k-- > 1;)
    if (params[k] >= params[k + 1]) {
      params.erase(params.begin() + static_cast<std::ptrdiff_t>(k));
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k));
    }
  out.path = PolyLinePath(std::move(params), std::move(kept));
  for (std::size_t k : best.cells) out.cells.push_back(maximal_[k]);
  out.length = best.length;
  out.chains_solved = solved;
  return out;
}

}  // namespace cartan
