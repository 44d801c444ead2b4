#include "cartan/lp.hpp"

#include <cmath>
#include <limits>

#include "cartan/metric.hpp"

namespace cartan {

namespace {

// Tableau over nonnegative columns. Row 0..m-1 constraints, last row the
// (negated reduced-cost) objective; last column the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t cols) : m_(m), cols_(cols), t_((m + 1) * (cols + 1), 0.0), basis_(m) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& obj(std::size_t c) { return at(m_, c); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
    }
    basis_[r] = c;
  }

  // Maximizes the objective row over columns [0, usable). Returns false if unbounded.
  bool optimize(std::size_t usable, double tol) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < usable; ++j)
        if (obj(j) < -tol) {
          enter = j;  // Bland: lowest index
          break;
        }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a > tol) {
          const double ratio = rhs(i) / a;
          if (ratio < best - tol || (leave < m_ && std::abs(ratio - best) <= tol && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    throw GeometryError("solve_lp: pivot budget exhausted");
  }

 private:
  std::size_t m_, cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol) {
  const std::size_t n = lp.variables;
  const std::size_t me = lp.eq_rows.size();
  const std::size_t ml = lp.le_rows.size();
  const std::size_t m = me + ml;
  // Columns: x+ (n), x- (n), slacks (ml), artificials (m).
  const std::size_t art0 = 2 * n + ml;
  const std::size_t cols = art0 + m;
  Tableau T(m, cols);

  for (std::size_t r = 0; r < m; ++r) {
    const bool eq = r < me;
    const auto& row = eq ? lp.eq_rows[r] : lp.le_rows[r - me];
    double b = eq ? lp.eq_rhs[r] : lp.le_rhs[r - me];
    if (row.size() != n) throw GeometryError("solve_lp: row width mismatch");
    const double sign = b < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      T.at(r, j) = sign * row[j];
      T.at(r, n + j) = -sign * row[j];
    }
    if (!eq) T.at(r, 2 * n + (r - me)) = sign;
    T.at(r, art0 + r) = 1.0;
    T.rhs(r) = sign * b;
    T.basis(r) = art0 + r;
  }

  // Phase 1: maximize -(sum of artificials).
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j <= cols; ++j)
      if (j < art0 || j == cols) T.at(m, j) -= T.at(r, j);
  }
  T.optimize(cols, tol);
  LpResult res;
  if (-T.at(m, cols) > 1e3 * tol * (1.0 + m)) {
    res.status = LpResult::Status::Infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (T.basis(r) < art0) continue;
    for (std::size_t j = 0; j < art0; ++j)
      if (std::abs(T.at(r, j)) > tol) {
        T.pivot(r, j);
        break;
      }
  }

  // Phase 2 on the original objective (artificial columns frozen).
  for (std::size_t j = 0; j <= cols; ++j) T.obj(j) = 0.0;
  if (!lp.objective.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      T.obj(j) = -lp.objective[j];
      T.obj(n + j) = lp.objective[j];
    }
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t b = T.basis(r);
      const double f = T.obj(b);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) T.obj(j) -= f * T.at(r, j);
    }
    if (!T.optimize(art0, tol)) {
      res.status = LpResult::Status::Unbounded;
      return res;
    }
  }
  res.status = LpResult::Status::Optimal;
  res.x.assign(n, 0.0);
  std::vector<double> full(cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) full[T.basis(r)] = T.rhs(r);
  for (std::size_t j = 0; j < n; ++j) res.x[j] = full[j] - full[n + j];
  res.value = 0.0;
  for (std::size_t j = 0; j < n && !lp.objective.empty(); ++j) res.value += lp.objective[j] * res.x[j];
  return res;
}

}  // namespace cartan
