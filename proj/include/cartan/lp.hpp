// Small dense linear programming (two-phase simplex, Bland's rule).
// Sized for the tight-span cell problems: tens of variables and constraints.
#pragma once

#include <vector>

namespace cartan {

struct LinearProgram {
  std::size_t variables = 0;  // all variables are free (unbounded in sign)
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;  // row . x <= rhs
  std::vector<double> le_rhs;
  std::vector<double> objective;  // maximized; empty means feasibility only
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;

  bool feasible() const { return status != Status::Infeasible; }
};

LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace cartan
