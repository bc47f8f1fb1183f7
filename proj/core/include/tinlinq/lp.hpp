#pragma once

// Dense two-phase simplex for the small linear programs that appear in this
// library (weighted sum-GDoF over a TINA polytope, assignment duals,
// fractional matchings):
//
//   maximize c^T x  subject to  A x <= b,  x >= 0.
//
// Equality rows are expressed as a pair of opposite inequalities.

#include <Eigen/Dense>

namespace tinlinq {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

struct LpOptions {
  double eps = 1e-10;
  long max_pivots = 1'000'000;
};

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const LpOptions& options = {});

}  // namespace tinlinq
