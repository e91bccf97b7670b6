#pragma once

#include <Eigen/Core>

namespace acprobit {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;       // primal solution when optimal
  double objective = 0.0;  // c^T x when optimal
  int pivots = 0;
};

/// Dense two-phase tableau simplex for
///   maximize c^T x  subject to  A x = b,  x >= 0.
/// Bland's rule is used for both entering and leaving choices, so the method
/// terminates on degenerate problems. Intended for the small feasibility
/// programs of the propriety check (a handful of rows, up to a few thousand
/// columns).
LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& c, double tol = 1e-10);

}  // namespace acprobit
