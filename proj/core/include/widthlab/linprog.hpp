#pragma once

#include <vector>

#include <Eigen/Dense>

namespace widthlab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// minimize c^T x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,
// x_j >= 0 unless free_vars[j] is set (an empty list means all nonnegative).
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  std::vector<bool> free_vars;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  int pivots = 0;
};

// Two-phase revised simplex with Bland's anticycling rule; intended for the
// small problems (tens of variables) arising in finite width evaluation.
LpSolution solve_lp(const LpProblem& problem, double tolerance = 1e-11);

} // namespace widthlab
