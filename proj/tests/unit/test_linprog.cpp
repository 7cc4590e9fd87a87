#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "widthlab/linprog.hpp"
#include "widthlab/random.hpp"

using namespace widthlab;

namespace {

// min c^T x over {A x <= b, x >= 0} by enumerating all vertices.
double enumerate_vertices(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  Eigen::MatrixXd G(m + n, n);
  Eigen::VectorXd h(m + n);
  G << A, -Eigen::MatrixXd::Identity(n, n);
  h << b, Eigen::VectorXd::Zero(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd M(n, n);
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) {
        M.row(i) = G.row(idx[i]);
        r[i] = h[idx[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      if (((G * x - h).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
      return;
    }
    for (int i = start; i < m + n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

} // namespace

TEST(LinearProgram, MatchesVertexEnumeration) {
  CounterRng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3, m = 3 + trial % 4;
    LpProblem lp;
    lp.c = rng.normal_vector(n);
    lp.A_ub = Eigen::MatrixXd(m + 1, n);
    lp.A_ub.topRows(m) = rng.normal_matrix(m, n);
    lp.A_ub.row(m).setOnes(); // keeps the feasible set bounded
    lp.b_ub = Eigen::VectorXd(m + 1);
    for (int i = 0; i < m; ++i) lp.b_ub[i] = rng.uniform(0.1, 2.0);
    lp.b_ub[m] = 3.0;
    const LpSolution sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal) << trial;
    EXPECT_NEAR(sol.objective, enumerate_vertices(lp.c, lp.A_ub, lp.b_ub), 1e-9) << trial;
    EXPECT_LE((lp.A_ub * sol.x - lp.b_ub).maxCoeff(), 1e-9);
    EXPECT_GE(sol.x.minCoeff(), -1e-12);
  }
}

TEST(LinearProgram, DetectsInfeasibleAndUnbounded) {
  LpProblem inf;
  inf.c = Eigen::VectorXd::Ones(1);
  inf.A_ub = Eigen::MatrixXd::Ones(1, 1);
  inf.b_ub = -Eigen::VectorXd::Ones(1);
  EXPECT_EQ(solve_lp(inf).status, LpStatus::Infeasible);

  LpProblem unb;
  unb.c = -Eigen::VectorXd::Ones(2);
  unb.A_ub = Eigen::MatrixXd(1, 2);
  unb.A_ub << 1, -1;
  unb.b_ub = Eigen::VectorXd::Ones(1);
  EXPECT_EQ(solve_lp(unb).status, LpStatus::Unbounded);
}

TEST(LinearProgram, EqualityAndFreeVariables) {
  // min x0 + x1 with x0 - x1 = 1, x1 free, x0 <= 4: optimum at x1 = x0 - 1 as small as possible, x0 >= 0.
  LpProblem lp;
  lp.c = Eigen::Vector2d(1, 1);
  lp.A_eq = Eigen::MatrixXd(1, 2);
  lp.A_eq << 1, -1;
  lp.b_eq = Eigen::VectorXd::Ones(1);
  lp.A_ub = Eigen::MatrixXd(1, 2);
  lp.A_ub << 1, 0;
  lp.b_ub = Eigen::VectorXd::Constant(1, 4.0);
  lp.free_vars = {false, true};
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, -1.0, 1e-12);
}
