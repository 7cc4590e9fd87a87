#include "widthlab/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "widthlab/errors.hpp"

namespace widthlab {

namespace {

// Revised simplex on A x = b, x >= 0, b >= 0. The basis matrix is refactored
// every iteration, so rounding does not accumulate across pivots.
class RevisedSimplex {
public:
  RevisedSimplex(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<int> basis, double tol)
      : A_(std::move(A)), b_(std::move(b)), basis_(std::move(basis)), tol_(tol) {}

  enum class Result { Optimal, Unbounded };

  // Minimizes c^T x over columns j with allowed[j]; Bland's rule for entering
  // and leaving. With bounded set, a ray column is rounding noise and skipped.
  Result optimize(const Eigen::VectorXd& c, const std::vector<bool>& allowed, bool bounded, int& pivots) {
    const Eigen::Index m = A_.rows(), n = A_.cols();
    const double cscale = 1.0 + c.cwiseAbs().maxCoeff();
    for (int guard = 0; guard < 50000; ++guard) {
      factor();
      Eigen::VectorXd cB(m);
      for (Eigen::Index i = 0; i < m; ++i) cB[i] = c[basis_[i]];
      const Eigen::VectorXd y = lu_.transpose().solve(cB);
      std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
      for (int j : basis_) in_basis[static_cast<std::size_t>(j)] = true;
      bool pivoted = false;
      for (Eigen::Index j = 0; j < n && !pivoted; ++j) {
        if (in_basis[j] || !allowed[j]) continue;
        const double d = c[j] - A_.col(j).dot(y);
        if (d >= -tol_ * cscale) continue;
        const Eigen::VectorXd u = lu_.solve(A_.col(j));
        const double piv_tol = 1e-9 * std::max(1.0, u.cwiseAbs().maxCoeff());
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
          if (u[i] <= piv_tol) continue;
          const double ratio = std::max(0.0, xB_[i]) / u[i];
          if (leave < 0 || ratio < best - 1e-12 * (1.0 + best) ||
              (std::abs(ratio - best) <= 1e-12 * (1.0 + best) && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
        if (leave < 0) {
          if (bounded || d > -1e-7 * cscale * (1.0 + y.cwiseAbs().maxCoeff())) continue;
          return Result::Unbounded;
        }
        basis_[leave] = static_cast<int>(j);
        ++pivots;
        pivoted = true;
      }
      if (!pivoted) return Result::Optimal;
    }
    fail(ErrorCode::NumericalFailure, "simplex iteration limit reached");
  }

  void factor() {
    const Eigen::Index m = A_.rows();
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index i = 0; i < m; ++i) B.col(i) = A_.col(basis_[i]);
    lu_.compute(B);
    xB_ = lu_.solve(b_);
  }

  // Swaps basic columns listed in `drop` for other columns where the basis stays nonsingular.
  void drive_out(const std::vector<bool>& drop, const std::vector<bool>& allowed) {
    const Eigen::Index m = A_.rows(), n = A_.cols();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!drop[static_cast<std::size_t>(basis_[i])]) continue;
      factor();
      std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
      for (int j : basis_) in_basis[static_cast<std::size_t>(j)] = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (in_basis[j] || !allowed[j]) continue;
        const Eigen::VectorXd u = lu_.solve(A_.col(j));
        if (std::abs(u[i]) > 1e-7 * std::max(1.0, u.cwiseAbs().maxCoeff())) {
          basis_[i] = static_cast<int>(j);
          break;
        }
      }
    }
    factor();
  }

  const std::vector<int>& basis() const { return basis_; }
  const Eigen::VectorXd& xB() const { return xB_; }

private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  std::vector<int> basis_;
  double tol_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd xB_;
};

} // namespace

LpSolution solve_lp(const LpProblem& pr, double tol) {
  const Eigen::Index nv = pr.c.size();
  const Eigen::Index mu = pr.A_ub.rows(), me = pr.A_eq.rows();
  if ((mu && pr.A_ub.cols() != nv) || (me && pr.A_eq.cols() != nv) || pr.b_ub.size() != mu || pr.b_eq.size() != me)
    fail(ErrorCode::InvalidArgument, "LP dimensions are inconsistent");
  if (!pr.free_vars.empty() && static_cast<Eigen::Index>(pr.free_vars.size()) != nv)
    fail(ErrorCode::InvalidArgument, "free variable mask has the wrong length");

  // Standard form columns: split free variables, then slacks, then artificials.
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(nv)), neg(static_cast<std::size_t>(nv), -1);
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < nv; ++j) {
    pos[j] = cols++;
    if (!pr.free_vars.empty() && pr.free_vars[j]) neg[j] = cols++;
  }
  const Eigen::Index n_struct = cols, n_slack = mu, m = mu + me;
  const Eigen::Index n_real = n_struct + n_slack, total = n_real + m;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, total);
  Eigen::VectorXd b(m);
  auto fill_row = [&](Eigen::Index r, const Eigen::RowVectorXd& a, double rhs, Eigen::Index slack) {
    for (Eigen::Index j = 0; j < nv; ++j) {
      A(r, pos[j]) = a[j];
      if (neg[j] >= 0) A(r, neg[j]) = -a[j];
    }
    if (slack >= 0) A(r, slack) = 1.0;
    b[r] = rhs;
    if (rhs < 0) {
      A.row(r) *= -1.0;
      b[r] = -rhs;
    }
    A(r, n_real + r) = 1.0;
  };
  for (Eigen::Index i = 0; i < mu; ++i) fill_row(i, pr.A_ub.row(i), pr.b_ub[i], n_struct + i);
  for (Eigen::Index i = 0; i < me; ++i) fill_row(mu + i, pr.A_eq.row(i), pr.b_eq[i], -1);

  std::vector<int> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(n_real + i);
  RevisedSimplex rs(A, b, std::move(basis), tol);
  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(total);
  c1.tail(m).setOnes();
  std::vector<bool> all(static_cast<std::size_t>(total), true), real(static_cast<std::size_t>(total), false),
      artificial(static_cast<std::size_t>(total), false);
  for (Eigen::Index j = 0; j < n_real; ++j) real[j] = true;
  for (Eigen::Index j = n_real; j < total; ++j) artificial[j] = true;
  rs.optimize(c1, all, true, sol.pivots);
  rs.factor();
  double infeas = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (rs.basis()[i] >= n_real) infeas += std::max(0.0, rs.xB()[i]);
  if (infeas > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  rs.drive_out(artificial, real);

  // Phase 2 over structural and slack columns only.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(total);
  for (Eigen::Index j = 0; j < nv; ++j) {
    c2[pos[j]] = pr.c[j];
    if (neg[j] >= 0) c2[neg[j]] = -pr.c[j];
  }
  if (rs.optimize(c2, real, false, sol.pivots) == RevisedSimplex::Result::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  rs.factor();
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(total);
  for (Eigen::Index i = 0; i < m; ++i) xs[rs.basis()[i]] = std::max(0.0, rs.xB()[i]);
  sol.x.resize(nv);
  for (Eigen::Index j = 0; j < nv; ++j) sol.x[j] = xs[pos[j]] - (neg[j] >= 0 ? xs[neg[j]] : 0.0);
  sol.objective = pr.c.dot(sol.x);
  sol.status = LpStatus::Optimal;
  return sol;
}

} // namespace widthlab
