#include "widthlab/finite_widths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <tuple>

#include "widthlab/errors.hpp"
#include "widthlab/linprog.hpp"
#include "widthlab/width_optimizer.hpp"

namespace widthlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxKolmogorovDim = 16;
constexpr int kMaxSectionDim = 10;

bool is_one(const LpIndex& p) { return p.reciprocal() == Rational(1); }
bool is_two(const LpIndex& p) { return p.reciprocal() == Rational(1, 2); }
bool is_inf(const LpIndex& p) { return p.is_infinite(); }
bool is_polytope(const LpIndex& p) { return is_one(p) || is_inf(p); }
bool is_basic(const LpIndex& p) { return is_one(p) || is_two(p) || is_inf(p); }

double norm_q(const VectorXd& x, const LpIndex& q) {
  if (is_inf(q)) return x.cwiseAbs().maxCoeff();
  if (is_one(q)) return x.cwiseAbs().sum();
  if (is_two(q)) return x.norm();
  const double p = q.value();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

// Smoothed q-norm (q in {1, 2, inf}) with gradient and, optionally, Hessian.
double smooth_norm(const VectorXd& x, const LpIndex& q, double mu, VectorXd* grad, MatrixXd* hess) {
  const Eigen::Index m = x.size();
  if (is_one(q)) {
    const VectorXd s = (x.array().square() + mu * mu).sqrt().matrix();
    if (grad) *grad = x.cwiseQuotient(s);
    if (hess) *hess = (mu * mu / s.array().cube()).matrix().asDiagonal();
    return s.sum();
  }
  if (is_two(q)) {
    const double s = std::sqrt(x.squaredNorm() + mu * mu);
    if (grad) *grad = x / s;
    if (hess) *hess = (MatrixXd::Identity(m, m) - (x / s) * (x / s).transpose()) / s;
    return s;
  }
  // mu log sum_i (exp(x_i/mu) + exp(-x_i/mu))
  const double top = x.cwiseAbs().maxCoeff();
  const VectorXd ep = ((x.array() - top) / mu).exp().matrix();
  const VectorXd em = ((-x.array() - top) / mu).exp().matrix();
  const double sum = ep.sum() + em.sum();
  const VectorXd wp = ep / sum, wm = em / sum;
  const VectorXd v = wp - wm;
  if (grad) *grad = v;
  if (hess) {
    MatrixXd H = (wp + wm).asDiagonal();
    H -= v * v.transpose();
    *hess = H / mu;
  }
  return top + mu * std::log(sum);
}

// Columns are the extreme points of b_p modulo the symmetry x -> -x.
MatrixXd ball_vertices(int m, const LpIndex& p) {
  if (is_one(p)) return MatrixXd::Identity(m, m);
  const std::size_t count = std::size_t{1} << (m - 1);
  MatrixXd X(m, static_cast<Eigen::Index>(count));
  for (std::size_t c = 0; c < count; ++c) {
    X(0, static_cast<Eigen::Index>(c)) = 1.0;
    for (int i = 1; i < m; ++i) X(i, static_cast<Eigen::Index>(c)) = (c >> (i - 1)) & 1 ? -1.0 : 1.0;
  }
  return X;
}

void for_each_subset(int m, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

MatrixXd rows_of(const MatrixXd& V, const std::vector<int>& S) {
  MatrixXd R(static_cast<Eigen::Index>(S.size()), V.cols());
  for (std::size_t i = 0; i < S.size(); ++i) R.row(static_cast<Eigen::Index>(i)) = V.row(S[i]);
  return R;
}

// Orthonormal basis of the orthogonal complement of span V.
MatrixXd complement(const MatrixXd& V) {
  const Eigen::Index m = V.rows();
  if (V.cols() == 0) return MatrixXd::Identity(m, m);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(V);
  const Eigen::Index rank = qr.rank();
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(m, m);
  return Q.rightCols(m - rank);
}

MatrixXd span_basis(const MatrixXd& U) {
  const Eigen::Index m = U.rows();
  if (U.cols() == 0) return MatrixXd(m, 0);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(U);
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(m, m);
  return Q.leftCols(qr.rank());
}

// dist_q(x_j, span U) for every column x_j of X, q in {1, inf}, by basic
// solutions. For q = 1 every y = U_S^{-1} x_S is an upper bound and an optimal
// one interpolates n rows; for q = inf every left null vector w of an (n+1)-row
// block gives the lower bound |w^T x| / ||w||_1 and an optimal dual vertex has
// such a support.
VectorXd distances_enum(const MatrixXd& U, const MatrixXd& X, const LpIndex& q) {
  const int m = static_cast<int>(U.rows()), n = static_cast<int>(U.cols());
  const Eigen::Index nv = X.cols();
  if (n == 0) {
    VectorXd d(nv);
    for (Eigen::Index j = 0; j < nv; ++j) d(j) = norm_q(X.col(j), q);
    return d;
  }
  if (n >= m) return VectorXd::Zero(nv);
  if (is_one(q)) {
    VectorXd best = VectorXd::Constant(nv, kInf);
    for_each_subset(m, n, [&](const std::vector<int>& S) {
      Eigen::FullPivLU<MatrixXd> lu(rows_of(U, S));
      if (lu.rank() < n) return;
      const MatrixXd Y = lu.solve(rows_of(X, S));
      best = best.cwiseMin((X - U * Y).cwiseAbs().colwise().sum().transpose());
    });
    return best;
  }
  VectorXd best = VectorXd::Zero(nv);
  for_each_subset(m, n + 1, [&](const std::vector<int>& T) {
    Eigen::JacobiSVD<MatrixXd> svd(rows_of(U, T), Eigen::ComputeFullU);
    const VectorXd w = svd.matrixU().col(n);
    best = best.cwiseMax(((w.transpose() * rows_of(X, T)).cwiseAbs() / w.cwiseAbs().sum()).transpose());
  });
  return best;
}

// dist_q(x, span U) = max { w^T x : ||w||_{q'} <= 1, U^T w = 0 }, q in {1, inf}.
double distance_dual(const MatrixXd& U, const VectorXd& x, const LpIndex& q) {
  const Eigen::Index m = U.rows(), n = U.cols();
  LpProblem lp;
  if (is_one(q)) {
    lp.c = -x;
    lp.A_ub.resize(2 * m, m);
    lp.A_ub << MatrixXd::Identity(m, m), -MatrixXd::Identity(m, m);
    lp.b_ub = VectorXd::Ones(2 * m);
    lp.free_vars.assign(static_cast<std::size_t>(m), true);
    if (n > 0) {
      lp.A_eq = U.transpose();
      lp.b_eq = VectorXd::Zero(n);
    }
  } else {
    lp.c.resize(2 * m);
    lp.c << -x, x;
    lp.A_ub = MatrixXd::Ones(1, 2 * m);
    lp.b_ub = VectorXd::Ones(1);
    if (n > 0) {
      lp.A_eq.resize(n, 2 * m);
      lp.A_eq << U.transpose(), -U.transpose();
      lp.b_eq = VectorXd::Zero(n);
    }
  }
  const LpSolution s = solve_lp(lp);
  if (s.status != LpStatus::Optimal) fail(ErrorCode::NumericalFailure, "dual distance LP did not reach an optimum");
  return -s.objective;
}

void check_frame(const MatrixXd& U, const LpIndex& p, const LpIndex& q) {
  if (U.rows() < 1) fail(ErrorCode::InvalidArgument, "frame needs at least one row");
  if (!is_basic(p) || !is_basic(q)) fail(ErrorCode::Unsupported, "finite widths support p, q in {1, 2, inf}");
}

double kolmogorov_deviation_impl(const MatrixXd& U, const LpIndex& p, const LpIndex& q, double scale, bool dual) {
  check_frame(U, p, q);
  const Eigen::Index m = U.rows();
  const MatrixXd Q = span_basis(U);
  if (is_two(p)) {
    if (!is_two(q)) fail(ErrorCode::Unsupported, "Kolmogorov deviation of b_2 is only available in l_2");
    if (Q.cols() >= m) return 0.0;
    const MatrixXd R = MatrixXd::Identity(m, m) - Q * Q.transpose();
    if (dual) return scale * Eigen::JacobiSVD<MatrixXd>(complement(Q)).singularValues()(0);
    return scale * Eigen::JacobiSVD<MatrixXd>(R).singularValues()(0);
  }
  if (m > kMaxKolmogorovDim) fail(ErrorCode::Unsupported, "Kolmogorov vertex evaluation needs m <= 16");
  const MatrixXd X = scale * ball_vertices(static_cast<int>(m), p);
  if (is_two(q)) {
    if (dual) return (complement(Q).transpose() * X).colwise().norm().maxCoeff();
    return (X - Q * (Q.transpose() * X)).colwise().norm().maxCoeff();
  }
  if (!dual) return distances_enum(Q, X, q).maxCoeff();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) worst = std::max(worst, distance_dual(Q, X.col(j), q));
  return worst;
}

// Vertices of {x in span V : ||x||_p <= scale} for p in {1, inf}, as columns.
MatrixXd section_vertices(const MatrixXd& V, const LpIndex& p, double scale, bool qr_route,
                          std::vector<std::vector<int>>* subsets = nullptr, std::vector<VectorXd>* coords = nullptr) {
  const int m = static_cast<int>(V.rows()), k = static_cast<int>(V.cols());
  std::vector<VectorXd> out;
  const double tol = 1e-9;
  if (is_inf(p)) {
    const std::size_t signs = std::size_t{1} << (k - 1);
    for_each_subset(m, k, [&](const std::vector<int>& S) {
      const MatrixXd VS = rows_of(V, S);
      Eigen::FullPivLU<MatrixXd> lu(VS);
      Eigen::ColPivHouseholderQR<MatrixXd> qr(VS);
      if (qr_route ? qr.rank() < k : !lu.isInvertible()) return;
      for (std::size_t c = 0; c < signs; ++c) {
        VectorXd s(k);
        s(0) = 1.0;
        for (int i = 1; i < k; ++i) s(i) = (c >> (i - 1)) & 1 ? -1.0 : 1.0;
        const VectorXd z = qr_route ? VectorXd(qr.solve(s)) : VectorXd(lu.solve(s));
        const VectorXd x = V * z;
        if (x.cwiseAbs().maxCoeff() > 1.0 + tol) continue;
        out.push_back(scale * x);
        if (subsets) subsets->push_back(S);
        if (coords) coords->push_back(z);
      }
    });
  } else {
    auto add = [&](const VectorXd& d) {
      VectorXd x = V * d;
      const double l1 = x.cwiseAbs().sum();
      if (l1 < 1e-12) return;
      out.push_back(scale * x / l1);
    };
    if (k == 1) {
      add(VectorXd::Ones(1));
    } else {
      for_each_subset(m, k - 1, [&](const std::vector<int>& S) {
        const MatrixXd VS = rows_of(V, S);
        if (qr_route) {
          Eigen::FullPivLU<MatrixXd> lu(VS);
          const MatrixXd ker = lu.kernel();
          if (ker.cols() == 1 && lu.rank() == k - 1) add(ker.col(0));
        } else {
          Eigen::JacobiSVD<MatrixXd> svd(VS, Eigen::ComputeFullV);
          const VectorXd sv = svd.singularValues();
          if (sv.size() == k - 1 && sv(k - 2) > 1e-10 * std::max(1.0, sv(0))) add(svd.matrixV().col(k - 1));
        }
      });
    }
  }
  MatrixXd X(m, static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) X.col(static_cast<Eigen::Index>(i)) = out[i];
  return X;
}

double gelfand_impl(const MatrixXd& V0, const LpIndex& p, const LpIndex& q, double scale, bool lp_route) {
  check_frame(V0, p, q);
  const MatrixXd V = span_basis(V0);
  const int m = static_cast<int>(V.rows()), k = static_cast<int>(V.cols());
  if (k == 0) return 0.0;
  if (is_two(p)) {
    if (is_two(q)) return scale;
    // Projector onto the section; the lp route builds it from the complement.
    MatrixXd P;
    if (lp_route) {
      const MatrixXd C = complement(V);
      P = MatrixXd::Identity(m, m) - C * C.transpose();
    } else {
      P = V * V.transpose();
    }
    if (is_inf(q)) return scale * std::sqrt(std::max(0.0, P.diagonal().maxCoeff()));
    if (m > kMaxKolmogorovDim) fail(ErrorCode::Unsupported, "sign enumeration needs m <= 16");
    const MatrixXd S = ball_vertices(m, LpIndex::infinity());
    return scale * std::sqrt(std::max(0.0, (S.transpose() * P * S).diagonal().maxCoeff()));
  }
  if (m > kMaxSectionDim) fail(ErrorCode::Unsupported, "section vertex enumeration needs m <= 10");
  if (is_one(p) && is_one(q)) return scale;
  if (lp_route && !is_two(q)) {
    double best = 0.0;
    if (is_inf(p)) {
      // max c^T V z  s.t. |V z| <= scale, for c = e_i (q = inf) or sign vectors (q = 1)
      const MatrixXd Cs = is_inf(q) ? MatrixXd::Identity(m, m) : ball_vertices(m, LpIndex::infinity());
      LpProblem lp;
      lp.A_ub.resize(2 * m, k);
      lp.A_ub << V, -V;
      lp.b_ub = VectorXd::Constant(2 * m, scale);
      lp.free_vars.assign(static_cast<std::size_t>(k), true);
      for (Eigen::Index j = 0; j < Cs.cols(); ++j) {
        lp.c = -(V.transpose() * Cs.col(j));
        const LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) fail(ErrorCode::NumericalFailure, "section LP did not reach an optimum");
        best = std::max(best, -s.objective);
      }
    } else {
      // p = 1, q = inf: max x_i  s.t. x = V z = u+ - u-, sum(u+ + u-) <= scale
      LpProblem lp;
      lp.A_eq.resize(m, k + 2 * m);
      lp.A_eq << V, -MatrixXd::Identity(m, m), MatrixXd::Identity(m, m);
      lp.b_eq = VectorXd::Zero(m);
      lp.A_ub = MatrixXd::Zero(1, k + 2 * m);
      lp.A_ub.rightCols(2 * m).setOnes();
      lp.b_ub = VectorXd::Constant(1, scale);
      lp.free_vars.assign(static_cast<std::size_t>(k + 2 * m), false);
      for (int j = 0; j < k; ++j) lp.free_vars[static_cast<std::size_t>(j)] = true;
      for (int i = 0; i < m; ++i) {
        lp.c = VectorXd::Zero(k + 2 * m);
        lp.c.head(k) = -V.row(i).transpose();
        const LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) fail(ErrorCode::NumericalFailure, "section LP did not reach an optimum");
        best = std::max(best, -s.objective);
      }
    }
    return best;
  }
  const MatrixXd X = section_vertices(V, p, scale, lp_route);
  double best = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) best = std::max(best, norm_q(X.col(j), q));
  return best;
}

void validate(const FiniteBallProblem& pr) {
  if (pr.m < 1) fail(ErrorCode::InvalidArgument, "m must be >= 1");
  if (pr.n < 0) fail(ErrorCode::InvalidArgument, "n must be >= 0");
}

WidthEstimate make_estimate(const FiniteBallProblem& pr, double value, WidthMethod method, Direction dir) {
  WidthEstimate e;
  e.problem = pr;
  e.value = value;
  e.method = method;
  e.direction = dir;
  return e;
}

// Inner problem min_y phi_mu(x - U y) by damped Newton from a warm start.
double inner_newton(const MatrixXd& U, const VectorXd& x, const LpIndex& q, double mu, VectorXd& y, VectorXd& g_r) {
  const Eigen::Index n = U.cols();
  MatrixXd Hr;
  VectorXd r = x - U * y;
  double f = smooth_norm(r, q, mu, &g_r, &Hr);
  for (int it = 0; it < 100; ++it) {
    const VectorXd gy = -U.transpose() * g_r;
    if (gy.norm() <= 1e-13 * (1.0 + f)) break;
    MatrixXd H = U.transpose() * Hr * U;
    H.diagonal().array() += 1e-14 * (1.0 + H.diagonal().maxCoeff());
    const VectorXd d = H.ldlt().solve(-gy);
    const double slope = gy.dot(d);
    if (!(slope < 0)) break;
    double a = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      const VectorXd yn = y + a * d;
      const VectorXd rn = x - U * yn;
      const double fn = smooth_norm(rn, q, mu, nullptr, nullptr);
      if (fn <= f + 1e-4 * a * slope) {
        y = yn;
        r = rn;
        moved = true;
        break;
      }
      a *= 0.5;
    }
    if (!moved) break;
    const double prev = f;
    f = smooth_norm(r, q, mu, &g_r, &Hr);
    if (prev - f <= 1e-15 * (1.0 + f) && n > 0) break;
  }
  return f;
}

OptimizerReport to_report(const FrameOptimum& opt) {
  OptimizerReport rep;
  rep.restarts_run = opt.restarts_run;
  rep.iterations = opt.iterations;
  rep.converged = opt.converged;
  rep.restart_values = opt.restart_values;
  rep.frame = opt.frame;
  return rep;
}

} // namespace

std::string to_string(WidthKind k) {
  switch (k) {
  case WidthKind::Kolmogorov: return "kolmogorov";
  case WidthKind::Gelfand: return "gelfand";
  case WidthKind::Linear: return "linear";
  }
  return "?";
}

std::string to_string(WidthMethod m) {
  switch (m) {
  case WidthMethod::Exact: return "exact";
  case WidthMethod::Optimized: return "optimized";
  case WidthMethod::ChainedLowerBound: return "chained-lower-bound";
  case WidthMethod::SampledLowerBound: return "sampled-lower-bound";
  }
  return "?";
}

std::string to_string(Direction d) {
  switch (d) {
  case Direction::Upper: return "upper";
  case Direction::Lower: return "lower";
  case Direction::Exact: return "exact";
  }
  return "?";
}

WidthKind parse_width_kind(const std::string& text) {
  if (text == "kolmogorov") return WidthKind::Kolmogorov;
  if (text == "gelfand") return WidthKind::Gelfand;
  if (text == "linear") return WidthKind::Linear;
  fail(ErrorCode::InvalidArgument, "unknown width kind '" + text + "'");
}

std::optional<WidthEstimate> exact_width(const FiniteBallProblem& pr) {
  validate(pr);
  const double m = pr.m, n = pr.n;
  auto exact = [&](double v) { return make_estimate(pr, v, WidthMethod::Exact, Direction::Exact); };
  if (pr.n >= pr.m) return exact(0.0);
  if (pr.n == 0) {
    const double e = positive_part(pr.q.reciprocal() - pr.p.reciprocal()).to_double();
    return exact(std::pow(m, e));
  }
  if (is_inf(pr.p) && is_one(pr.q) && pr.kind != WidthKind::Linear) return exact(m - n);
  if (is_one(pr.p) && is_two(pr.q) && pr.kind == WidthKind::Kolmogorov) return exact(std::sqrt(1.0 - n / m));
  if (is_two(pr.p) && is_inf(pr.q) && pr.kind == WidthKind::Gelfand) return exact(std::sqrt(1.0 - n / m));
  if (pr.p == pr.q && pr.kind == WidthKind::Kolmogorov) return exact(1.0);
  return std::nullopt;
}

double kolmogorov_deviation(const MatrixXd& U, const LpIndex& p, const LpIndex& q) {
  return kolmogorov_deviation_impl(U, p, q, 1.0, false);
}

double kolmogorov_deviation_dual(const MatrixXd& U, const LpIndex& p, const LpIndex& q) {
  return kolmogorov_deviation_impl(U, p, q, 1.0, true);
}

double gelfand_section_norm(const MatrixXd& V, const LpIndex& p, const LpIndex& q) {
  return gelfand_impl(V, p, q, 1.0, false);
}

double gelfand_section_norm_lp(const MatrixXd& V, const LpIndex& p, const LpIndex& q) {
  return gelfand_impl(V, p, q, 1.0, true);
}

WidthEstimate kolmogorov_numeric(const FiniteBallProblem& pr, const OptimizerConfig& cfg, std::uint64_t seed) {
  validate(pr);
  if (pr.m > kMaxKolmogorovDim) fail(ErrorCode::Unsupported, "kolmogorov_numeric needs m <= 16");
  if (!is_basic(pr.p) || !is_basic(pr.q)) fail(ErrorCode::Unsupported, "finite widths support p, q in {1, 2, inf}");
  if (is_two(pr.p) && !is_two(pr.q)) fail(ErrorCode::Unsupported, "Kolmogorov widths of b_2 are only available in l_2");
  const int m = pr.m, k = std::min(pr.n, pr.m);
  const LpIndex p = pr.p, q = pr.q;

  SmoothFrameObjective smooth;
  if (is_two(p)) {
    smooth = [&](const MatrixXd& U, double, double, MatrixXd* grad) {
      if (grad) *grad = MatrixXd::Zero(U.rows(), U.cols());
      return kolmogorov_deviation(U, p, q);
    };
  } else {
    const MatrixXd X = ball_vertices(m, p);
    auto ys = std::make_shared<std::vector<VectorXd>>();
    smooth = [X, ys, q](const MatrixXd& U, double beta, double mu, MatrixXd* grad) {
      const Eigen::Index nv = X.cols();
      if (static_cast<Eigen::Index>(ys->size()) != nv || (*ys)[0].size() != U.cols()) {
        ys->assign(static_cast<std::size_t>(nv), VectorXd());
        for (Eigen::Index j = 0; j < nv; ++j) (*ys)[static_cast<std::size_t>(j)] = U.transpose() * X.col(j);
      }
      VectorXd vals(nv);
      std::vector<VectorXd> gr(static_cast<std::size_t>(nv));
      for (Eigen::Index j = 0; j < nv; ++j) {
        VectorXd& y = (*ys)[static_cast<std::size_t>(j)];
        if (is_two(q)) {
          y = U.transpose() * X.col(j);
          const VectorXd r = X.col(j) - U * y;
          vals(j) = smooth_norm(r, q, mu, &gr[static_cast<std::size_t>(j)], nullptr);
        } else {
          vals(j) = inner_newton(U, X.col(j), q, mu, y, gr[static_cast<std::size_t>(j)]);
        }
      }
      VectorXd w;
      const double f = soft_max(vals, beta, &w);
      if (grad) {
        grad->setZero(U.rows(), U.cols());
        for (Eigen::Index j = 0; j < nv; ++j)
          if (w(j) > 1e-300) *grad -= w(j) * gr[static_cast<std::size_t>(j)] * (*ys)[static_cast<std::size_t>(j)].transpose();
      }
      return f;
    };
  }
  const ExactFrameObjective exact = [&](const MatrixXd& U) { return kolmogorov_deviation(U, p, q); };
  const FrameOptimum opt = optimize_frame(m, k, smooth, exact, cfg, seed);
  WidthEstimate e = make_estimate(pr, opt.value, WidthMethod::Optimized, Direction::Upper);
  OptimizerReport rep = to_report(opt);
  rep.reevaluated = kolmogorov_deviation_dual(opt.frame, p, q);
  rep.reevaluation_gap = std::abs(rep.reevaluated - opt.value);
  e.report = std::move(rep);
  return e;
}

WidthEstimate gelfand_numeric(const FiniteBallProblem& pr, const OptimizerConfig& cfg, std::uint64_t seed) {
  validate(pr);
  if (!is_basic(pr.p) || !is_basic(pr.q)) fail(ErrorCode::Unsupported, "finite widths support p, q in {1, 2, inf}");
  if (is_polytope(pr.p) && pr.m > kMaxSectionDim) fail(ErrorCode::Unsupported, "gelfand_numeric needs m <= 10 for p in {1, inf}");
  if (pr.m > kMaxKolmogorovDim) fail(ErrorCode::Unsupported, "gelfand_numeric needs m <= 16");
  const int m = pr.m, k = std::max(0, pr.m - pr.n);
  const LpIndex p = pr.p, q = pr.q;

  SmoothFrameObjective smooth;
  if (is_two(p)) {
    const MatrixXd S = ball_vertices(m, LpIndex::infinity());
    smooth = [S, q](const MatrixXd& V, double beta, double mu, MatrixXd* grad) {
      if (is_two(q)) {
        if (grad) grad->setZero(V.rows(), V.cols());
        return 1.0;
      }
      // Candidates: rows of V (q = inf) or V^T sigma over sign vectors (q = 1).
      const MatrixXd A = is_inf(q) ? MatrixXd(V) : MatrixXd(S.transpose() * V);
      const VectorXd vals = (A.rowwise().squaredNorm().array() + mu * mu).sqrt().matrix();
      VectorXd w;
      const double f = soft_max(vals, beta, &w);
      if (grad) {
        const MatrixXd Aw = (w.cwiseQuotient(vals)).asDiagonal() * A;
        *grad = is_inf(q) ? Aw : MatrixXd(S * Aw);
      }
      return f;
    };
  } else if (is_inf(p)) {
    smooth = [q](const MatrixXd& V, double beta, double mu, MatrixXd* grad) {
      std::vector<std::vector<int>> subsets;
      std::vector<VectorXd> coords;
      const MatrixXd X = section_vertices(V, LpIndex::infinity(), 1.0, false, &subsets, &coords);
      if (X.cols() == 0) fail(ErrorCode::NumericalFailure, "section has no vertices");
      VectorXd vals(X.cols());
      std::vector<VectorXd> gs(static_cast<std::size_t>(X.cols()));
      for (Eigen::Index j = 0; j < X.cols(); ++j)
        vals(j) = smooth_norm(X.col(j), q, mu, &gs[static_cast<std::size_t>(j)], nullptr);
      VectorXd w;
      const double f = soft_max(vals, beta, &w);
      if (grad) {
        grad->setZero(V.rows(), V.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
          if (w(j) < 1e-300) continue;
          const auto& S = subsets[static_cast<std::size_t>(j)];
          const VectorXd& g = gs[static_cast<std::size_t>(j)];
          const VectorXd u = rows_of(V, S).transpose().partialPivLu().solve(V.transpose() * g);
          VectorXd h = g;
          for (std::size_t i = 0; i < S.size(); ++i) h(S[i]) -= u(static_cast<Eigen::Index>(i));
          *grad += w(j) * h * coords[static_cast<std::size_t>(j)].transpose();
        }
      }
      return f;
    };
  } else {
    auto value = [q](const MatrixXd& V, double beta, double mu) {
      const MatrixXd X = section_vertices(V, LpIndex::from_value(Rational(1)), 1.0, false);
      if (X.cols() == 0) fail(ErrorCode::NumericalFailure, "section has no vertices");
      VectorXd vals(X.cols());
      for (Eigen::Index j = 0; j < X.cols(); ++j) vals(j) = smooth_norm(X.col(j), q, mu, nullptr, nullptr);
      return soft_max(vals, beta, nullptr);
    };
    smooth = [value](const MatrixXd& V, double beta, double mu, MatrixXd* grad) {
      const double f = value(V, beta, mu);
      if (grad) {
        // Central differences; the section vertices have no cheap closed-form derivative.
        grad->setZero(V.rows(), V.cols());
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < V.rows(); ++i)
          for (Eigen::Index j = 0; j < V.cols(); ++j) {
            MatrixXd Vp = V, Vm = V;
            Vp(i, j) += h;
            Vm(i, j) -= h;
            (*grad)(i, j) = (value(Vp, beta, mu) - value(Vm, beta, mu)) / (2.0 * h);
          }
      }
      return f;
    };
  }
  const ExactFrameObjective exact = [&](const MatrixXd& V) { return gelfand_section_norm(V, p, q); };
  const FrameOptimum opt = optimize_frame(m, k, smooth, exact, cfg, seed);
  WidthEstimate e = make_estimate(pr, opt.value, WidthMethod::Optimized, Direction::Upper);
  OptimizerReport rep = to_report(opt);
  rep.reevaluated = gelfand_section_norm_lp(opt.frame, p, q);
  rep.reevaluation_gap = std::abs(rep.reevaluated - opt.value);
  e.report = std::move(rep);
  return e;
}

WidthEstimate linear_lower(const WidthEstimate& kol, const WidthEstimate& gel) {
  const auto& a = kol.problem;
  const auto& b = gel.problem;
  if (a.kind != WidthKind::Kolmogorov || b.kind != WidthKind::Gelfand)
    fail(ErrorCode::InvalidArgument, "linear_lower needs a Kolmogorov and a Gelfand estimate");
  if (a.m != b.m || a.n != b.n || !(a.p == b.p) || !(a.q == b.q))
    fail(ErrorCode::InvalidArgument, "linear_lower inputs must share (m, n, p, q)");
  // An upper estimate of d_n or d^n does not bound delta_n from below.
  if (kol.direction == Direction::Upper && gel.direction == Direction::Upper)
    fail(ErrorCode::InvalidArgument, "linear_lower needs at least one exact or lower estimate");
  double v = 0.0;
  if (kol.direction != Direction::Upper) v = std::max(v, kol.value);
  if (gel.direction != Direction::Upper) v = std::max(v, gel.value);
  FiniteBallProblem pr = a;
  pr.kind = WidthKind::Linear;
  return make_estimate(pr, v, WidthMethod::Exact, Direction::Lower);
}

HolderCheck holder_embed_check(const Eigen::Ref<const VectorXd>& a, const LpIndex& alpha, const LpIndex& alpha1) {
  if (alpha > alpha1) fail(ErrorCode::InvalidArgument, "holder_embed_check needs alpha <= alpha1");
  if (a.size() == 0) fail(ErrorCode::InvalidArgument, "holder_embed_check needs a nonempty vector");
  const double m = static_cast<double>(a.size());
  const double e = (alpha.reciprocal() - alpha1.reciprocal()).to_double();
  const VectorXd v = a;
  HolderCheck h;
  h.lhs = norm_q(v, alpha);
  const double n1 = norm_q(v, alpha1);
  h.rhs = std::pow(m, e) * n1;
  const double slack = 1e-12 * std::max(1.0, h.rhs);
  h.norm_inequality = h.lhs <= h.rhs + slack;
  if (n1 == 0.0) {
    h.inclusion = true;
  } else {
    // m^{-e} a / ||a||_alpha1 must lie in the unit alpha-ball.
    const VectorXd y = std::pow(m, -e) * v / n1;
    h.inclusion = norm_q(y, alpha) <= 1.0 + 1e-12;
  }
  return h;
}

MonotonicityReport width_monotonicity_check(const std::vector<WidthEstimate>& estimates, double tol, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) fail(ErrorCode::InvalidArgument, "scale must lie in (0, 1]");
  MonotonicityReport rep;
  using Key = std::tuple<int, std::string, std::string, int>;
  std::map<Key, std::vector<const WidthEstimate*>> families;
  for (const auto& e : estimates) {
    const auto& pr = e.problem;
    families[{pr.m, pr.p.str(), pr.q.str(), static_cast<int>(pr.kind)}].push_back(&e);
  }
  for (auto& [key, fam] : families) {
    std::sort(fam.begin(), fam.end(), [](auto* x, auto* y) { return x->problem.n < y->problem.n; });
    for (std::size_t i = 1; i < fam.size(); ++i) {
      const auto* lo = fam[i - 1];
      const auto* hi = fam[i];
      if (hi->value > lo->value + tol)
        rep.violations.push_back(to_string(hi->problem.kind) + " m=" + std::to_string(hi->problem.m) + " p=" +
                                 hi->problem.p.str() + " q=" + hi->problem.q.str() + ": value rises from n=" +
                                 std::to_string(lo->problem.n) + " to n=" + std::to_string(hi->problem.n));
    }
  }
  for (const auto& e : estimates) {
    if (!e.report || e.report->frame.size() == 0) continue;
    const auto& pr = e.problem;
    double scaled;
    if (pr.kind == WidthKind::Kolmogorov)
      scaled = kolmogorov_deviation_impl(e.report->frame, pr.p, pr.q, scale, false);
    else if (pr.kind == WidthKind::Gelfand)
      scaled = gelfand_impl(e.report->frame, pr.p, pr.q, scale, false);
    else
      continue;
    if (std::abs(scaled - scale * e.value) > tol * std::max(1.0, e.value))
      rep.violations.push_back(to_string(pr.kind) + " m=" + std::to_string(pr.m) + " n=" + std::to_string(pr.n) +
                               ": scaling the ball by " + std::to_string(scale) + " does not scale the width");
  }
  rep.ok = rep.violations.empty();
  return rep;
}

} // namespace widthlab
