#include "widthlab/width_optimizer.hpp"

#include <cmath>
#include <limits>

#include "widthlab/errors.hpp"
#include "widthlab/random.hpp"

namespace widthlab {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A) {
  if (A.cols() == 0) return A;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const Eigen::MatrixXd R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

double soft_max(const Eigen::VectorXd& v, double beta, Eigen::VectorXd* w) {
  const double top = v.maxCoeff();
  Eigen::VectorXd e = (beta * (v.array() - top)).exp().matrix();
  const double sum = e.sum();
  if (w) *w = e / sum;
  return top + std::log(sum) / beta;
}

FrameOptimum optimize_frame(int m, int k, const SmoothFrameObjective& smooth, const ExactFrameObjective& exact,
                            const OptimizerConfig& cfg, std::uint64_t seed) {
  if (k < 0 || k > m) fail(ErrorCode::InvalidArgument, "frame dimension must lie in [0, m]");
  if (cfg.restarts < 1 || cfg.iterations < 1 || cfg.stages < 1)
    fail(ErrorCode::InvalidArgument, "optimizer needs positive restarts, iterations and stages");
  FrameOptimum best;
  best.value = std::numeric_limits<double>::infinity();
  if (k == 0 || k == m) {
    best.frame = Eigen::MatrixXd::Identity(m, k);
    best.value = exact(best.frame);
    best.restarts_run = 1;
    best.converged = true;
    best.restart_values = {best.value};
    return best;
  }
  const CounterRng root(seed);
  const int per_stage = std::max(1, cfg.iterations / cfg.stages);
  int agree = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(r));
    Eigen::MatrixXd U = orthonormalize(rng.normal_matrix(m, k));
    const double scale = std::max(std::abs(exact(U)), 1e-12);
    double step = 0.1;
    for (int s = 0; s < cfg.stages; ++s) {
      const double frac = cfg.stages == 1 ? 1.0 : static_cast<double>(s) / (cfg.stages - 1);
      const double beta = cfg.beta_start * std::pow(cfg.beta_end / cfg.beta_start, frac) / scale;
      const double mu = cfg.mu_start * std::pow(cfg.mu_end / cfg.mu_start, frac);
      Eigen::MatrixXd G;
      double f = smooth(U, beta, mu, &G);
      int stall = 0;
      for (int it = 0; it < per_stage; ++it) {
        ++best.iterations;
        const Eigen::MatrixXd UtG = U.transpose() * G;
        const Eigen::MatrixXd xi = G - U * (0.5 * (UtG + UtG.transpose()));
        const double g2 = xi.squaredNorm();
        if (g2 < 1e-24) break;
        step = std::min(step * 2.0, 1.0);
        bool moved = false;
        for (int h = 0; h < 40; ++h) {
          Eigen::MatrixXd Un = orthonormalize(U - step * xi);
          Eigen::MatrixXd Gn;
          const double fn = smooth(Un, beta, mu, &Gn);
          if (fn <= f - 1e-4 * step * g2) {
            const double dec = f - fn;
            U = std::move(Un);
            G = std::move(Gn);
            f = fn;
            moved = true;
            stall = dec <= cfg.tolerance * std::max(1.0, std::abs(f)) ? stall + 1 : 0;
            break;
          }
          step *= 0.5;
        }
        if (!moved || stall >= 10) break;
      }
    }
    const double v = exact(U);
    best.restart_values.push_back(v);
    ++best.restarts_run;
    if (v < best.value - cfg.agree_tol * std::max(1.0, std::abs(v))) {
      best.value = v;
      best.frame = U;
      agree = 1;
    } else if (v <= best.value + cfg.agree_tol * std::max(1.0, std::abs(best.value))) {
      if (v < best.value) {
        best.value = v;
        best.frame = U;
      }
      ++agree;
    }
    if (agree >= cfg.agree_stop) {
      best.converged = true;
      break;
    }
  }
  return best;
}

} // namespace widthlab
