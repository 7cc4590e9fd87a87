#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "widthlab/finite_widths.hpp"

namespace widthlab {

// Smoothed objective on m x k orthonormal frames: returns the value for the
// given softmax sharpness beta and smoothing mu, and writes the Euclidean
// gradient when grad is non-null.
using SmoothFrameObjective = std::function<double(const Eigen::MatrixXd& U, double beta, double mu, Eigen::MatrixXd* grad)>;
using ExactFrameObjective = std::function<double(const Eigen::MatrixXd& U)>;

struct FrameOptimum {
  Eigen::MatrixXd frame;
  double value = 0.0;
  int iterations = 0;
  int restarts_run = 0;
  bool converged = false;
  std::vector<double> restart_values;
};

// Random-restart Riemannian descent on the Stiefel manifold with QR
// retraction, Armijo backtracking and (beta, mu) continuation. Each restart
// uses its own substream, so the result does not depend on evaluation order.
FrameOptimum optimize_frame(int m, int k, const SmoothFrameObjective& smooth, const ExactFrameObjective& exact,
                            const OptimizerConfig& config, std::uint64_t seed);

// Orthonormal basis of the column span (thin Q factor with positive diagonal R).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A);

// (1/beta) log sum exp(beta v_i), with the softmax weights written to w.
double soft_max(const Eigen::VectorXd& v, double beta, Eigen::VectorXd* w);

} // namespace widthlab
