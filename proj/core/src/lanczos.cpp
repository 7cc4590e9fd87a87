#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/random.hpp"

namespace widthlab {

namespace {

// Orthogonalize the columns of X against Q (first `filled` columns) and among
// themselves, two passes of classical Gram-Schmidt. Columns that collapse are
// replaced by fresh random directions.
int orthonormalize_block(Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, int filled, CounterRng& rng) {
  int kept = 0;
  for (int j = 0; j < X.cols(); ++j) {
    Eigen::VectorXd v = X.col(j);
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (filled > 0) v -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * v);
        if (kept > 0) v -= X.leftCols(kept) * (X.leftCols(kept).transpose() * v);
      }
      const double after = v.norm();
      if (after > 1e-8 * std::max(before, 1e-300)) {
        X.col(kept++) = v / after;
        break;
      }
      v = rng.normal_vector(X.rows());
    }
  }
  return kept;
}

} // namespace

DiscreteSpectrum lanczos_eigs(const MeshOperators& ops, int k, std::uint64_t seed, const LanczosOptions& options) {
  const int n = static_cast<int>(ops.mass.size());
  if (k < 1 || 4 * k > n) fail(ErrorCode::InvalidArgument, "lanczos_eigs requires 1 <= k <= vertices/4");
  if ((ops.mass.array() <= 0.0).any()) fail(ErrorCode::InvalidArgument, "mass must be positive");

  const Eigen::VectorXd sqrt_mass = ops.mass.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_mass = sqrt_mass.cwiseInverse();
  double diag_ratio = 0.0;
  for (int i = 0; i < n; ++i) diag_ratio += ops.stiffness.coeff(i, i) / ops.mass[i];
  const double sigma = 1e-3 * diag_ratio / n;

  Eigen::SparseMatrix<double> shifted = ops.stiffness;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma * ops.mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "factorization of L + sigma M failed");

  // Symmetric operator y -> D (L + sigma M)^{-1} D y with D = M^{1/2}; its
  // largest eigenvalues map to the smallest generalized ones.
  auto apply = [&](const Eigen::MatrixXd& Y) {
    Eigen::MatrixXd rhs = sqrt_mass.asDiagonal() * Y;
    Eigen::MatrixXd sol = solver.solve(rhs);
    return Eigen::MatrixXd(sqrt_mass.asDiagonal() * sol);
  };

  // Near-degenerate clusters wider than the block converge very slowly, so the
  // block is at least k.
  const int block = std::min(std::max(8, k), n / 4);
  const int max_dim =
      options.max_subspace > 0 ? std::min(options.max_subspace, n) : std::min(n, std::max(12 * k, 256));

  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    Eigen::MatrixXd Q(n, max_dim);
    Eigen::MatrixXd AQ(n, max_dim);
    int filled = 0;
    Eigen::MatrixXd X = rng.normal_matrix(n, block);
    bool breakdown = false;
    int dim_target = std::min(max_dim, std::max(2 * k + 2 * block, 4 * block));

    while (true) {
      while (filled < dim_target) {
        const int width = std::min<int>(static_cast<int>(X.cols()), dim_target - filled);
        Eigen::MatrixXd Xb = X.leftCols(width);
        const int kept = orthonormalize_block(Xb, Q, filled, rng);
        if (kept == 0) {
          breakdown = true;
          break;
        }
        Q.middleCols(filled, kept) = Xb.leftCols(kept);
        AQ.middleCols(filled, kept) = apply(Xb.leftCols(kept));
        X = AQ.middleCols(filled, kept);
        filled += kept;
      }
      if (breakdown && filled < k) break;

      Eigen::MatrixXd H = Q.leftCols(filled).transpose() * AQ.leftCols(filled);
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
      if (eig.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "projected eigenproblem failed");
      // Ascending theta; the top k are what we need.
      const Eigen::VectorXd theta = eig.eigenvalues();
      const Eigen::MatrixXd S = eig.eigenvectors().rightCols(k);
      const Eigen::MatrixXd Y = Q.leftCols(filled) * S;
      const Eigen::MatrixXd AY = AQ.leftCols(filled) * S;
      // Residuals relative to the operator norm estimate theta_max. A cluster
      // split at k must converge whole, so its remaining members are checked too.
      const double theta_max = std::abs(theta[filled - 1]);
      int checked = std::min(filled, k);
      while (checked < filled && checked < k + block &&
             std::abs(theta[filled - 1 - checked] - theta[filled - k]) <= 1e-2 * std::abs(theta[filled - k]))
        ++checked;
      const Eigen::MatrixXd Sg = eig.eigenvectors().rightCols(checked);
      const Eigen::MatrixXd Rg = AQ.leftCols(filled) * Sg - Q.leftCols(filled) * Sg * theta.tail(checked).asDiagonal();
      bool converged = true;
      for (int j = 0; j < checked; ++j)
        if (Rg.col(j).norm() > options.tolerance * theta_max) converged = false;
      for (int j = 0; j < k; ++j) {
        const double th = theta[filled - k + j];
        if ((AY.col(j) - th * Y.col(j)).norm() > options.tolerance * theta_max) converged = false;
      }
      if (converged || filled >= max_dim || breakdown) {
        DiscreteSpectrum out;
        out.iterations = filled;
        out.eigenvalues.resize(k);
        out.eigenvectors.resize(n, k);
        out.residuals.resize(k);
        for (int j = 0; j < k; ++j) {
          // Reverse so eigenvalues come out ascending.
          const int src = k - 1 - j;
          const double th = theta[filled - k + src];
          out.eigenvalues[j] = 1.0 / th - sigma;
          Eigen::VectorXd v = inv_sqrt_mass.asDiagonal() * Y.col(src);
          const double mnorm = std::sqrt(v.dot(ops.mass.asDiagonal() * v));
          v /= mnorm;
          // Deterministic sign: largest-magnitude entry positive.
          Eigen::Index imax = 0;
          v.cwiseAbs().maxCoeff(&imax);
          if (v[imax] < 0) v = -v;
          out.eigenvectors.col(j) = v;
        }
        // The closed-mesh kernel is exactly the constants.
        if (std::abs(out.eigenvalues[0]) < 1e-8) out.eigenvalues[0] = 0.0;
        for (int j = 0; j < k; ++j) {
          const Eigen::VectorXd v = out.eigenvectors.col(j);
          const Eigen::VectorXd r = ops.stiffness * v - out.eigenvalues[j] * (ops.mass.asDiagonal() * v);
          out.residuals[j] = r.norm() / v.norm();
        }
        if (!converged && !breakdown)
          fail(ErrorCode::NumericalFailure, "lanczos did not converge within the subspace limit");
        if (converged) return out;
        break; // breakdown before convergence: restart with a new stream
      }
      dim_target = std::min(max_dim, dim_target + std::max(2 * block, dim_target / 2));
    }
  }
  fail(ErrorCode::NumericalFailure, "lanczos breakdown persisted after restarts");
}

} // namespace widthlab
