#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "widthlab/rational.hpp"

namespace widthlab {

enum class WidthKind { Kolmogorov, Gelfand, Linear };
enum class WidthMethod { Exact, Optimized, ChainedLowerBound, SampledLowerBound };
enum class Direction { Upper, Lower, Exact };

std::string to_string(WidthKind k);
std::string to_string(WidthMethod m);
std::string to_string(Direction d);
WidthKind parse_width_kind(const std::string& text);

// Width of the unit ball b_p^m in l_q^m.
struct FiniteBallProblem {
  int m = 1;
  int n = 0;
  LpIndex p, q;
  WidthKind kind = WidthKind::Kolmogorov;
};

struct OptimizerConfig {
  int restarts = 32;
  int iterations = 500;
  double tolerance = 1e-10;   // relative objective change that counts as stalled
  double beta_start = 8.0;    // softmax sharpness relative to the objective scale
  double beta_end = 4096.0;
  double mu_start = 1e-1;     // smoothing of |.| and max in the inner problems
  double mu_end = 1e-7;
  int stages = 6;             // continuation stages between start and end values
  int agree_stop = 4;         // stop once this many restarts reproduce the best value
  double agree_tol = 1e-7;
};

struct OptimizerReport {
  int restarts_run = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> restart_values;
  // Orthonormal frame: the subspace Z_n (Kolmogorov) or the section ker A (Gelfand).
  Eigen::MatrixXd frame;
  double reevaluated = 0.0;      // inner extremum recomputed by an independent method
  double reevaluation_gap = 0.0; // |value - reevaluated|
};

struct WidthEstimate {
  FiniteBallProblem problem;
  double value = 0.0;
  WidthMethod method = WidthMethod::Exact;
  Direction direction = Direction::Exact;
  std::optional<OptimizerReport> report;
};

// Closed forms: m - n for (inf, 1) Kolmogorov and Gelfand, sqrt(1 - n/m) for
// (1, 2) Kolmogorov and (2, inf) Gelfand, m^{(1/q - 1/p)_+} at n = 0, zero for
// n >= m, and 1 for p = q Kolmogorov with n < m.
std::optional<WidthEstimate> exact_width(const FiniteBallProblem& problem);

// Exact sup over b_p of dist_q(x, span U) for p in {1, inf} (vertices, with inner
// distances from basic solutions) and p = q = 2.
double kolmogorov_deviation(const Eigen::MatrixXd& U, const LpIndex& p, const LpIndex& q);
// Same quantity with every inner distance computed from the dual LP.
double kolmogorov_deviation_dual(const Eigen::MatrixXd& U, const LpIndex& p, const LpIndex& q);
// Exact max of ||x||_q over b_p intersected with span V, by vertex enumeration or closed form.
double gelfand_section_norm(const Eigen::MatrixXd& V, const LpIndex& p, const LpIndex& q);
// Same quantity by linear programming where the target norm allows it, else by
// closed-form projector algebra.
double gelfand_section_norm_lp(const Eigen::MatrixXd& V, const LpIndex& p, const LpIndex& q);

WidthEstimate kolmogorov_numeric(const FiniteBallProblem& problem, const OptimizerConfig& config, std::uint64_t seed);
WidthEstimate gelfand_numeric(const FiniteBallProblem& problem, const OptimizerConfig& config, std::uint64_t seed);

// delta_n >= max(d_n, d^n).
WidthEstimate linear_lower(const WidthEstimate& kolmogorov, const WidthEstimate& gelfand);

struct HolderCheck {
  bool norm_inequality = false; // ||a||_alpha <= m^{1/alpha - 1/alpha1} ||a||_alpha1
  bool inclusion = false;       // a / ||a||_alpha1 lies in m^{1/alpha - 1/alpha1} b_alpha
  double lhs = 0.0, rhs = 0.0;
  bool ok() const { return norm_inequality && inclusion; }
};
HolderCheck holder_embed_check(const Eigen::Ref<const Eigen::VectorXd>& a, const LpIndex& alpha, const LpIndex& alpha1);

struct MonotonicityReport {
  bool ok = true;
  std::vector<std::string> violations;
};
// Nonincreasing in n within tolerance for each (m, p, q, kind) family, and
// homogeneity under scaling the ball by c for estimates carrying a frame.
MonotonicityReport width_monotonicity_check(const std::vector<WidthEstimate>& estimates, double tolerance = 1e-3,
                                            double scale = 0.5);

} // namespace widthlab
