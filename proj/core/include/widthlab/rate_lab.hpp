#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "widthlab/bumps.hpp"
#include "widthlab/filter.hpp"
#include "widthlab/finite_widths.hpp"
#include "widthlab/kernel.hpp"
#include "widthlab/manifold.hpp"
#include "widthlab/rational.hpp"
#include "widthlab/spectral_basis.hpp"

namespace widthlab {

// Sobolev ball B_p^r on an s-dimensional manifold measured in L_q.
struct SobolevSpec {
  LpIndex p, q;
  Rational r{1};
  int s = 1;

  // Throws InvalidArgument unless r/s > (1/p - 1/q)_+.
  static SobolevSpec make(const LpIndex& p, const LpIndex& q, const Rational& r, int s);
  static bool admissible(const LpIndex& p, const LpIndex& q, const Rational& r, int s);
  std::string str() const;
};

enum class BoundSide { Lower, Upper };

struct TheoreticalExponent {
  Rational value;
  int theorem_case = 0; // range of (p, q) used for a lower bound, 1..4; 0 for the upper line
  bool is_max = false;  // linear widths for p <= 2 <= q: max(first, second)
  Rational first, second;
};

// First matching range: 1) q <= p, 2) p <= q <= 2, 3) 2 <= p <= q, 4) p <= 2 <= q.
int main_theorem_case(const SobolevSpec& spec);
TheoreticalExponent theoretical_exponent(const SobolevSpec& spec, WidthKind kind, BoundSide side);

struct RatePoint {
  double x = 0.0;
  double value = 0.0;
};

struct FitWindow {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

struct RateFit {
  std::vector<RatePoint> points; // points inside the final window
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  FitWindow window;
  bool retried = false; // smallest octave dropped after a poor first fit
  double first_exponent = 0.0, first_r2 = 0.0;
};

// Least squares on (log x, log value) over the window. Needs >= 4 points
// spanning >= 3 octaves; when R^2 < r2_retry the smallest octave is dropped
// once, provided the remainder still meets both requirements.
RateFit fit_rate(const std::vector<RatePoint>& points, const FitWindow& window = {}, double r2_retry = 0.98);

// (1 + lambda_n^{r/2})^{-1}: the Kolmogorov width of B_2^r in L_2.
double exact_L2_sobolev_width(const SpectralBasis& basis, const Rational& r, int n);

struct L2BruteForce {
  double oracle = 0.0;
  double first_n_deviation = 0.0; // deviation of the span of the first n modes
  double best_random = 0.0;       // smallest deviation over the random subspaces
  int subspaces = 0;
  bool beaten = false;            // best_random < oracle beyond rounding
};
// Random n-dimensional subspaces of the first `truncation` modes; the deviation
// sup ||P_perp c|| / (||c|| + ||D c||) is maximized from the witness vector,
// the coordinate vectors and random starts.
L2BruteForce brute_force_L2_width(const SpectralBasis& basis, const Rational& r, int n, int truncation,
                                  int subspaces, std::uint64_t seed);

struct BumpFamilyConfig {
  double Lambda = 1.0;
  double band_lo = 1.0, band_hi = 2.0;
  int Q = 3;
  double tail_rel = 1e-12;
  double probe_t = 1.0 / 16.0; // t at which the propagation constant C0 is measured
  double support_rel = 1e-8;
  std::size_t epsilon_samples = 500;
  std::size_t spectral_samples = 4;
  std::size_t norm_samples = 200;
};

// Bump systems over a packing family, sharing one filter and one measured C0.
class BumpFamily {
public:
  BumpFamily(Manifold manifold, BumpFamilyConfig config = {});

  const Manifold& manifold() const { return manifold_; }
  const BumpFamilyConfig& config() const { return config_; }
  const FilterFunction& filter() const { return filter_; }
  const PropagationReport& propagation() const { return propagation_; }
  double C0() const { return propagation_.C0(); }

  // Built on first use and cached.
  const BumpSystem& system(int N, const Rational& r);

private:
  Manifold manifold_;
  BumpFamilyConfig config_;
  FilterFunction filter_;
  PropagationReport propagation_;
  std::map<std::pair<int, std::pair<std::int64_t, std::int64_t>>, std::unique_ptr<BumpSystem>> cache_;
};

struct ChainedLowerBound {
  WidthEstimate estimate;         // method chained-lower-bound, direction lower
  int N = 0, n = 0;
  std::size_t P = 0;
  std::string route;              // chain used, e.g. "direct d_n(b_1, l_2)" or "reduce to (inf, 1)"
  LpIndex p_used, q_used;         // indices after the manifold-level reduction
  double reduction_factor = 1.0;  // volume factor of that reduction
  double finite_width = 0.0;      // s_n(b_p^P, l_q^P) lower bound, Hoelder factor included
  double epsilon = 0.0;           // eps_N
  double norm_lower = 0.0;        // m_q in ||g_a||_q >= m_q N^{-1/q} ||a||_q
  double projection_bound = 1.0;  // ||Pi_N||_{q->q} bound (Kolmogorov chains)
};

// Lower bound on s_n(B_p^r, L_q) from the bump system at N. Throws when
// P_N < 2n (unless n >= P_N, where the finite width and the bound are zero)
// and when the bump supports are not certified inside their balls.
struct ChainSampling {
  std::size_t epsilon_samples = 500;
  std::size_t spectral_samples = 4;
  std::size_t norm_samples = 200;
};
ChainedLowerBound chained_lower_bound(const BumpSystem& sys, const SobolevSpec& spec, WidthKind kind, int n,
                                      std::uint64_t seed, const ChainSampling& sampling = {});

// Smallest power of two nu with P_{nu n} >= 2n.
int choose_nu(BumpFamily& family, int n, const Rational& r, int max_nu = 64);

struct CaseSuiteConfig {
  std::vector<SobolevSpec> specs;
  std::vector<WidthKind> kinds{WidthKind::Kolmogorov, WidthKind::Gelfand, WidthKind::Linear};
  std::vector<int> n_grid{8, 16, 32, 64};
  int nu = 0; // 0 selects the smallest power of two per n
  double tolerance = 0.15;
  double r2_retry = 0.98;
  FitWindow window;
  std::uint64_t seed = 1;
  // p = q = 2 specs: the exact oracle is fitted on this grid (n_grid when
  // empty) and its exponent must match the lower exponent within oracle_tolerance.
  std::vector<int> oracle_n_grid;
  double oracle_tolerance = 0.05;
};

struct SeriesPoint {
  int n = 0, N = 0;
  std::size_t P = 0;
  double value = 0.0;
  double finite_width = 0.0, epsilon = 0.0, norm_lower = 0.0, projection_bound = 1.0, reduction_factor = 1.0;
  std::string route;
  std::optional<double> oracle; // exact L_2 width for p = q = 2
};

struct CaseRecord {
  SobolevSpec spec;
  WidthKind kind = WidthKind::Kolmogorov;
  TheoreticalExponent lower, upper;
  std::vector<SeriesPoint> series;
  RateFit fit;
  bool within_bracket = false; // fitted in [lower - tol, upper + tol]
  bool matches_lower = false;  // |fitted - lower| <= tol
  bool below_upper = false;    // fitted <= upper + tol
  std::optional<bool> below_oracle; // p = q = 2: chained <= exact width at every n
  std::optional<RateFit> oracle_fit;
  std::string verdict;         // PASS when within the bracket (and below the oracle)
};

struct CaseSuiteReport {
  std::vector<CaseRecord> records;
  bool all_pass = true;
};

CaseSuiteReport run_case_suite(BumpFamily& family, const CaseSuiteConfig& config);

} // namespace widthlab
