#pragma once

#include <cstdint>
#include <vector>

#include "widthlab/filter.hpp"
#include "widthlab/kernel.hpp"
#include "widthlab/manifold.hpp"
#include "widthlab/rate_lab.hpp"
#include "widthlab/spectral_basis.hpp"
#include "widthlab/stats.hpp"

namespace widthlab {

// lo * ratio^k for k = 0, 1, ... while <= hi * (1 + 1e-12).
std::vector<double> geometric_grid(double lo, double hi, double ratio);

struct WeylRow {
  double t = 0.0;
  std::size_t count = 0; // N_t
  double leading = 0.0;  // vol * omega_s * t^{s/2} / (2 pi)^s
  double ratio = 0.0;
};
struct WeylScan {
  std::vector<WeylRow> rows;
  LineFit fit; // log N_t against log t
};
// Every t must lie within the materialized band.
WeylScan weyl_scan(const SpectralBasis& basis, const std::vector<double>& t_grid);

struct KernelScanRow {
  double t = 0.0;
  RowNorms norms;
  PropagationReport propagation;
  LocalizationProfile localization;
  std::size_t modes = 0;
  double tail_bound = 0.0;
  std::vector<double> extra_norms; // one per extra alpha
};
struct KernelScan {
  std::vector<KernelScanRow> rows;
  LineFit fit_l1, fit_l2, fit_linf; // log norm against log t
  double localization_spread = 0.0; // max C / min C over the resolved rows
  std::size_t falsified = 0;
  std::size_t unresolved = 0; // rows whose peak |K| does not exceed the truncation tolerance
  std::vector<double> extra_alphas;
  std::vector<LineFit> extra_fits;
};
// One basis and quadrature sized for the smallest t serve the whole grid.
// Localization bins have edges t * {0, 1/4, 1/2, 1, 2, ...} up to the diameter.
// extra_alphas adds row norms for exponents other than 1, 2 and inf.
KernelScan kernel_scan(const Manifold& m, const FilterFunction& F, const std::vector<double>& t_grid, const Point& x,
                       double propagation_tolerance = 0.0, const std::vector<double>& extra_alphas = {});

struct BumpScanRow {
  int N = 0;
  std::size_t P = 0;
  double t = 0.0;
  double norm_l1 = 0.0, norm_l2 = 0.0, norm_linf = 0.0; // max over bumps
  double support_radius = 0.0, rho = 0.0;
  bool inside = false;
  double projection_error = 0.0; // max |Pi_N g_a - a| / max |a| over sampled a
};
struct BumpScan {
  std::vector<BumpScanRow> rows;
  LineFit fit_l1, fit_l2, fit_linf; // log norm against log N
};
BumpScan bump_scan(BumpFamily& family, const std::vector<int>& N_grid, std::uint64_t seed);

struct LiftScanRow {
  int N = 0;
  double norm = 0.0; // measured ||sum a_i L^{r/2} phi_i||_p / ||a||_p
};
struct LiftScan {
  Rational r;
  double p = 2.0;
  std::vector<LiftScanRow> rows;
  LineFit fit;
};
LiftScan lift_scan(BumpFamily& family, const std::vector<int>& N_grid, const Rational& r, double p,
                   std::uint64_t seed, std::size_t samples = 64);

struct EigenGroup {
  double mean = 0.0;
  double lo = 0.0, hi = 0.0;
  int multiplicity = 0;
};
// Consecutive values join a group while their relative gap stays below rel_gap.
std::vector<EigenGroup> cluster_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& values, double rel_gap = 0.05);

} // namespace widthlab
