#pragma once

#include <vector>

#include <Eigen/Dense>

#include "widthlab/filter.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/spectral_basis.hpp"

namespace widthlab {

struct TruncationCertificate {
  double lambda_cut = 0.0;   // eigenvalue cutoff: modes with lambda <= lambda_cut are summed
  std::size_t mode_count = 0;
  double tail_bound = 0.0;   // bound on sum over neglected modes of |F(t^2 lambda)| sup u^2
};

class KernelJob {
public:
  KernelJob(BasisPtr basis, FilterFunction filter, double t);

  const SpectralBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const FilterFunction& filter() const { return filter_; }
  double t() const { return t_; }
  const TruncationCertificate& certificate() const { return cert_; }
  std::size_t mode_count() const { return cert_.mode_count; }
  // F(t^2 lambda_l) for the retained modes.
  const Eigen::VectorXd& multipliers() const { return multipliers_; }

private:
  BasisPtr basis_;
  FilterFunction filter_;
  double t_;
  TruncationCertificate cert_;
  Eigen::VectorXd multipliers_;
};

// Upper bound on sup_x sum_{lambda_l <= mu} u_l(x)^2 for the closed-form manifolds.
double spectral_function_bound(const Manifold& m, double mu);
// sup_x |u_l(x)| for mode l.
double mode_sup(const SpectralBasis& basis, std::size_t l);

double kernel_eval(const KernelJob& job, const Point& x, const Point& y);

// K(x, y_j) on all quadrature nodes, plus a bound on the floating-point error
// of the fast synthesis.
struct KernelRow {
  Eigen::VectorXd values;
  double rounding_bound = 0.0;
};
KernelRow kernel_row(const KernelJob& job, const Point& x, const Quadrature& q);

// alpha in [1, inf]; alpha = 2 is cross-checked against the spectral value.
double kernel_row_norm(const KernelJob& job, const Point& x, double alpha, const Quadrature& q);

struct RowNorms {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  double l2_spectral = 0.0;
};
RowNorms kernel_row_norms(const KernelJob& job, const Point& x, const Quadrature& q);

double spectral_function(const SpectralBasis& basis, double t, const Point& x, bool exclude_constant = false);

struct NormdiagConstants {
  double C1 = 0.0, C2 = 0.0;
};
NormdiagConstants fit_normdiag_constants(const SpectralBasis& basis, const std::vector<double>& t_grid,
                                         const std::vector<Point>& x_sample);

double band_sum(const SpectralBasis& basis, double a, double b, double t, const Point& x);
// (C1 b^{s/2} - C2 a^{s/2}) t^{-s}
double band_sum_lower_bound(const NormdiagConstants& c, double a, double b, int s, double t);

struct ProfileBin {
  double r_lo = 0.0, r_hi = 0.0;
  double max_abs_kernel = 0.0;
  double max_scaled = 0.0; // |K| t^s (1 + d/t)^{s+1}
  std::size_t nodes = 0;
};
struct LocalizationProfile {
  std::vector<ProfileBin> bins;
  double C = 0.0;
};
// bin_edges ascending, starting at 0; nodes beyond the last edge go to the last bin.
// Values with |K| <= noise_floor count as zero (below the truncation tolerance).
LocalizationProfile localization_profile(const KernelJob& job, const Point& x, const std::vector<double>& bin_edges,
                                         const Quadrature& q, double noise_floor = 0.0);

struct ApplyResult {
  Eigen::VectorXd spectral;   // synthesis of F(t^2 lambda_l) f_l
  Eigen::VectorXd quadrature; // quadrature integral of K(x, y) f(y)
  double relative_gap = 0.0;
};
ApplyResult apply_operator(const KernelJob& job, const Eigen::Ref<const Eigen::VectorXd>& f_coeffs, const Quadrature& q);

struct PropagationReport {
  double t = 0.0;
  double measured_radius = 0.0;    // rho*
  double theoretical_radius = 0.0; // Lambda t
  double tolerance = 0.0;
  double margin = 0.1;
  double max_abs_kernel = 0.0;
  bool falsified = false;
  double C0() const { return measured_radius / t; }
};
// tolerance <= 0 selects 10 * (tail bound + rounding bound).
PropagationReport measure_propagation(const KernelJob& job, const std::vector<Point>& x_sample, double tolerance,
                                      const Quadrature& q, double margin = 0.1);

struct CosineWaveResult {
  double residual = 0.0; // max_l |F(t^2 lambda_l) h_l - h_l int hat(s) cos(s t sqrt(lambda_l)) ds| / max_l |F h_l|
  int panels = 0;        // Gauss-Legendre panels used in s
};
// adaptive doubles the panel count until the residual is stable to 1e-10.
CosineWaveResult cosine_wave_check(const SpectralBasis& basis, const FilterFunction& F, double t,
                                   const Eigen::Ref<const Eigen::VectorXd>& h_coeffs, int s_panels = 8,
                                   bool adaptive = true);

double integral_distance_bound(const Manifold& m, const Quadrature& q, const Point& x, double t, double N_exponent);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0, comp_ = 0.0;
};

} // namespace widthlab
