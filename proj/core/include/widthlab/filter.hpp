#pragma once

#include <memory>
#include <vector>

#include "widthlab/rational.hpp"

namespace widthlab {

// Cosine transform psi_m(eta) = int_{-1}^{1} g_m(u) cos(u eta) du of
// g_m = (-1)^m d^{2m}/du^{2m} exp(-1/(1-u^2)), tabulated with derivatives on
// a uniform eta grid. By integration by parts psi_m(eta) = eta^{2m} psi_0(eta).
struct FilterTable {
  int order = 0;
  double spacing = 0.0;        // eta step
  double s_step = 0.0;         // trapezoid step in u used to build the table
  std::vector<double> value;   // psi_m(i * spacing)
  std::vector<double> slope;   // psi_m'(i * spacing)
  double peak = 0.0;           // max |psi_m| over the table
  double refinement_gap = 0.0; // max table change under the last refinement, relative to peak
  // ibp_bound[j] = ||g_m^{(2j)}||_1, so |psi_m(eta)| <= ibp_bound[j] / eta^{2j}.
  std::vector<double> ibp_bound;

  double eta_max() const { return spacing * static_cast<double>(value.size() - 1); }
  double interpolate(double eta) const;
  double envelope(double eta) const; // certified bound on |psi_m(eta)| beyond any point
};

std::shared_ptr<const FilterTable> filter_table(int order);

// g_m(u) for |u| < 1 and zero outside.
double window_derivative(int order, double u);

struct FilterEval {
  double value = 0.0;
  bool extrapolated = false; // beyond the tabulated range: |value| <= tau
};

// F(lambda) = lambda^frac * Lambda^{1-2m} psi_m(Lambda sqrt(lambda)), which for
// frac = 0 and m = Q equals lambda^Q psi(sqrt(lambda)) with
// psi(xi) = int_{-Lambda}^{Lambda} exp(-1/(1-(s/Lambda)^2)) cos(s xi) ds.
class FilterFunction {
public:
  double Lambda() const { return Lambda_; }
  int Q() const { return Q_; }
  double band_a() const { return a_; }
  double band_b() const { return b_; }
  int order() const { return order_; }
  double frac_power() const { return frac_; }
  // Total power of lambda in front of psi_0(sqrt(lambda)): Q plus any lift r/2.
  double total_power() const { return order_ + frac_; }
  double tau() const { return tau_; }
  double tail_rel() const { return tail_rel_; }
  double lambda_tail() const { return lambda_tail_; }
  double lambda_table_max() const;
  double sup_norm() const { return sup_norm_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const FilterTable& table() const { return *table_; }

  double operator()(double lambda) const { return eval(lambda).value; }
  FilterEval eval(double lambda) const;
  // psi(xi) with F(lambda) = psi(sqrt(lambda)); even in xi.
  double psi(double xi) const;
  // Certified bound on |F(mu)| for all mu >= lambda.
  double tail_envelope(double lambda) const;
  // Fourier profile: psi(xi) = int hat(s) cos(s xi) ds, hat supported in [-Lambda, Lambda].
  // Only defined when frac_power() == 0.
  double hat(double s) const;

  friend FilterFunction make_filter(double Lambda, double a, double b, int Q, double tail_rel);
  friend FilterFunction fractional_filter(const FilterFunction& F, const Rational& r);

private:
  void finalize(); // computes sup norm, tau, lambda_tail, band constants

  double Lambda_ = 1.0;
  double a_ = 1.0, b_ = 2.0;
  int Q_ = 0;
  int order_ = 0;
  double frac_ = 0.0;
  double tail_rel_ = 1e-12;
  double tau_ = 0.0;
  double lambda_tail_ = 0.0;
  double sup_norm_ = 0.0;
  double c1_ = 0.0, c2_ = 0.0;
  bool check_band_ = true;
  std::shared_ptr<const FilterTable> table_;
  std::shared_ptr<const std::vector<double>> suffix_max_;
};

FilterFunction make_filter(double Lambda, double a, double b, int Q, double tail_rel = 1e-12);
FilterFunction fractional_filter(const FilterFunction& F, const Rational& r);

// sum_{i+j<=J} sup_lambda |lambda^i F^{(j)}(lambda)|, derivatives by central
// differences with relative step `step`.
double sj_seminorm(const FilterFunction& F, int J, double step = 1e-2);

struct Band {
  double a = 1.0;
  double b = 2.0;
};

Band choose_band(double C1, double C2, int s, double safety);

// Default power lift: ceil(r/2) + s + 1.
int default_power_lift(const Rational& r, int s);

} // namespace widthlab
