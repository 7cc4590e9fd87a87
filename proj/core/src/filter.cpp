#include "widthlab/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <limits>

#include <fftw3.h>

#include "widthlab/errors.hpp"
#include "fftw_lock.hpp"

namespace widthlab {

namespace {

constexpr int kIbpTerms = 9; // bounds with up to 16 extra derivatives
constexpr double kTableDensity = 2048.0; // P * du, so the eta step is 2*pi/2048

// Taylor coefficients f_k / k!-scaled derivatives of exp(-1/(1-u^2)) at u.
// Returns d^k/du^k for k <= K.
std::vector<double> bump_derivatives(double u, int K) {
  std::vector<double> d(static_cast<std::size_t>(K + 1), 0.0);
  if (!(std::abs(u) < 1.0)) return d;
  const double h0 = -1.0 / (1.0 - u * u);
  const double f0 = std::exp(h0);
  if (f0 == 0.0) return d;
  std::vector<double> h(static_cast<std::size_t>(K + 1)), f(static_cast<std::size_t>(K + 1));
  const double im = 1.0 / (1.0 - u), ip = 1.0 / (1.0 + u);
  double pm = im, pp = ip;
  for (int j = 1; j <= K; ++j) {
    pm *= im;
    pp *= ip;
    h[static_cast<std::size_t>(j)] = -0.5 * (pm + ((j % 2 == 0) ? pp : -pp));
  }
  f[0] = f0;
  for (int k = 1; k <= K; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * h[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(k - j)];
    f[static_cast<std::size_t>(k)] = acc / k;
  }
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    d[static_cast<std::size_t>(k)] = fact * f[static_cast<std::size_t>(k)];
  }
  return d;
}

struct RawTable {
  std::vector<double> value, slope;
  std::vector<double> ibp;
};

RawTable build_level(int order, int inv_step) {
  const double du = 1.0 / inv_step;
  const std::size_t P = static_cast<std::size_t>(kTableDensity) * static_cast<std::size_t>(inv_step);
  const int J = inv_step; // samples u_j = j du, j in [-J, J]
  const int K = 2 * order + 2 * (kIbpTerms - 1);
  fftw_complex* buf = fftw_alloc_complex(P);
  if (!buf) fail(ErrorCode::ResourceBudget, "filter table allocation failed");
  auto* z = reinterpret_cast<std::complex<double>*>(buf);
  std::fill(z, z + P, std::complex<double>(0.0, 0.0));
  RawTable out;
  out.ibp.assign(kIbpTerms, 0.0);
  const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < J; ++j) {
    const double u = j * du;
    const std::vector<double> d = bump_derivatives(u, K);
    const double g = sgn * d[static_cast<std::size_t>(2 * order)];
    const double weight = j == 0 ? 1.0 : 2.0;
    for (int t = 0; t < kIbpTerms; ++t) out.ibp[static_cast<std::size_t>(t)] += weight * du * std::abs(d[static_cast<std::size_t>(2 * order + 2 * t)]);
    if (j == 0) {
      z[0] += g;
    } else {
      const double y = u * g;
      z[static_cast<std::size_t>(j)] += std::complex<double>(g + y, 0.0);
      z[P - static_cast<std::size_t>(j)] += std::complex<double>(g - y, 0.0);
    }
  }
  {
    std::mutex& planner = detail::fftw_planner_mutex();
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(planner);
      plan = fftw_plan_dft_1d(static_cast<int>(P), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner);
    fftw_destroy_plan(plan);
  }
  const std::size_t half = P / 2;
  out.value.resize(half + 1);
  out.slope.resize(half + 1);
  for (std::size_t i = 0; i <= half; ++i) {
    out.value[i] = du * z[i].real();
    out.slope[i] = du * z[i].imag();
  }
  fftw_free(buf);
  for (auto& b : out.ibp) b *= 1.01; // margin for the trapezoid estimate of an L1 norm
  return out;
}

std::shared_ptr<const FilterTable> build_table(int order) {
  // Higher orders decay more slowly relative to their peak, so they need a
  // longer eta range (pi / du).
  const int base = order <= 2 ? 512 : 1024;
  const RawTable coarse = build_level(order, base);
  RawTable fine = build_level(order, 2 * base);
  double peak = 0.0;
  for (double v : fine.value) peak = std::max(peak, std::abs(v));
  // Compare on the lower half of the coarse range, away from its aliasing band.
  double gap = 0.0;
  for (std::size_t i = 0; i < coarse.value.size() / 2; ++i)
    gap = std::max(gap, std::abs(coarse.value[i] - fine.value[i]));
  gap /= peak;
  if (gap > 1e-10)
    fail(ErrorCode::NumericalFailure, "filter table of order " + std::to_string(order) +
                                          " did not stabilize under refinement (relative gap " +
                                          std::to_string(gap) + ")");
  auto table = std::make_shared<FilterTable>();
  table->order = order;
  table->spacing = 2.0 * std::numbers::pi / kTableDensity;
  table->s_step = 1.0 / (2.0 * base);
  table->value = std::move(fine.value);
  table->slope = std::move(fine.slope);
  table->peak = peak;
  table->refinement_gap = gap;
  table->ibp_bound = std::move(fine.ibp);
  return table;
}

} // namespace

double window_derivative(int order, double u) {
  if (order < 0) fail(ErrorCode::InvalidArgument, "negative derivative order");
  const double d = bump_derivatives(u, 2 * order)[static_cast<std::size_t>(2 * order)];
  return (order % 2 == 0) ? d : -d;
}

double FilterTable::interpolate(double eta) const {
  eta = std::abs(eta);
  const double pos = eta / spacing;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= value.size()) return i + 1 == value.size() && pos == static_cast<double>(i) ? value[i] : 0.0;
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * value[i] + h10 * spacing * slope[i] + h01 * value[i + 1] + h11 * spacing * slope[i + 1];
}

double FilterTable::envelope(double eta) const {
  eta = std::abs(eta);
  double best = ibp_bound[0];
  double power = 1.0;
  for (std::size_t j = 1; j < ibp_bound.size(); ++j) {
    power *= eta * eta;
    best = std::min(best, ibp_bound[j] / power);
  }
  return best;
}

std::shared_ptr<const FilterTable> filter_table(int order) {
  if (order < 0 || order > 5) fail(ErrorCode::Unsupported, "filter derivative order must lie in [0, 5]; higher orders hit the rounding floor");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const FilterTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto table = build_table(order);
  cache.emplace(order, table);
  return table;
}

double FilterFunction::lambda_table_max() const {
  const double xi = table_->eta_max() / Lambda_;
  return xi * xi;
}

FilterEval FilterFunction::eval(double lambda) const {
  if (!(lambda >= 0.0)) fail(ErrorCode::InvalidArgument, "filter evaluated at negative lambda");
  const double eta = Lambda_ * std::sqrt(lambda);
  const double scale = std::pow(Lambda_, 1.0 - 2.0 * order_);
  if (eta > table_->eta_max()) return FilterEval{0.0, true};
  double v = scale * table_->interpolate(eta);
  if (frac_ != 0.0) v *= std::pow(lambda, frac_);
  return FilterEval{v, false};
}

double FilterFunction::psi(double xi) const {
  const double lam = xi * xi;
  return eval(lam).value;
}

double FilterFunction::tail_envelope(double lambda) const {
  const double lam_end = lambda_table_max();
  double bound = 0.0;
  if (lambda <= lam_end) {
    const double eta = Lambda_ * std::sqrt(std::max(lambda, 0.0));
    std::size_t i = static_cast<std::size_t>(eta / table_->spacing);
    if (i > 0) --i;
    bound = (*suffix_max_)[std::min(i, suffix_max_->size() - 1)];
  }
  // Beyond the table the integration-by-parts envelope applies; it is
  // decreasing so its value at the start of the region bounds the rest.
  const double lam_far = std::max(lambda, lam_end);
  const double eta_far = Lambda_ * std::sqrt(lam_far);
  double far = std::pow(Lambda_, 1.0 - 2.0 * order_) * table_->envelope(eta_far);
  if (frac_ != 0.0) far *= std::pow(lam_far, frac_);
  return std::max(bound, far);
}

double FilterFunction::hat(double s) const {
  if (frac_ != 0.0) fail(ErrorCode::Unsupported, "fractional lifts have no compactly supported Fourier profile");
  if (std::abs(s) >= Lambda_) return 0.0;
  return std::pow(Lambda_, -2.0 * order_) * window_derivative(order_, s / Lambda_);
}

void FilterFunction::finalize() {
  const double scale = std::pow(Lambda_, 1.0 - 2.0 * order_);
  const auto& v = table_->value;
  auto F_at = [&](std::size_t i) {
    const double xi = i * table_->spacing / Lambda_;
    double f = scale * v[i];
    if (frac_ != 0.0) f *= std::pow(xi * xi, frac_);
    return f;
  };
  sup_norm_ = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sup_norm_ = std::max(sup_norm_, std::abs(F_at(i)));
  {
    // Suffix maxima of |F| with slack for values between samples.
    auto suffix = std::make_shared<std::vector<double>>(v.size(), 0.0);
    double run = 0.0;
    for (std::size_t k = v.size(); k-- > 0;) {
      const double et = (k + 1) * table_->spacing / Lambda_;
      double w = scale * (std::abs(v[k]) + table_->spacing * std::abs(table_->slope[k]));
      if (frac_ != 0.0) w *= std::pow(et * et, frac_);
      run = std::max(run, w);
      (*suffix)[k] = run;
    }
    suffix_max_ = std::move(suffix);
  }
  if (!(sup_norm_ > 0.0)) fail(ErrorCode::NumericalFailure, "filter vanishes identically");
  tau_ = tail_rel_ * sup_norm_;
  std::size_t last = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(F_at(i)) > tau_) last = i;
  if (last + 2 >= v.size()) fail(ErrorCode::NumericalFailure, "filter tail does not fall below tau within the table");
  // One extra sample of slack covers interpolation between samples.
  const double xi_tail = (last + 2) * table_->spacing / Lambda_;
  lambda_tail_ = xi_tail * xi_tail;
  const double far = tail_envelope(lambda_table_max());
  if (far > tau_)
    fail(ErrorCode::NumericalFailure, "filter envelope beyond the table exceeds tau; increase the tail threshold");

  if (check_band_) {
    const int samples = 4097;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int sign = 0;
    bool sign_change = false;
    for (int k = 0; k < samples; ++k) {
      const double lam = a_ + (b_ - a_) * k / (samples - 1.0);
      const double f = eval(lam).value;
      const int sg = f > 0 ? 1 : (f < 0 ? -1 : 0);
      if (k == 0) sign = sg;
      if (sg != sign || sg == 0) sign_change = true;
      lo = std::min(lo, std::abs(f));
      hi = std::max(hi, std::abs(f));
    }
    if (sign_change || !(lo > 0.0))
      fail(ErrorCode::InvalidArgument, "band positivity failure: F vanishes on [a,b]; shrink Lambda or the band");
    c1_ = lo;
    c2_ = hi;
  }
}

FilterFunction make_filter(double Lambda, double a, double b, int Q, double tail_rel) {
  if (!(Lambda > 0.0)) fail(ErrorCode::InvalidArgument, "Lambda must be positive");
  if (!(a > 0.0 && a < b)) fail(ErrorCode::InvalidArgument, "band requires 0 < a < b");
  if (Q < 0) fail(ErrorCode::InvalidArgument, "power lift Q must be nonnegative");
  if (!(tail_rel > 0.0 && tail_rel < 1.0)) fail(ErrorCode::InvalidArgument, "tail threshold must lie in (0,1)");
  FilterFunction F;
  F.Lambda_ = Lambda;
  F.a_ = a;
  F.b_ = b;
  F.Q_ = Q;
  F.order_ = Q;
  F.frac_ = 0.0;
  F.tail_rel_ = tail_rel;
  F.table_ = filter_table(Q);
  F.finalize();
  return F;
}

FilterFunction fractional_filter(const FilterFunction& F, const Rational& r) {
  if (r < Rational(0)) fail(ErrorCode::InvalidArgument, "lift exponent r must be nonnegative");
  const Rational half = r / Rational(2);
  const std::int64_t whole = half.num() / half.den();
  double frac = F.frac_ + (half - Rational(whole)).to_double();
  int order = F.order_ + static_cast<int>(whole);
  if (frac >= 1.0) {
    frac -= 1.0;
    ++order;
  }
  FilterFunction G = F;
  G.order_ = order;
  G.frac_ = frac;
  G.table_ = filter_table(order);
  // The lift is bounded below on the band whenever F is; no separate band test.
  G.check_band_ = false;
  G.finalize();
  G.c1_ = F.c1_ * std::pow(F.a_, r.to_double() / 2.0);
  G.c2_ = F.c2_ * std::pow(F.b_, r.to_double() / 2.0);
  return G;
}

namespace {

double sj_pass(const FilterFunction& F, int J, double step) {
  const double xi_end = std::sqrt(F.lambda_tail());
  const int samples = 6000;
  std::vector<double> sup(static_cast<std::size_t>((J + 1) * (J + 1)), 0.0);
  auto binom = [](int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
  };
  for (int k = 0; k <= samples; ++k) {
    const double xi = xi_end * k / samples;
    const double lam = xi * xi;
    const double h = step * (1.0 + 2.0 * xi);
    for (int j = 0; j <= J; ++j) {
      // Central stencil where it fits in lambda >= 0, forward otherwise.
      const double offset = lam >= 0.5 * j * h ? 0.5 * j : 0.0;
      double d = 0.0;
      for (int i = 0; i <= j; ++i) {
        const double x = lam + (i - offset) * h;
        d += ((j - i) % 2 == 0 ? 1.0 : -1.0) * binom(j, i) * F(x);
      }
      d /= std::pow(h, j);
      if (!std::isfinite(d)) fail(ErrorCode::NumericalFailure, "derivative blow-up in sj_seminorm");
      double lp = 1.0;
      for (int i = 0; i + j <= J; ++i) {
        auto& slot = sup[static_cast<std::size_t>(i * (J + 1) + j)];
        slot = std::max(slot, lp * std::abs(d));
        lp *= lam;
      }
    }
  }
  double total = 0.0;
  for (double v : sup) total += v;
  return total;
}

} // namespace

double sj_seminorm(const FilterFunction& F, int J, double step) {
  if (J < 0 || J > 6) fail(ErrorCode::InvalidArgument, "sj_seminorm supports 0 <= J <= 6");
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "sj_seminorm step must be positive");
  if (J == 0) return F.sup_norm();
  const double coarse = sj_pass(F, J, step);
  const double fine = sj_pass(F, J, step / 2);
  // Derivatives that keep growing as the step shrinks are singular (for
  // instance a fractional power at lambda = 0).
  if (fine > 1.05 * coarse)
    fail(ErrorCode::NumericalFailure, "derivative blow-up in sj_seminorm: value grows under step refinement");
  return fine;
}

Band choose_band(double C1, double C2, int s, double safety) {
  if (!(C1 > 0.0)) fail(ErrorCode::InvalidArgument, "choose_band requires C1 > 0");
  if (C2 < C1) fail(ErrorCode::InvalidArgument, "choose_band requires C2 >= C1");
  if (!(safety > 1.0)) fail(ErrorCode::InvalidArgument, "choose_band requires safety > 1");
  if (s < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
  return Band{1.0, safety * std::pow(C2 / C1, 2.0 / s)};
}

int default_power_lift(const Rational& r, int s) {
  const Rational half = r / Rational(2);
  const std::int64_t ceil_half = (half.num() + half.den() - 1) / half.den();
  return static_cast<int>(ceil_half) + s + 1;
}

} // namespace widthlab
