#include "widthlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"

namespace widthlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Certified bound on sum_{lambda_l > cut} |F(t^2 lambda_l)| sup u_l^2 for the
// closed-form manifolds. With e(mu) = tail_envelope(t^2 mu) nonincreasing and
// N(mu) <= S(mu) the spectral function bound, Abel summation over geometric
// bins gives sum_k S(mu_{k+1}) (e(mu_k) - e(mu_{k+1})).
double closed_form_tail(const Manifold& m, const FilterFunction& F, double t, double cut) {
  double total = 0.0;
  double mu = std::max(cut, 1e-12);
  double e_prev = F.tail_envelope(t * t * mu);
  const double ratio = 1.02;
  for (int k = 0; k < 200000; ++k) {
    const double next = mu * ratio;
    const double e_next = F.tail_envelope(t * t * next);
    total += spectral_function_bound(m, next) * (e_prev - e_next);
    mu = next;
    e_prev = e_next;
    const double rest = e_next * spectral_function_bound(m, next);
    if (mu > 1e4 * cut && rest <= 1e-3 * total) {
      total += rest;
      break;
    }
    if (e_next == 0.0) break;
  }
  return total;
}

double mesh_tail(const SpectralBasis& basis, const FilterFunction& F, double t, std::size_t count) {
  CompensatedSum acc;
  for (std::size_t l = count; l < basis.size(); ++l) {
    const double sup = mode_sup(basis, l);
    acc.add(std::abs(F(t * t * basis.eigenvalue(l))) * sup * sup);
  }
  return acc.value();
}

Eigen::VectorXd row_coefficients(const KernelJob& job, const Point& x) {
  Eigen::VectorXd u = job.basis().evaluate_all(x, job.mode_count());
  return job.multipliers().cwiseProduct(u);
}

double max_mode_sup(const SpectralBasis& basis, std::size_t count) {
  double s = 0.0;
  if (basis.manifold().kind() == ManifoldKind::Mesh) {
    for (std::size_t l = 0; l < count; ++l) s = std::max(s, mode_sup(basis, l));
    return s;
  }
  return count == 0 ? 0.0 : mode_sup(basis, count - 1);
}

} // namespace

double spectral_function_bound(const Manifold& m, double mu) {
  mu = std::max(mu, 0.0);
  switch (m.kind()) {
  case ManifoldKind::Circle: {
    const double L = m.sides()[0];
    return (1.0 + 2.0 * std::sqrt(mu) * L / (2.0 * kPi)) / L;
  }
  case ManifoldKind::FlatTorus: {
    double n = 1.0;
    for (double L : m.sides()) n *= 2.0 * std::floor(std::sqrt(mu) * L / (2.0 * kPi)) + 1.0;
    return n / m.volume();
  }
  case ManifoldKind::Sphere: {
    const double r = std::sqrt(mu) + 1.0;
    return r * r / (4.0 * kPi);
  }
  case ManifoldKind::Mesh:
    fail(ErrorCode::Unsupported, "mesh surrogates have no closed-form spectral function bound");
  }
  return 0.0;
}

double mode_sup(const SpectralBasis& basis, std::size_t l) {
  const Mode& md = basis.mode(l);
  const Manifold& m = basis.manifold();
  switch (m.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus:
    return md.parity == ModeParity::Constant ? 1.0 / std::sqrt(m.volume()) : std::sqrt(2.0 / m.volume());
  case ManifoldKind::Sphere:
    // Addition theorem: sum over the degree of Y^2 is (2l+1)/(4 pi).
    return std::sqrt((2.0 * md.k[0] + 1.0) / (4.0 * kPi));
  case ManifoldKind::Mesh:
    return m.surrogate().spectrum.eigenvectors.col(static_cast<Eigen::Index>(l)).cwiseAbs().maxCoeff();
  }
  return 0.0;
}

KernelJob::KernelJob(BasisPtr basis, FilterFunction filter, double t)
    : basis_(std::move(basis)), filter_(std::move(filter)), t_(t) {
  require(basis_ != nullptr, "kernel job needs a spectral basis");
  if (!(t_ > 0.0) || t_ > 1.0 || !std::isfinite(t_)) fail(ErrorCode::InvalidArgument, "t must lie in (0, 1]");
  const double cut = filter_.lambda_tail() / (t_ * t_);
  if (cut > basis_->lambda_max() * (1.0 + 1e-12))
    fail(ErrorCode::BandInsufficient, "materialized spectrum ends at lambda " + std::to_string(basis_->lambda_max()) +
                                          " but the filter tail needs " + std::to_string(cut) +
                                          "; raise lambda_max or increase t");
  cert_.lambda_cut = cut;
  cert_.mode_count = basis_->count_le(cut);
  multipliers_.resize(static_cast<Eigen::Index>(cert_.mode_count));
  for (std::size_t l = 0; l < cert_.mode_count; ++l)
    multipliers_[static_cast<Eigen::Index>(l)] = filter_(t_ * t_ * basis_->eigenvalue(l));
  if (basis_->manifold().kind() == ManifoldKind::Mesh)
    cert_.tail_bound = mesh_tail(*basis_, filter_, t_, cert_.mode_count);
  else
    cert_.tail_bound = closed_form_tail(basis_->manifold(), filter_, t_, cut);
}

double kernel_eval(const KernelJob& job, const Point& x, const Point& y) {
  const std::size_t n = job.mode_count();
  Eigen::VectorXd ux = job.basis().evaluate_all(x, n);
  Eigen::VectorXd uy = job.basis().evaluate_all(y, n);
  CompensatedSum acc;
  for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(n); ++l) acc.add(job.multipliers()[l] * ux[l] * uy[l]);
  return acc.value();
}

KernelRow kernel_row(const KernelJob& job, const Point& x, const Quadrature& q) {
  require_exactness(q, job.basis(), job.mode_count(), "kernel_row");
  Eigen::VectorXd c = row_coefficients(job, x);
  KernelRow row;
  row.values = synthesize(job.basis(), q, c);
  const double levels = std::log2(static_cast<double>(std::max<std::size_t>(q.size(), 2))) + 1.0;
  row.rounding_bound = 10.0 * kEps * levels * c.cwiseAbs().sum() * max_mode_sup(job.basis(), job.mode_count());
  return row;
}

RowNorms kernel_row_norms(const KernelJob& job, const Point& x, const Quadrature& q) {
  KernelRow row = kernel_row(job, x, q);
  Eigen::VectorXd c = row_coefficients(job, x);
  RowNorms out;
  out.l1 = q.norm(row.values, 1.0);
  out.l2 = q.norm(row.values, 2.0);
  out.linf = q.norm(row.values, std::numeric_limits<double>::infinity());
  out.l2_spectral = c.norm();
  if (std::abs(out.l2 - out.l2_spectral) > 1e-6 * out.l2_spectral)
    fail(ErrorCode::BandInsufficient, "quadrature and spectral L2 row norms disagree; the quadrature is too coarse");
  return out;
}

double kernel_row_norm(const KernelJob& job, const Point& x, double alpha, const Quadrature& q) {
  if (!(alpha >= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in [1, inf]");
  KernelRow row = kernel_row(job, x, q);
  const double value = q.norm(row.values, alpha);
  if (alpha == 2.0) {
    const double spectral = row_coefficients(job, x).norm();
    if (std::abs(value - spectral) > 1e-6 * spectral)
      fail(ErrorCode::BandInsufficient, "quadrature and spectral L2 row norms disagree; the quadrature is too coarse");
  }
  return value;
}

double spectral_function(const SpectralBasis& basis, double t, const Point& x, bool exclude_constant) {
  if (t > basis.lambda_max() * (1.0 + 1e-12))
    fail(ErrorCode::BandInsufficient, "spectral_function: t exceeds the materialized cutoff");
  if (t < 0) return 0.0;
  const std::size_t n = basis.count_le(t);
  Eigen::VectorXd u = basis.evaluate_all(x, n);
  CompensatedSum acc;
  for (std::size_t l = exclude_constant ? 1 : 0; l < n; ++l) acc.add(u[static_cast<Eigen::Index>(l)] * u[static_cast<Eigen::Index>(l)]);
  return acc.value();
}

NormdiagConstants fit_normdiag_constants(const SpectralBasis& basis, const std::vector<double>& t_grid,
                                         const std::vector<Point>& x_sample) {
  if (t_grid.empty() || x_sample.empty()) fail(ErrorCode::InvalidArgument, "normdiag fit needs t values and points");
  const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*lo > 0.0) || *hi < 10.0 * *lo) fail(ErrorCode::InvalidArgument, "t grid must be positive and span a decade");
  const double half_s = 0.5 * basis.manifold().dimension();
  NormdiagConstants c{std::numeric_limits<double>::infinity(), 0.0};
  for (double t : t_grid) {
    for (const Point& x : x_sample) {
      const double v = spectral_function(basis, t, x, true) / std::pow(t, half_s);
      c.C1 = std::min(c.C1, v);
      c.C2 = std::max(c.C2, v);
    }
  }
  if (!(c.C1 > 0.0)) fail(ErrorCode::NumericalFailure, "measured C1 is not positive; start the t grid above lambda_1");
  return c;
}

double band_sum(const SpectralBasis& basis, double a, double b, double t, const Point& x) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "band_sum: t must be positive");
  if (a >= b) return 0.0;
  const double hi = b / (t * t);
  if (hi > basis.lambda_max() * (1.0 + 1e-12))
    fail(ErrorCode::BandInsufficient, "band_sum: b / t^2 exceeds the materialized spectrum");
  const std::size_t l0 = a > 0 ? basis.count_le(a / (t * t)) : 0;
  const std::size_t l1 = basis.count_le(hi);
  Eigen::VectorXd u = basis.evaluate_all(x, l1);
  CompensatedSum acc;
  for (std::size_t l = l0; l < l1; ++l) acc.add(u[static_cast<Eigen::Index>(l)] * u[static_cast<Eigen::Index>(l)]);
  return acc.value();
}

double band_sum_lower_bound(const NormdiagConstants& c, double a, double b, int s, double t) {
  return (c.C1 * std::pow(b, 0.5 * s) - c.C2 * std::pow(a, 0.5 * s)) * std::pow(t, -static_cast<double>(s));
}

LocalizationProfile localization_profile(const KernelJob& job, const Point& x, const std::vector<double>& bin_edges,
                                         const Quadrature& q, double noise_floor) {
  if (bin_edges.size() < 2 || bin_edges.front() != 0.0 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    fail(ErrorCode::InvalidArgument, "radius bins must ascend from 0");
  KernelRow row = kernel_row(job, x, q);
  Eigen::VectorXd d = q.distances_from(x);
  const double t = job.t();
  const int s = job.basis().manifold().dimension();
  LocalizationProfile prof;
  prof.bins.resize(bin_edges.size() - 1);
  for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b) {
    prof.bins[b].r_lo = bin_edges[b];
    prof.bins[b].r_hi = bin_edges[b + 1];
  }
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), d[j]);
    std::size_t b = static_cast<std::size_t>(std::distance(bin_edges.begin(), it));
    b = std::min(b == 0 ? 0 : b - 1, prof.bins.size() - 1);
    const double k = std::abs(row.values[j]) > noise_floor ? std::abs(row.values[j]) : 0.0;
    const double scaled = k * std::pow(t, s) * std::pow(1.0 + d[j] / t, s + 1);
    ProfileBin& bin = prof.bins[b];
    bin.max_abs_kernel = std::max(bin.max_abs_kernel, k);
    bin.max_scaled = std::max(bin.max_scaled, scaled);
    ++bin.nodes;
    prof.C = std::max(prof.C, scaled);
  }
  return prof;
}

ApplyResult apply_operator(const KernelJob& job, const Eigen::Ref<const Eigen::VectorXd>& f_coeffs, const Quadrature& q) {
  const SpectralBasis& basis = job.basis();
  const std::size_t nf = static_cast<std::size_t>(f_coeffs.size());
  if (nf > basis.size()) fail(ErrorCode::BandInsufficient, "coefficient band exceeds the materialized basis");
  const std::size_t n = job.mode_count();
  const std::size_t nk = std::min(nf, n);
  require_exactness(q, basis, std::max(nf, n), "apply_operator");

  ApplyResult out;
  Eigen::VectorXd g = job.multipliers().head(static_cast<Eigen::Index>(nk)).cwiseProduct(f_coeffs.head(static_cast<Eigen::Index>(nk)));
  out.spectral = synthesize(basis, q, g);

  Eigen::VectorXd f_vals = synthesize(basis, q, f_coeffs);
  Eigen::VectorXd proj = analyze(basis, q, q.weights().cwiseProduct(f_vals), n);
  out.quadrature = synthesize(basis, q, job.multipliers().cwiseProduct(proj));

  const double scale = std::max({out.spectral.cwiseAbs().maxCoeff(), out.quadrature.cwiseAbs().maxCoeff(),
                                 kEps * job.filter().sup_norm() * f_vals.cwiseAbs().maxCoeff(),
                                 std::numeric_limits<double>::min()});
  out.relative_gap = (out.spectral - out.quadrature).cwiseAbs().maxCoeff() / scale;
  if (out.relative_gap > 1e-8)
    fail(ErrorCode::NumericalFailure, "spectral and quadrature operator actions disagree beyond 1e-8");
  return out;
}

PropagationReport measure_propagation(const KernelJob& job, const std::vector<Point>& x_sample, double tolerance,
                                      const Quadrature& q, double margin) {
  if (x_sample.empty()) fail(ErrorCode::InvalidArgument, "propagation needs at least one point");
  if (!(margin >= 0.0)) fail(ErrorCode::InvalidArgument, "margin must be nonnegative");
  PropagationReport rep;
  rep.t = job.t();
  rep.margin = margin;
  rep.theoretical_radius = job.filter().Lambda() * job.t();
  std::vector<KernelRow> rows;
  rows.reserve(x_sample.size());
  double rounding = 0.0;
  for (const Point& x : x_sample) {
    rows.push_back(kernel_row(job, x, q));
    rounding = std::max(rounding, rows.back().rounding_bound);
  }
  const double floor = job.certificate().tail_bound + rounding;
  if (tolerance <= 0.0)
    tolerance = 10.0 * floor;
  else if (tolerance < job.certificate().tail_bound)
    fail(ErrorCode::InvalidArgument, "tolerance is below the truncation tail bound");
  rep.tolerance = tolerance;
  for (std::size_t i = 0; i < x_sample.size(); ++i) {
    Eigen::VectorXd d = q.distances_from(x_sample[i]);
    const Eigen::VectorXd& v = rows[i].values;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double a = std::abs(v[j]);
      rep.max_abs_kernel = std::max(rep.max_abs_kernel, a);
      if (a > tolerance) rep.measured_radius = std::max(rep.measured_radius, d[j]);
    }
  }
  rep.falsified = rep.measured_radius > (1.0 + margin) * rep.theoretical_radius;
  return rep;
}

CosineWaveResult cosine_wave_check(const SpectralBasis& basis, const FilterFunction& F, double t,
                                   const Eigen::Ref<const Eigen::VectorXd>& h_coeffs, int s_panels, bool adaptive) {
  if (static_cast<std::size_t>(h_coeffs.size()) > basis.size())
    fail(ErrorCode::BandInsufficient, "h is not band-limited to the materialized basis");
  if (s_panels < 1) fail(ErrorCode::InvalidArgument, "s_panels must be positive");
  const double Lambda = F.Lambda();
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);

  // Integral of hat(s) cos(s xi) over (-Lambda, Lambda) by composite Gauss-Legendre.
  auto rhs = [&](double xi, int panels) {
    CompensatedSum acc;
    const double h = 2.0 * Lambda / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = -Lambda + p * h;
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double s = a + 0.5 * h * (gx[k] + 1.0);
        acc.add(0.5 * h * gw[k] * F.hat(s) * std::cos(s * xi));
      }
    }
    return acc.value();
  };

  double xi_max = 0.0;
  for (Eigen::Index l = 0; l < h_coeffs.size(); ++l)
    if (h_coeffs[l] != 0.0) xi_max = std::max(xi_max, t * std::sqrt(basis.eigenvalue(static_cast<std::size_t>(l))));

  auto residual = [&](int panels) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index l = 0; l < h_coeffs.size(); ++l) {
      if (h_coeffs[l] == 0.0) continue;
      const double xi = t * std::sqrt(basis.eigenvalue(static_cast<std::size_t>(l)));
      const double lhs = F(xi * xi) * h_coeffs[l];
      num = std::max(num, std::abs(lhs - rhs(xi, panels) * h_coeffs[l]));
      den = std::max(den, std::abs(lhs));
    }
    return den > 0.0 ? num / den : num;
  };

  CosineWaveResult out;
  int panels = s_panels;
  if (adaptive) panels = std::max(panels, static_cast<int>(std::ceil(Lambda * xi_max / kPi)) + 1);
  out.residual = residual(panels);
  out.panels = panels;
  if (!adaptive) return out;
  for (int iter = 0; iter < 12; ++iter) {
    const double finer = residual(2 * panels);
    if (std::abs(finer - out.residual) <= 1e-10) {
      out.residual = finer;
      out.panels = 2 * panels;
      return out;
    }
    panels *= 2;
    out.residual = finer;
    out.panels = panels;
  }
  fail(ErrorCode::NumericalFailure, "s-quadrature in the cosine wave check did not converge");
}

double integral_distance_bound(const Manifold& m, const Quadrature& q, const Point& x, double t, double N_exponent) {
  const int s = m.dimension();
  if (!(N_exponent > s)) fail(ErrorCode::InvalidArgument, "N exponent must exceed the dimension");
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  Eigen::VectorXd d = q.distances_from(x);
  CompensatedSum acc;
  for (Eigen::Index j = 0; j < d.size(); ++j) acc.add(q.weights()[j] * std::pow(1.0 + d[j] / t, -N_exponent));
  return acc.value() / std::pow(t, s);
}

} // namespace widthlab
