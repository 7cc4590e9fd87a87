#include "widthlab/scans.hpp"

#include <algorithm>
#include <cmath>

#include "widthlab/errors.hpp"
#include "widthlab/quadrature.hpp"

namespace widthlab {

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0)) fail(ErrorCode::InvalidArgument, "geometric grid needs 0 < lo <= hi and ratio > 1");
  std::vector<double> g;
  for (double v = lo; v <= hi * (1.0 + 1e-12); v *= ratio) g.push_back(v);
  return g;
}

WeylScan weyl_scan(const SpectralBasis& basis, const std::vector<double>& t_grid) {
  if (t_grid.empty()) fail(ErrorCode::InvalidArgument, "Weyl scan needs a nonempty t-grid");
  WeylScan scan;
  std::vector<double> xs, ys;
  for (double t : t_grid) {
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "Weyl scan needs t > 0");
    if (t > basis.lambda_max() * (1.0 + 1e-12)) fail(ErrorCode::BandInsufficient, "t lies beyond the materialized band");
    WeylRow row;
    row.t = t;
    row.count = weyl_count(basis, t);
    row.leading = weyl_leading(basis.manifold(), t);
    row.ratio = static_cast<double>(row.count) / row.leading;
    scan.rows.push_back(row);
    xs.push_back(t);
    ys.push_back(static_cast<double>(row.count));
  }
  if (xs.size() >= 2) scan.fit = fit_log_log(xs, ys);
  return scan;
}

KernelScan kernel_scan(const Manifold& m, const FilterFunction& F, const std::vector<double>& t_grid, const Point& x,
                       double propagation_tolerance, const std::vector<double>& extra_alphas) {
  if (t_grid.empty()) fail(ErrorCode::InvalidArgument, "kernel scan needs a nonempty t-grid");
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  if (!(t_min > 0.0) || *std::max_element(t_grid.begin(), t_grid.end()) > 1.0)
    fail(ErrorCode::InvalidArgument, "kernel scan needs t in (0, 1]");
  const double cut = F.lambda_tail() / (t_min * t_min);
  const BasisPtr basis = spectral_data(m, cut * 1.0001);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, cut));

  KernelScan scan;
  scan.extra_alphas = extra_alphas;
  std::vector<double> ts, l1, l2, li;
  std::vector<std::vector<double>> extra(extra_alphas.size());
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (double t : t_grid) {
    const KernelJob job(basis, F, t);
    KernelScanRow row;
    row.t = t;
    row.modes = job.mode_count();
    row.tail_bound = job.certificate().tail_bound;
    row.norms = kernel_row_norms(job, x, q);
    for (std::size_t a = 0; a < extra_alphas.size(); ++a) {
      row.extra_norms.push_back(kernel_row_norm(job, x, extra_alphas[a], q));
      extra[a].push_back(row.extra_norms.back());
    }
    row.propagation = measure_propagation(job, {x}, propagation_tolerance, q);
    std::vector<double> edges{0.0, 0.25 * t, 0.5 * t};
    for (double e = t; e < m.diameter(); e *= 2.0) edges.push_back(e);
    row.localization = localization_profile(job, x, edges, q, row.propagation.tolerance);
    if (row.propagation.falsified) ++scan.falsified;
    if (row.propagation.max_abs_kernel > row.propagation.tolerance) {
      cmin = std::min(cmin, row.localization.C);
      cmax = std::max(cmax, row.localization.C);
    } else {
      ++scan.unresolved;
    }
    ts.push_back(t);
    l1.push_back(row.norms.l1);
    l2.push_back(row.norms.l2);
    li.push_back(row.norms.linf);
    scan.rows.push_back(std::move(row));
  }
  if (ts.size() >= 2) {
    scan.fit_l1 = fit_log_log(ts, l1);
    scan.fit_l2 = fit_log_log(ts, l2);
    scan.fit_linf = fit_log_log(ts, li);
    for (const auto& e : extra) scan.extra_fits.push_back(fit_log_log(ts, e));
  }
  if (scan.unresolved < scan.rows.size())
    scan.localization_spread = cmin > 0.0 ? cmax / cmin : std::numeric_limits<double>::infinity();
  return scan;
}

BumpScan bump_scan(BumpFamily& family, const std::vector<int>& N_grid, std::uint64_t seed) {
  if (N_grid.empty()) fail(ErrorCode::InvalidArgument, "bump scan needs a nonempty N-grid");
  BumpScan scan;
  std::vector<double> ns, n1, n2, ni;
  for (std::size_t k = 0; k < N_grid.size(); ++k) {
    const BumpSystem& sys = family.system(N_grid[k], Rational(0));
    BumpScanRow row;
    row.N = sys.N();
    row.P = sys.size();
    row.t = sys.t();
    row.rho = sys.packing().rho;
    row.support_radius = sys.support().support_radius;
    row.inside = sys.support().inside;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      row.norm_l1 = std::max(row.norm_l1, sys.bump_norm(i, 1.0));
      row.norm_l2 = std::max(row.norm_l2, sys.bump_norm(i, 2.0));
      row.norm_linf = std::max(row.norm_linf, sys.bump_norm(i, std::numeric_limits<double>::infinity()));
    }
    CounterRng rng(seed, k);
    for (int s = 0; s < 4; ++s) {
      const Eigen::VectorXd a = rng.normal_vector(static_cast<Eigen::Index>(sys.size()));
      const Eigen::VectorXd back = sys.project(sys.synthesize(a));
      row.projection_error = std::max(row.projection_error, (back - a).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff());
    }
    ns.push_back(row.N);
    n1.push_back(row.norm_l1);
    n2.push_back(row.norm_l2);
    ni.push_back(row.norm_linf);
    scan.rows.push_back(row);
  }
  if (ns.size() >= 2) {
    scan.fit_l1 = fit_log_log(ns, n1);
    scan.fit_l2 = fit_log_log(ns, n2);
    scan.fit_linf = fit_log_log(ns, ni);
  }
  return scan;
}

LiftScan lift_scan(BumpFamily& family, const std::vector<int>& N_grid, const Rational& r, double p, std::uint64_t seed,
                   std::size_t samples) {
  if (N_grid.empty()) fail(ErrorCode::InvalidArgument, "lift scan needs a nonempty N-grid");
  LiftScan scan;
  scan.r = r;
  scan.p = p;
  std::vector<double> ns, vs;
  for (std::size_t k = 0; k < N_grid.size(); ++k) {
    const BumpSystem& sys = family.system(N_grid[k], r);
    LiftScanRow row;
    row.N = sys.N();
    row.norm = lift_operator_norm(sys, p, CounterRng(seed, k).next_u64(), samples);
    ns.push_back(row.N);
    vs.push_back(row.norm);
    scan.rows.push_back(row);
  }
  if (ns.size() >= 2) scan.fit = fit_log_log(ns, vs);
  return scan;
}

std::vector<EigenGroup> cluster_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& values, double rel_gap) {
  std::vector<EigenGroup> groups;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!groups.empty()) {
      EigenGroup& g = groups.back();
      const double scale = std::max(std::abs(g.hi), std::abs(v));
      if (std::abs(v - g.hi) <= rel_gap * scale) {
        g.mean = (g.mean * g.multiplicity + v) / (g.multiplicity + 1);
        g.hi = v;
        ++g.multiplicity;
        continue;
      }
    }
    groups.push_back({v, v, v, 1});
  }
  return groups;
}

} // namespace widthlab
