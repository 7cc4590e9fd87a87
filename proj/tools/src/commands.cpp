#include "widthlab/tools/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>

#include "widthlab/errors.hpp"
#include "widthlab/filter.hpp"
#include "widthlab/finite_widths.hpp"
#include "widthlab/kernel.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/packing.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/random.hpp"
#include "widthlab/rate_lab.hpp"
#include "widthlab/scans.hpp"
#include "widthlab/spectral_basis.hpp"
#include "widthlab/tools/io.hpp"

namespace widthlab::tools {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunInfo run_info(const std::string& command, const ExperimentConfig& c) { return {command, config_hash(c), c.seed}; }

FilterFunction config_filter(const FilterSpec& f) { return make_filter(f.Lambda, f.band_lo, f.band_hi, f.Q, f.tail_rel); }

Point config_point(const Manifold& m, const std::vector<double>& p) {
  auto coord = [&](std::size_t i) { return i < p.size() ? p[i] : 0.0; };
  switch (m.kind()) {
  case ManifoldKind::Circle: return circle_point(coord(0));
  case ManifoldKind::FlatTorus: return torus_point(coord(0), coord(1), coord(2));
  case ManifoldKind::Sphere: return sphere_point(coord(0), coord(1));
  case ManifoldKind::Mesh: return mesh_point(m, static_cast<int>(coord(0)));
  }
  return {};
}

// 1 - 1/alpha, the reciprocal of the conjugate exponent.
double inverse_conjugate(double alpha) { return std::isinf(alpha) ? 1.0 : 1.0 - 1.0 / alpha; }

std::string alpha_label(double alpha) { return std::isinf(alpha) ? "inf" : format_double(alpha); }

void add_weyl_tables(const std::string& prefix, const WeylScan& scan, int s, const std::string& dir, const RunInfo& run,
                     CommandResult& result) {
  CsvTable rows({"t", "count", "weyl_leading", "ratio"});
  for (const auto& r : scan.rows) rows.row().add(r.t).add(r.count).add(r.leading).add(r.ratio);
  result.files.push_back(write_table(dir, prefix + "weyl", rows, run));
  CsvTable fit({"slope", "expected_slope", "intercept", "r2", "points", "min_ratio", "max_ratio"});
  double lo = kInf, hi = 0.0;
  for (const auto& r : scan.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  fit.row().add(scan.fit.slope).add(s / 2.0).add(scan.fit.intercept).add(scan.fit.r2).add(scan.rows.size()).add(lo).add(hi);
  result.files.push_back(write_table(dir, prefix + "weyl_fit", fit, run));
}

// radius_floor: resolution limit below which measured radii are not meaningful (mesh surrogates).
void add_kernel_tables(const std::string& prefix, const KernelScan& scan, const ExperimentConfig& c, int s,
                       const std::string& dir, const RunInfo& run, CommandResult& result, double radius_floor = 0.0) {
  const double Lambda = c.filter.Lambda, margin = c.tolerances.propagation_margin;
  std::vector<double> alphas;
  std::vector<LineFit> fits;
  std::vector<std::function<double(const KernelScanRow&)>> value;
  std::size_t extra = 0;
  for (double a : c.alphas) {
    alphas.push_back(a);
    if (a == 1.0) {
      fits.push_back(scan.fit_l1);
      value.push_back([](const KernelScanRow& r) { return r.norms.l1; });
    } else if (a == 2.0) {
      fits.push_back(scan.fit_l2);
      value.push_back([](const KernelScanRow& r) { return r.norms.l2; });
    } else if (std::isinf(a)) {
      fits.push_back(scan.fit_linf);
      value.push_back([](const KernelScanRow& r) { return r.norms.linf; });
    } else {
      const std::size_t k = extra++;
      fits.push_back(scan.extra_fits.empty() ? LineFit{} : scan.extra_fits[k]);
      value.push_back([k](const KernelScanRow& r) { return r.extra_norms[k]; });
    }
  }
  CsvTable norms({"t", "alpha", "norm"});
  for (const auto& r : scan.rows)
    for (std::size_t a = 0; a < alphas.size(); ++a) norms.row().add(r.t).add(alpha_label(alphas[a])).add(value[a](r));
  result.files.push_back(write_table(dir, prefix + "kernel_norms", norms, run));

  CsvTable fit({"alpha", "slope", "expected_slope", "intercept", "r2"});
  for (std::size_t a = 0; a < alphas.size(); ++a)
    fit.row().add(alpha_label(alphas[a])).add(fits[a].slope).add(-s * inverse_conjugate(alphas[a])).add(fits[a].intercept).add(fits[a].r2);
  result.files.push_back(write_table(dir, prefix + "kernel_fits", fit, run));

  CsvTable prof({"t", "r_lo", "r_hi", "nodes", "max_abs_kernel", "max_scaled", "max_radius", "radius_bound"});
  CsvTable prop({"t", "modes", "tail_bound", "tolerance", "measured_radius", "theoretical_radius", "radius_bound",
                 "max_abs_kernel", "resolved", "localization_C", "falsified"});
  for (const auto& r : scan.rows) {
    const double bound = std::max((1.0 + margin) * Lambda * r.t, radius_floor);
    for (const auto& b : r.localization.bins)
      prof.row().add(r.t).add(b.r_lo).add(b.r_hi).add(b.nodes).add(b.max_abs_kernel).add(b.max_scaled)
          .add(r.propagation.measured_radius).add(bound);
    const bool bad = r.propagation.falsified || r.propagation.measured_radius > bound;
    prop.row().add(r.t).add(r.modes).add(r.tail_bound).add(r.propagation.tolerance).add(r.propagation.measured_radius)
        .add(r.propagation.theoretical_radius).add(bound).add(r.propagation.max_abs_kernel)
        .add(r.propagation.max_abs_kernel > r.propagation.tolerance).add(r.localization.C).add(bad);
    if (bad)
      result.falsified.push_back("propagation radius " + format_double(r.propagation.measured_radius) + " exceeds " +
                                 format_double(bound) + " at t=" + format_double(r.t));
  }
  result.files.push_back(write_table(dir, prefix + "profile", prof, run));
  result.files.push_back(write_table(dir, prefix + "propagation", prop, run));
  CsvTable loc({"localization_spread", "spread_limit", "falsified_events", "unresolved_rows"});
  loc.row().add(scan.localization_spread).add(c.tolerances.localization_spread).add(scan.falsified).add(scan.unresolved);
  result.files.push_back(write_table(dir, prefix + "localization", loc, run));
}

std::vector<int> packing_resolution(const Manifold& m, double rho) {
  switch (m.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus: {
    std::vector<int> res;
    for (double side : m.sides()) res.push_back(static_cast<int>(std::ceil(4.0 * side / rho * 1.01)) + 1);
    return res;
  }
  default: return resolution_for_band(m, 1.0);
  }
}

} // namespace

Manifold config_manifold(const ExperimentConfig& c) {
  if (c.manifold.kind == "mesh") {
    if (c.manifold.mesh_path.empty())
      throw ValidationError("manifold.mesh_path", "required for kind mesh (or use the mesh subcommand with --off)");
    auto sur = make_mesh_surrogate(read_off_file(c.manifold.mesh_path), c.manifold.mesh_modes, c.seed);
    return Manifold::mesh(sur);
  }
  return make_manifold(c.manifold.kind, c.manifold.scale, c.manifold.torus_dimension);
}

CommandResult cmd_spectra(const ExperimentConfig& c, const RunOptions& o) {
  const Manifold m = config_manifold(c);
  for (std::size_t i = 0; i < c.weyl_t_grid.size(); ++i)
    if (c.weyl_t_grid[i] > c.manifold.lambda_max)
      throw ValidationError("spectra.t_grid[" + std::to_string(i) + "]", "exceeds manifold.lambda_max");
  const RunInfo run = run_info("spectra", c);
  CommandResult result;
  const BasisPtr basis = spectral_data(m, c.manifold.lambda_max);

  CsvTable spec({"index", "eigenvalue", "group", "k0", "k1", "k2"});
  for (std::size_t l = 0; l < basis->size(); ++l) {
    const Mode& md = basis->mode(l);
    spec.row().add(l).add(md.eigenvalue).add(md.group).add(md.k[0]).add(md.k[1]).add(md.k[2]);
  }
  result.files.push_back(write_table(o.out_dir, "spectrum", spec, run));
  add_weyl_tables("", weyl_scan(*basis, c.weyl_t_grid), m.dimension(), o.out_dir, run, result);

  // Gram matrix of the leading modes under the band quadrature.
  const std::size_t K = std::min<std::size_t>(basis->size(), 256);
  const double lamK = K == 0 ? 0.0 : basis->eigenvalue(K - 1);
  const Quadrature q = build_quadrature(m, c.manifold.resolution.empty() ? resolution_for_band(m, lamK) : c.manifold.resolution);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Eigen::VectorXd u = basis->evaluate_all(q.node(j), K);
    G.noalias() += q.weights()[static_cast<Eigen::Index>(j)] * u * u.transpose();
  }
  const double dev = K == 0 ? 0.0 : (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  json rep = {{"manifold", m.name()},
              {"modes_checked", K},
              {"quadrature_nodes", q.size()},
              {"max_gram_deviation", dev},
              {"orthonormal", dev <= 1e-10}};
  result.files.push_back(write_report(o.out_dir, "orthonormality", rep, run));
  if (dev > 1e-10) result.falsified.push_back("orthonormality deviation " + format_double(dev));
  return result;
}

CommandResult cmd_kernel_scan(const ExperimentConfig& c, const RunOptions& o) {
  const Manifold m = config_manifold(c);
  const RunInfo run = run_info("kernel-scan", c);
  const FilterFunction F = config_filter(c.filter);
  std::vector<double> extra;
  for (double a : c.alphas)
    if (a != 1.0 && a != 2.0 && !std::isinf(a)) extra.push_back(a);
  const KernelScan scan = kernel_scan(m, F, c.t_grid, config_point(m, c.point), c.tolerances.propagation, extra);
  CommandResult result;
  add_kernel_tables("", scan, c, m.dimension(), o.out_dir, run, result);
  if (scan.localization_spread > c.tolerances.localization_spread)
    result.falsified.push_back("localization constant varies by " + format_double(scan.localization_spread));
  return result;
}

CommandResult cmd_packing(const ExperimentConfig& c, const RunOptions& o) {
  const Manifold m = config_manifold(c);
  const RunInfo run = run_info("packing", c);
  std::vector<BallPacking> packs(c.N_grid.size());
  parallel_for(c.N_grid.size(), o.workers, [&](std::size_t i) {
    const int N = c.N_grid[i];
    const double rho = packing_radius(m, N);
    const Quadrature q = build_quadrature(m, packing_resolution(m, rho));
    packs[i] = greedy_packing(m, N, default_candidates(q, rho));
  });
  CommandResult result;
  CsvTable summary({"N", "P", "rho", "min_center_distance", "covering_radius", "candidate_count", "candidate_spacing",
                    "disjoint", "covering"});
  CsvTable centers({"N", "index", "x0", "x1", "x2"});
  for (const auto& pk : packs) {
    const bool disjoint = pk.min_center_distance > 2.0 * pk.rho, covering = pk.covering_radius <= 3.0 * pk.rho;
    summary.row().add(pk.N).add(pk.size()).add(pk.rho).add(pk.min_center_distance).add(pk.covering_radius)
        .add(pk.candidate_count).add(pk.candidate_spacing).add(disjoint).add(covering);
    if (!disjoint || !covering) result.falsified.push_back("packing invariants fail at N=" + std::to_string(pk.N));
    for (std::size_t i = 0; i < pk.size(); ++i)
      centers.row().add(pk.N).add(i).add(pk.centers[i].x[0]).add(pk.centers[i].x[1]).add(pk.centers[i].x[2]);
  }
  result.files.push_back(write_table(o.out_dir, "packing", summary, run));
  result.files.push_back(write_table(o.out_dir, "centers", centers, run));
  return result;
}

CommandResult cmd_widths(const ExperimentConfig& c, const RunOptions& o) {
  const RunInfo run = run_info("widths", c);
  struct Task {
    FiniteBallProblem problem;
    std::optional<WidthEstimate> exact, numeric;
    std::string skipped;
  };
  std::vector<Task> tasks;
  for (const auto& wp : c.width_problems)
    for (int m : c.m_grid)
      for (int n = 0; n <= m; ++n) tasks.push_back({{m, n, wp.p, wp.q, wp.kind}, {}, {}, {}});

  parallel_for(tasks.size(), o.workers, [&](std::size_t i) {
    Task& t = tasks[i];
    t.exact = exact_width(t.problem);
    if (!c.validate_widths && t.exact) return;
    const std::uint64_t seed = CounterRng(c.seed, i).next_u64();
    try {
      if (t.problem.kind == WidthKind::Kolmogorov) t.numeric = kolmogorov_numeric(t.problem, c.optimizer, seed);
      else if (t.problem.kind == WidthKind::Gelfand) t.numeric = gelfand_numeric(t.problem, c.optimizer, seed);
      else t.skipped = "linear widths have no direct optimizer";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unsupported) throw;
      t.skipped = e.what();
    }
  });

  CommandResult result;
  CsvTable table({"m", "n", "p", "q", "kind", "value", "method", "direction"});
  CsvTable valid({"m", "n", "p", "q", "kind", "exact", "optimized", "abs_error", "tolerance", "reevaluated",
                  "reevaluation_gap", "restarts_run", "converged", "pass"});
  for (const auto& t : tasks) {
    const auto& pr = t.problem;
    auto head = [&](CsvTable& tb) -> CsvTable& {
      return tb.row().add(pr.m).add(pr.n).add(pr.p.str()).add(pr.q.str()).add(to_string(pr.kind));
    };
    const WidthEstimate* shown = t.exact ? &*t.exact : (t.numeric ? &*t.numeric : nullptr);
    if (shown) head(table).add(shown->value).add(to_string(shown->method)).add(to_string(shown->direction));
    if (t.exact && t.numeric) {
      const double err = std::abs(t.numeric->value - t.exact->value);
      const bool pass = err <= c.tolerances.optimizer_vs_exact;
      const OptimizerReport& rep = *t.numeric->report;
      head(valid).add(t.exact->value).add(t.numeric->value).add(err).add(c.tolerances.optimizer_vs_exact)
          .add(rep.reevaluated).add(rep.reevaluation_gap).add(rep.restarts_run).add(rep.converged).add(pass);
      if (!pass)
        result.falsified.push_back("optimizer misses the exact width at m=" + std::to_string(pr.m) +
                                   " n=" + std::to_string(pr.n) + " (" + pr.p.str() + ", " + pr.q.str() + ") " +
                                   to_string(pr.kind));
    }
  }
  result.files.push_back(write_table(o.out_dir, "widths", table, run));
  result.files.push_back(write_table(o.out_dir, "validation", valid, run));
  return result;
}

CommandResult cmd_rates(const ExperimentConfig& c, const RunOptions& o) {
  const Manifold m = config_manifold(c);
  if (m.kind() == ManifoldKind::Mesh) throw ValidationError("manifold.kind", "rates need a closed-form manifold");
  const RunInfo run = run_info("rates", c);
  std::vector<CaseRecord> records(c.specs.size() * c.kinds.size());
  parallel_for(c.specs.size(), o.workers, [&](std::size_t i) {
    BumpFamily family(m, c.bumps);
    CaseSuiteConfig sc;
    sc.specs = {c.specs[i]};
    sc.kinds = c.kinds;
    sc.n_grid = c.n_grid;
    sc.oracle_n_grid = c.oracle_n_grid;
    sc.nu = c.nu;
    sc.tolerance = c.tolerances.exponent;
    sc.oracle_tolerance = c.tolerances.oracle_exponent;
    sc.r2_retry = c.tolerances.r2_retry;
    sc.seed = CounterRng(c.seed, i).next_u64();
    CaseSuiteReport rep = run_case_suite(family, sc);
    for (std::size_t k = 0; k < rep.records.size(); ++k) records[i * c.kinds.size() + k] = std::move(rep.records[k]);
  });

  CommandResult result;
  CsvTable verdicts({"p", "q", "r", "s", "kind", "case", "lower_exponent", "upper_exponent", "fitted_exponent",
                     "intercept", "r2", "fit_lo", "fit_hi", "retried", "oracle_exponent", "within_bracket",
                     "matches_lower", "below_upper", "below_oracle", "verdict"});
  CsvTable series({"p", "q", "r", "s", "kind", "n", "N", "P", "value", "finite_width", "epsilon", "norm_lower",
                   "projection_bound", "reduction_factor", "oracle", "route"});
  for (const auto& rec : records) {
    const SobolevSpec& sp = rec.spec;
    auto head = [&](CsvTable& tb) -> CsvTable& {
      return tb.row().add(sp.p.str()).add(sp.q.str()).add(sp.r.str()).add(sp.s).add(to_string(rec.kind));
    };
    head(verdicts).add(rec.lower.theorem_case).add(rec.lower.value.str()).add(rec.upper.value.str())
        .add(rec.fit.exponent).add(rec.fit.intercept).add(rec.fit.r2).add(rec.fit.window.lo).add(rec.fit.window.hi)
        .add(rec.fit.retried).add(rec.oracle_fit ? format_double(rec.oracle_fit->exponent) : std::string())
        .add(rec.within_bracket).add(rec.matches_lower).add(rec.below_upper)
        .add(rec.below_oracle ? std::string(*rec.below_oracle ? "true" : "false") : std::string()).add(rec.verdict);
    for (const auto& pt : rec.series)
      head(series).add(pt.n).add(pt.N).add(pt.P).add(pt.value).add(pt.finite_width).add(pt.epsilon).add(pt.norm_lower)
          .add(pt.projection_bound).add(pt.reduction_factor).add(pt.oracle ? format_double(*pt.oracle) : std::string())
          .add(pt.route);
    if (rec.verdict != "PASS")
      result.falsified.push_back("rate verdict FAIL for " + sp.str() + " " + to_string(rec.kind));
  }
  result.files.push_back(write_table(o.out_dir, "verdicts", verdicts, run));
  result.files.push_back(write_table(o.out_dir, "series", series, run));
  return result;
}

CommandResult cmd_mesh(const ExperimentConfig& c, const RunOptions& o) {
  std::string path = o.off_path.empty() ? c.manifold.mesh_path : o.off_path;
  if (path.empty()) throw ValidationError("--off", "an OFF mesh file is required");
  ExperimentConfig cfg = c;
  cfg.manifold.kind = "mesh";
  cfg.manifold.mesh_path = path;
  const RunInfo run = run_info("mesh", cfg);
  TriangleMesh mesh = read_off_file(path);
  const int k = std::min<int>(cfg.manifold.mesh_modes, static_cast<int>(mesh.vertices.size()) / 4);
  const auto sur = make_mesh_surrogate(std::move(mesh), k, cfg.seed);
  const Manifold m = Manifold::mesh(sur);
  CommandResult result;

  CsvTable spec({"index", "eigenvalue", "residual"});
  for (Eigen::Index l = 0; l < sur->spectrum.eigenvalues.size(); ++l)
    spec.row().add(static_cast<std::int64_t>(l)).add(sur->spectrum.eigenvalues[l]).add(sur->spectrum.residuals[l]);
  result.files.push_back(write_table(o.out_dir, "mesh_spectrum", spec, run));

  CsvTable groups({"group", "mean", "lo", "hi", "multiplicity"});
  const auto gs = cluster_eigenvalues(sur->spectrum.eigenvalues, cfg.tolerances.eigen_gap);
  for (std::size_t g = 0; g < gs.size(); ++g)
    groups.row().add(g).add(gs[g].mean).add(gs[g].lo).add(gs[g].hi).add(gs[g].multiplicity);
  result.files.push_back(write_table(o.out_dir, "mesh_groups", groups, run));

  // Weyl counts only inside the resolved band and the computed spectrum.
  const double top = std::min(sur->resolved_lambda, sur->spectrum.eigenvalues[sur->spectrum.eigenvalues.size() - 1]);
  const BasisPtr basis = spectral_data(m, top);
  std::vector<double> ts;
  for (double t : cfg.weyl_t_grid)
    if (t <= top) ts.push_back(t);
  if (ts.size() < 2) ts = geometric_grid(std::max(1.0, top / 8.0), top, std::pow(2.0, 0.25));
  add_weyl_tables("mesh_", weyl_scan(*basis, ts), 2, o.out_dir, run, result);

  json summary = {{"vertices", sur->mesh.vertices.size()},
                  {"faces", sur->mesh.faces.size()},
                  {"area", sur->volume},
                  {"diameter", sur->diameter},
                  {"mean_edge", sur->mean_edge},
                  {"resolved_lambda", sur->resolved_lambda},
                  {"modes", k},
                  {"max_residual", sur->spectrum.residuals.maxCoeff()}};
  // The kernel scan needs the filter tail inside the computed spectrum.
  try {
    const KernelScan scan = kernel_scan(m, config_filter(cfg.filter), cfg.t_grid, config_point(m, cfg.point),
                                        cfg.tolerances.propagation);
    add_kernel_tables("mesh_", scan, cfg, 2, o.out_dir, run, result, 2.0 * sur->mean_edge);
    summary["kernel_scan"] = "done";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BandInsufficient && e.code() != ErrorCode::InvalidArgument) throw;
    summary["kernel_scan"] = std::string("skipped: ") + e.what();
  }
  result.files.push_back(write_report(o.out_dir, "mesh_summary", summary, run));
  return result;
}

} // namespace widthlab::tools
