// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "widthlab/finite_widths.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/rate_lab.hpp"
#include "widthlab/scans.hpp"
#include "widthlab/tools/commands.hpp"
#include "widthlab/tools/config.hpp"

using namespace widthlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

Outcome criterion_1() {
  const Clock clock;
  struct Case {
    const char* p;
    const char* q;
    WidthKind kind;
  };
  const Case cases[] = {{"1", "2", WidthKind::Kolmogorov},
                        {"2", "inf", WidthKind::Gelfand},
                        {"inf", "1", WidthKind::Kolmogorov},
                        {"inf", "1", WidthKind::Gelfand}};
  double worst = 0.0;
  int evaluated = 0;
  for (const Case& c : cases)
    for (int m : {4, 6, 8})
      for (int n = 0; n <= m; ++n) {
        const FiniteBallProblem pr{m, n, LpIndex::parse(c.p), LpIndex::parse(c.q), c.kind};
        // Independent closed forms: sqrt(1 - n/m) for the Hilbert-space cases, m - n for (inf, 1).
        const double exact = std::string(c.p) == "inf" ? m - n : std::sqrt(1.0 - static_cast<double>(n) / m);
        const WidthEstimate e = c.kind == WidthKind::Kolmogorov ? kolmogorov_numeric(pr, {}, 7)
                                                                : gelfand_numeric(pr, {}, 7);
        worst = std::max(worst, std::abs(e.value - exact));
        ++evaluated;
      }
  const double secs = clock.seconds();
  return {worst <= 1e-3 && secs < 120.0,
          std::to_string(evaluated) + " problems, worst error " + fmt("%.2e", worst) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome criterion_2() {
  bool pass = true;
  std::string detail;
  for (const char* kind : {"circle", "torus", "sphere"}) {
    const Manifold m = make_manifold(kind, {});
    const BasisPtr basis = spectral_data(m, 4000.0);
    const WeylScan scan = weyl_scan(*basis, geometric_grid(400.0, 4000.0, 1.25));
    double lo = 1e300, hi = 0.0;
    for (const auto& r : scan.rows) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    const bool ok = lo >= 0.9 && hi <= 1.1 && near(scan.fit.slope, m.dimension() / 2.0, 0.05);
    pass = pass && ok;
    detail += std::string(kind) + " ratio [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "] slope " +
              fmt("%.4f", scan.fit.slope) + "; ";
  }
  return {pass, detail};
}

struct KernelCase {
  const char* name;
  Manifold manifold;
  FilterFunction filter;
  std::vector<double> t_grid;
  Point x;
};

// Circle: Lambda 1, tail 1e-12 over 2^-9..2^-3. Torus: Lambda 2, tail 1e-3 over 2^-6..2^-2.
std::vector<KernelCase> norm_cases() {
  return {{"circle", make_manifold("circle", {}), make_filter(1.0, 1.0, 2.0, 0, 1e-12),
           geometric_grid(1.0 / 512, 1.0 / 8, 2.0), circle_point(0.3)},
          {"torus", make_manifold("torus", {}), make_filter(2.0, 1.0, 2.0, 0, 1e-3),
           geometric_grid(1.0 / 64, 1.0 / 4, 2.0), torus_point(0.3, 0.1)}};
}

// Scans whose truncation tolerance resolves the kernel: the circle grid above and
// the torus at tail 1e-6 over 2^-4..2^-2.
std::vector<KernelCase> resolved_cases() {
  return {{"circle", make_manifold("circle", {}), make_filter(1.0, 1.0, 2.0, 0, 1e-12),
           geometric_grid(1.0 / 512, 1.0 / 8, 2.0), circle_point(0.3)},
          {"torus", make_manifold("torus", {}), make_filter(2.0, 1.0, 2.0, 0, 1e-6),
           geometric_grid(1.0 / 16, 1.0 / 4, 2.0), torus_point(0.3, 0.1)}};
}

Outcome criterion_3() {
  const Clock clock;
  bool pass = true;
  std::string detail;
  for (const KernelCase& c : norm_cases()) {
    const KernelScan scan = kernel_scan(c.manifold, c.filter, c.t_grid, c.x);
    const double s = c.manifold.dimension();
    // -s / alpha' with 1/alpha' = 1 - 1/alpha.
    const bool ok = near(scan.fit_l1.slope, 0.0, 0.1) && near(scan.fit_l2.slope, -s / 2.0, 0.1) &&
                    near(scan.fit_linf.slope, -s, 0.1);
    pass = pass && ok;
    detail += std::string(c.name) + " slopes " + fmt("%.4f", scan.fit_l1.slope) + "/" + fmt("%.4f", scan.fit_l2.slope) +
              "/" + fmt("%.4f", scan.fit_linf.slope) + "; ";
  }
  const double secs = clock.seconds();
  return {pass && secs < 300.0, detail + fmt("%.1f", secs) + " s"};
}

Outcome criterion_4() {
  bool pass = true;
  std::string detail;
  for (const KernelCase& c : resolved_cases()) {
    const KernelScan scan = kernel_scan(c.manifold, c.filter, c.t_grid, c.x);
    double worst = 0.0;
    bool ok = scan.falsified == 0 && scan.unresolved == 0;
    for (const auto& r : scan.rows) {
      const double ratio = r.propagation.measured_radius / (c.filter.Lambda() * r.t);
      worst = std::max(worst, ratio);
      ok = ok && ratio <= 1.1;
    }
    pass = pass && ok;
    detail += std::string(c.name) + " max radius/(Lambda t) " + fmt("%.4f", worst) + ", falsified " +
              std::to_string(scan.falsified) + "; ";
  }
  return {pass, detail};
}

Outcome criterion_5() {
  bool pass = true;
  std::string detail;
  for (const KernelCase& c : resolved_cases()) {
    const KernelScan scan = kernel_scan(c.manifold, c.filter, c.t_grid, c.x);
    const bool ok = scan.unresolved == 0 && scan.localization_spread <= 2.0;
    pass = pass && ok;
    double lo = 1e300, hi = 0.0;
    for (const auto& r : scan.rows) {
      lo = std::min(lo, r.localization.C);
      hi = std::max(hi, r.localization.C);
    }
    detail += std::string(c.name) + " C in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], spread " +
              fmt("%.6f", scan.localization_spread) + "; ";
  }
  return {pass, detail};
}

Outcome criterion_6() {
  BumpFamily family(make_manifold("circle", {}));
  const BumpScan scan = bump_scan(family, {8, 16, 32, 64, 128}, 1);
  bool inside = true;
  double proj = 0.0;
  for (const auto& r : scan.rows) {
    inside = inside && r.inside && r.support_radius <= r.rho;
    proj = std::max(proj, r.projection_error);
  }
  const bool slopes = near(scan.fit_l1.slope, -1.0, 0.1) && near(scan.fit_l2.slope, -0.5, 0.1) &&
                      near(scan.fit_linf.slope, 0.0, 0.1);
  return {slopes && inside && proj <= 1e-10,
          "slopes " + fmt("%.4f", scan.fit_l1.slope) + "/" + fmt("%.4f", scan.fit_l2.slope) + "/" +
              fmt("%.4f", scan.fit_linf.slope) + ", supports inside " + (inside ? "yes" : "no") +
              ", projection error " + fmt("%.2e", proj)};
}

Outcome criterion_7() {
  BumpFamily family(make_manifold("circle", {}));
  bool pass = true;
  std::string detail;
  const std::pair<int, double> cases[] = {{1, 2.0}, {2, 1.0}, {2, INFINITY}};
  for (const auto& [r, p] : cases) {
    const LiftScan scan = lift_scan(family, {8, 16, 32, 64, 128}, Rational(r), p, 1);
    const double expected = r - 1.0 / p; // r/s - 1/p with s = 1
    pass = pass && near(scan.fit.slope, expected, 0.1);
    detail += "(r=" + std::to_string(r) + ", p=" + fmt("%g", p) + ") slope " + fmt("%.4f", scan.fit.slope) + "; ";
  }
  return {pass, detail};
}

Outcome criterion_8() {
  const Manifold m = make_manifold("circle", {});
  const BasisPtr basis = spectral_data(m, 40000.0);
  std::vector<RatePoint> pts;
  for (int n : {8, 16, 32, 64, 128}) {
    // Circle eigenvalues ordered 0, 1, 1, 4, 4, ...: lambda_n = ceil(n/2)^2.
    const double k = std::ceil(n / 2.0);
    const double independent = 1.0 / (1.0 + k * k);
    const double w = exact_L2_sobolev_width(*basis, Rational(2), n);
    if (std::abs(w - independent) > 1e-14) return {false, "exact width disagrees with (1 + lambda_n)^-1 at n=" + std::to_string(n)};
    pts.push_back({static_cast<double>(n), w});
  }
  const RateFit fit = fit_rate(pts);
  bool beaten = false;
  for (int n = 0; n <= 6; ++n) beaten = beaten || brute_force_L2_width(*basis, Rational(2), n, 12, 100, 7).beaten;
  return {near(fit.exponent, -2.0, 0.05) && !beaten,
          "exponent " + fmt("%.4f", fit.exponent) + ", brute force beaten " + (beaten ? "yes" : "no")};
}

Outcome criterion_9() {
  const Clock clock;
  BumpFamily family(make_manifold("circle", {}));
  CaseSuiteConfig cfg;
  const Rational r(2);
  for (const char* pq : {"inf,1", "1,2", "2,inf"}) {
    const std::string s(pq);
    const auto comma = s.find(',');
    cfg.specs.push_back(SobolevSpec::make(LpIndex::parse(s.substr(0, comma)), LpIndex::parse(s.substr(comma + 1)), r, 1));
  }
  const CaseSuiteReport rep = run_case_suite(family, cfg);
  bool pass = rep.all_pass;
  std::string detail;
  for (const auto& rec : rep.records) {
    const bool ok = std::abs(rec.fit.exponent - rec.lower.value.to_double()) <= cfg.tolerance &&
                    rec.fit.exponent <= rec.upper.value.to_double() + cfg.tolerance;
    pass = pass && ok;
    detail += rec.spec.str() + " " + to_string(rec.kind) + " " + fmt("%.3f", rec.fit.exponent) + " vs " +
              rec.lower.value.str() + "; ";
  }
  const double secs = clock.seconds();
  return {pass && secs < 600.0, detail + fmt("%.1f", secs) + " s"};
}

Outcome criterion_10() {
  const auto sur = make_mesh_surrogate(icosphere(3), 20, 1);
  const auto groups = cluster_eigenvalues(sur->spectrum.eigenvalues, 0.05);
  if (groups.size() < 4) return {false, "fewer than four eigenvalue groups"};
  bool pass = groups[0].multiplicity == 1 && std::abs(groups[0].mean) < 1e-8;
  std::string detail;
  for (int l = 1; l <= 3; ++l) {
    const double target = l * (l + 1.0);
    const auto& g = groups[static_cast<std::size_t>(l)];
    const bool ok = std::abs(g.mean - target) <= 0.05 * target && g.multiplicity == 2 * l + 1;
    pass = pass && ok;
    detail += "l=" + std::to_string(l) + " mean " + fmt("%.4f", g.mean) + " x" + std::to_string(g.multiplicity) + "; ";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_11() {
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "seed": 11,
    "manifold": {"kind": "circle"},
    "rates": {"specs": [{"p": "inf", "q": "1", "r": "2"}, {"p": "2", "q": "2", "r": "1"}],
              "n_grid": [8, 16, 32, 64], "oracle_n_grid": [64, 128, 256, 512, 1024]}
  })");
  const tools::ExperimentConfig cfg = tools::parse_config(doc);
  const fs::path root = fs::temp_directory_path() / ("widthlab_determinism_" + tools::config_hash(cfg));
  fs::remove_all(root);
  tools::RunOptions a{(root / "a").string(), 1, ""};
  tools::RunOptions b{(root / "b").string(), 2, ""};
  const auto ra = tools::cmd_rates(cfg, a);
  const auto rb = tools::cmd_rates(cfg, b);
  std::size_t compared = 0;
  bool same = ra.files.size() == rb.files.size() && !ra.files.empty();
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
    ++compared;
  }
  fs::remove_all(root);
  return {same, std::to_string(compared) + " files compared across 1 and 2 workers, config " + tools::config_hash(cfg)};
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3,  criterion_4,
                                                       criterion_5, criterion_6, criterion_7,  criterion_8,
                                                       criterion_9, criterion_10, criterion_11};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
