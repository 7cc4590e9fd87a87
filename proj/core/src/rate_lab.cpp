#include "widthlab/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "widthlab/errors.hpp"
#include "widthlab/packing.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/random.hpp"
#include "widthlab/stats.hpp"
#include "widthlab/width_optimizer.hpp"

namespace widthlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const Rational kHalf(1, 2);

double index_value(const LpIndex& p) { return p.value(); }

// Case formulas of the lower bounds; `theorem_case` selects the range.
TheoreticalExponent case_exponent(const SobolevSpec& sp, WidthKind kind, int c) {
  const Rational base = -(sp.r / Rational(sp.s));
  const Rational ip = sp.p.reciprocal(), iq = sp.q.reciprocal();
  TheoreticalExponent e;
  e.theorem_case = c;
  switch (c) {
  case 1:
    e.value = base;
    break;
  case 2:
    e.value = kind == WidthKind::Gelfand ? base : base + ip - iq;
    break;
  case 3:
    e.value = kind == WidthKind::Kolmogorov ? base : base + ip - iq;
    break;
  case 4: {
    const Rational dn = base + ip - kHalf, gn = base + kHalf - iq;
    if (kind == WidthKind::Kolmogorov) {
      e.value = dn;
    } else if (kind == WidthKind::Gelfand) {
      e.value = gn;
    } else {
      e.is_max = true;
      e.first = dn;
      e.second = gn;
      e.value = std::max(dn, gn);
    }
    break;
  }
  default:
    fail(ErrorCode::InvalidArgument, "case must lie in 1..4");
  }
  return e;
}

bool in_case(const SobolevSpec& sp, int c) {
  const Rational ip = sp.p.reciprocal(), iq = sp.q.reciprocal();
  // Ordered by index value: p <= q  <=>  1/p >= 1/q.
  switch (c) {
  case 1: return iq >= ip;
  case 2: return ip >= iq && iq >= kHalf;
  case 3: return kHalf >= ip && ip >= iq;
  case 4: return ip >= kHalf && kHalf >= iq;
  }
  return false;
}

double vol_pow(const Manifold& m, double e) { return std::pow(m.volume(), e); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return CounterRng(seed, a).substream(b).next_u64();
}

} // namespace

bool SobolevSpec::admissible(const LpIndex& p, const LpIndex& q, const Rational& r, int s) {
  if (s < 1) return false;
  return r / Rational(s) > positive_part(p.reciprocal() - q.reciprocal());
}

SobolevSpec SobolevSpec::make(const LpIndex& p, const LpIndex& q, const Rational& r, int s) {
  if (s < 1) fail(ErrorCode::InvalidArgument, "dimension s must be >= 1");
  if (!admissible(p, q, r, s))
    fail(ErrorCode::InvalidArgument, "inadmissible Sobolev spec: need r/s > (1/p - 1/q)_+, got p=" + p.str() +
                                         " q=" + q.str() + " r=" + r.str() + " s=" + std::to_string(s));
  SobolevSpec sp;
  sp.p = p;
  sp.q = q;
  sp.r = r;
  sp.s = s;
  return sp;
}

std::string SobolevSpec::str() const {
  return "p=" + p.str() + " q=" + q.str() + " r=" + r.str() + " s=" + std::to_string(s);
}

int main_theorem_case(const SobolevSpec& sp) {
  for (int c = 1; c <= 4; ++c)
    if (in_case(sp, c)) return c;
  fail(ErrorCode::InvalidArgument, "no case covers " + sp.str());
}

TheoreticalExponent theoretical_exponent(const SobolevSpec& sp, WidthKind kind, BoundSide side) {
  if (!SobolevSpec::admissible(sp.p, sp.q, sp.r, sp.s)) fail(ErrorCode::InvalidArgument, "inadmissible " + sp.str());
  if (side == BoundSide::Upper) {
    TheoreticalExponent e;
    e.value = -(sp.r / Rational(sp.s)) + positive_part(sp.p.reciprocal() - sp.q.reciprocal());
    return e;
  }
  const int c = main_theorem_case(sp);
  TheoreticalExponent e = case_exponent(sp, kind, c);
  // Boundary points covered by several ranges must get the same exponent.
  for (int other = c + 1; other <= 4; ++other) {
    if (!in_case(sp, other)) continue;
    if (!(case_exponent(sp, kind, other).value == e.value))
      fail(ErrorCode::Falsified, "lower-bound exponents disagree between ranges " + std::to_string(c) + " and " +
                                     std::to_string(other) + " at " + sp.str());
  }
  return e;
}

RateFit fit_rate(const std::vector<RatePoint>& points, const FitWindow& window, double r2_retry) {
  std::vector<RatePoint> pts;
  for (const auto& pt : points)
    if (pt.x >= window.lo && pt.x <= window.hi) pts.push_back(pt);
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) { return a.x < b.x; });
  auto check = [](const std::vector<RatePoint>& v) {
    std::vector<double> xs;
    for (const auto& pt : v) xs.push_back(pt.x);
    return v.size() >= 4 && octave_span(xs) >= 3.0 - 1e-12;
  };
  auto fit = [](const std::vector<RatePoint>& v) {
    std::vector<double> xs, ys;
    for (const auto& pt : v) {
      if (!(pt.value > 0.0)) fail(ErrorCode::InvalidArgument, "fit_rate needs positive values");
      xs.push_back(pt.x);
      ys.push_back(pt.value);
    }
    return fit_log_log(xs, ys);
  };
  for (const auto& pt : pts)
    if (!(pt.value > 0.0) || !(pt.x > 0.0)) fail(ErrorCode::InvalidArgument, "fit_rate needs positive points");
  if (!check(pts)) fail(ErrorCode::InvalidArgument, "fit_rate needs at least 4 points spanning 3 octaves");

  RateFit rf;
  LineFit f = fit(pts);
  rf.first_exponent = f.slope;
  rf.first_r2 = f.r2;
  rf.window = {pts.front().x, pts.back().x};
  if (f.r2 < r2_retry) {
    std::vector<RatePoint> rest;
    for (const auto& pt : pts)
      if (pt.x >= 2.0 * pts.front().x * (1.0 - 1e-12)) rest.push_back(pt);
    if (check(rest)) {
      pts = rest;
      f = fit(pts);
      rf.retried = true;
      rf.window = {pts.front().x, pts.back().x};
    }
  }
  rf.points = pts;
  rf.exponent = f.slope;
  rf.intercept = f.intercept;
  rf.r2 = f.r2;
  return rf;
}

double exact_L2_sobolev_width(const SpectralBasis& basis, const Rational& r, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "n must be >= 0");
  if (static_cast<std::size_t>(n) >= basis.size())
    fail(ErrorCode::BandInsufficient, "exact L2 width needs more than n materialized modes");
  const double lam = basis.eigenvalue(static_cast<std::size_t>(n));
  return 1.0 / (1.0 + std::pow(lam, r.to_double() / 2.0));
}

L2BruteForce brute_force_L2_width(const SpectralBasis& basis, const Rational& r, int n, int truncation, int subspaces,
                                  std::uint64_t seed) {
  if (truncation < 1 || static_cast<std::size_t>(truncation) > basis.size())
    fail(ErrorCode::BandInsufficient, "truncation exceeds the materialized band");
  if (n < 0 || n >= truncation) fail(ErrorCode::InvalidArgument, "brute force needs 0 <= n < truncation");
  const int T = truncation;
  VectorXd D(T);
  for (int l = 0; l < T; ++l) D(l) = std::pow(basis.eigenvalue(static_cast<std::size_t>(l)), r.to_double() / 2.0);

  // sup over c of ||c - Z Z^T c|| / (||c|| + ||D c||), by normalized gradient ascent.
  auto ratio = [&](const MatrixXd& Z, const VectorXd& c, VectorXd* grad) {
    const VectorXd a = c - Z * (Z.transpose() * c);
    const double na = a.norm(), nc = c.norm(), nd = D.cwiseProduct(c).norm();
    const double den = nc + nd;
    if (grad) {
      const VectorXd ga = na > 0 ? VectorXd(a / na) : VectorXd::Zero(T);
      VectorXd gden = nc > 0 ? VectorXd(c / nc) : VectorXd::Zero(T);
      if (nd > 0) gden += D.cwiseProduct(D.cwiseProduct(c)) / nd;
      *grad = ga / den - (na / (den * den)) * gden;
    }
    return na / den;
  };
  auto deviation = [&](const MatrixXd& Z, CounterRng& rng) {
    std::vector<VectorXd> starts;
    // Witness: a unit vector of the first n + 1 modes orthogonal to Z.
    {
      VectorXd w = VectorXd::Zero(T);
      if (n == 0) {
        w(0) = 1.0;
      } else {
        const MatrixXd Zh = Z.topRows(n + 1);
        Eigen::JacobiSVD<MatrixXd> svd(Zh.transpose(), Eigen::ComputeFullV);
        w.head(n + 1) = svd.matrixV().col(n);
      }
      starts.push_back(w);
    }
    for (int l = 0; l < T; ++l) starts.push_back(VectorXd::Unit(T, l));
    for (int k = 0; k < 8; ++k) starts.push_back(rng.normal_vector(T));
    double best = 0.0;
    for (VectorXd c : starts) {
      c.normalize();
      VectorXd g;
      double f = ratio(Z, c, &g);
      double step = 0.1;
      for (int it = 0; it < 200; ++it) {
        const VectorXd gt = g - c * c.dot(g);
        if (gt.norm() < 1e-14) break;
        bool moved = false;
        for (int h = 0; h < 30; ++h) {
          VectorXd cn = (c + step * gt).normalized();
          VectorXd gn;
          const double fn = ratio(Z, cn, &gn);
          if (fn > f) {
            c = cn;
            g = gn;
            f = fn;
            moved = true;
            step *= 2.0;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
      best = std::max(best, f);
    }
    return best;
  };

  L2BruteForce out;
  out.oracle = exact_L2_sobolev_width(basis, r, n);
  out.subspaces = subspaces;
  CounterRng root(seed);
  {
    CounterRng rng = root.substream(0);
    out.first_n_deviation = deviation(MatrixXd::Identity(T, n), rng);
  }
  out.best_random = std::numeric_limits<double>::infinity();
  for (int k = 0; k < subspaces; ++k) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(k) + 1);
    const MatrixXd Z = n == 0 ? MatrixXd(T, 0) : orthonormalize(rng.normal_matrix(T, n));
    out.best_random = std::min(out.best_random, deviation(Z, rng));
  }
  if (subspaces == 0) out.best_random = out.first_n_deviation;
  out.beaten = out.best_random < out.oracle * (1.0 - 1e-10);
  return out;
}

BumpFamily::BumpFamily(Manifold manifold, BumpFamilyConfig config)
    : manifold_(std::move(manifold)), config_(config),
      filter_(make_filter(config.Lambda, config.band_lo, config.band_hi, config.Q, config.tail_rel)) {
  if (manifold_.kind() == ManifoldKind::Mesh) fail(ErrorCode::Unsupported, "bump families need a closed-form manifold");
  const double t = config_.probe_t;
  if (!(t > 0.0 && t <= 1.0)) fail(ErrorCode::InvalidArgument, "probe_t must lie in (0, 1]");
  const double cut = filter_.lambda_tail() / (t * t);
  const BasisPtr basis = spectral_data(manifold_, cut * 1.0001);
  const KernelJob job(basis, filter_, t);
  const Quadrature q = build_quadrature(manifold_, resolution_for_band(manifold_, job.certificate().lambda_cut));
  std::vector<Point> xs;
  switch (manifold_.kind()) {
  case ManifoldKind::Circle: xs = {circle_point(0.0)}; break;
  case ManifoldKind::FlatTorus: xs = {torus_point(0.0, 0.0)}; break;
  default: xs = {sphere_point(0.0, 0.0), sphere_point(1.0, 2.0)}; break;
  }
  propagation_ = measure_propagation(job, xs, 0.0, q);
  if (propagation_.falsified) fail(ErrorCode::Falsified, "finite propagation falsified while measuring C0");
  if (!(propagation_.measured_radius > 0.0)) fail(ErrorCode::NumericalFailure, "measured propagation radius is zero");
}

const BumpSystem& BumpFamily::system(int N, const Rational& r) {
  const auto key = std::make_pair(N, std::make_pair(r.num(), r.den()));
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  const double cut = bump_lambda_cut(manifold_, N, filter_, C0(), r);
  const BasisPtr basis = spectral_data(manifold_, cut * 1.0001);
  const Quadrature q = build_quadrature(manifold_, resolution_for_band(manifold_, cut));
  const BallPacking pk = greedy_packing(manifold_, N, default_candidates(q, packing_radius(manifold_, N)));
  BumpOptions opt;
  opt.r = r;
  opt.support_rel = config_.support_rel;
  auto sys = std::make_unique<BumpSystem>(build_bumps(pk, basis, q, filter_, C0(), opt));
  const BumpSystem& ref = *sys;
  cache_.emplace(key, std::move(sys));
  return ref;
}

namespace {

struct Route {
  std::string name;
  LpIndex p, q;        // indices the chain runs at
  double volume = 1.0; // manifold-level reduction factor
  WidthKind finite_kind = WidthKind::Kolmogorov;
  LpIndex fp, fq;      // catalog entry for the finite width
  int holder = 0;      // 0 none, 1 P^{1/q - 1/2}, 2 P^{1/2 - 1/p}
};

Route choose_route(const Manifold& m, const SobolevSpec& sp, WidthKind kind) {
  const LpIndex one = LpIndex::from_value(Rational(1)), two = LpIndex::from_value(Rational(2)),
                inf = LpIndex::infinity();
  const double ip = sp.p.inverse(), iq = sp.q.inverse();
  Route rt;
  rt.finite_kind = kind;
  // B_inf^r scaled by vol^{-1/p} lies in B_p^r, and ||f||_q >= vol^{1/q - 1} ||f||_1.
  auto to_inf_one = [&](double extra, const std::string& why) {
    rt.name = why + "reduce to (inf, 1), finite width P - n";
    rt.p = inf;
    rt.q = one;
    rt.volume = extra * vol_pow(m, -ip) * vol_pow(m, iq - 1.0);
    rt.fp = inf;
    rt.fq = one;
  };
  const int c = main_theorem_case(sp);
  if (c == 1) {
    to_inf_one(1.0, "");
  } else if (c == 2 && kind == WidthKind::Kolmogorov) {
    rt = {"direct, finite width d_n(b_1, l_2)", sp.p, sp.q, 1.0, kind, one, two, 0};
  } else if (c == 3 && kind == WidthKind::Gelfand) {
    rt = {"direct, finite width d^n(b_2, l_inf)", sp.p, sp.q, 1.0, kind, two, inf, 0};
  } else if (c == 2 || c == 3) {
    // L_q norm dominates vol^{1/q - 1/p} L_p for q >= p; then (p, p) falls in range 1.
    const double e = iq - ip;
    rt.finite_kind = kind;
    rt.name = "";
    rt.p = inf;
    rt.q = one;
    rt.volume = vol_pow(m, e) * vol_pow(m, -ip) * vol_pow(m, ip - 1.0);
    rt.fp = inf;
    rt.fq = one;
    rt.name = "reduce to (p, p), then to (inf, 1), finite width P - n";
  } else if (kind == WidthKind::Kolmogorov) {
    rt = {"direct, finite width P^{1/q-1/2} d_n(b_1, l_2)", sp.p, sp.q, 1.0, kind, one, two, 1};
  } else {
    rt = {"direct, finite width P^{1/2-1/p} d^n(b_2, l_inf)", sp.p, sp.q, 1.0, kind, two, inf, 2};
  }
  return rt;
}

ChainedLowerBound chain_one(const BumpSystem& sys, const SobolevSpec& sp, WidthKind kind, int n, std::uint64_t seed,
                            const ChainSampling& sampling) {
  const Manifold& m = sys.basis().manifold();
  const Route rt = choose_route(m, sp, kind);
  ChainedLowerBound out;
  out.N = sys.N();
  out.n = n;
  out.P = sys.size();
  out.route = rt.name;
  out.p_used = rt.p;
  out.q_used = rt.q;
  out.reduction_factor = rt.volume;
  const int P = static_cast<int>(sys.size());
  FiniteBallProblem fp{P, n, rt.fp, rt.fq, rt.finite_kind};
  const auto fw = exact_width(fp);
  if (!fw) fail(ErrorCode::Unsupported, "finite width for the chain is not in the exact catalog");
  double finite = fw->value;
  if (rt.holder == 1) finite *= std::pow(static_cast<double>(P), sp.q.inverse() - 0.5);
  if (rt.holder == 2) finite *= std::pow(static_cast<double>(P), 0.5 - sp.p.inverse());
  out.finite_width = finite;

  const double pv = index_value(rt.p), qv = index_value(rt.q);
  out.epsilon = epsilon_embedding(sys, pv, mix(seed, 1), sampling.epsilon_samples, sampling.spectral_samples).epsilon;
  const NormEquivalence ne = norm_equivalence(sys, qv, mix(seed, 2), sampling.norm_samples);
  out.norm_lower = ne.m;
  out.projection_bound = kind == WidthKind::Kolmogorov ? projection_constant(sys) : 1.0;
  const double Nq = std::pow(static_cast<double>(sys.N()), -rt.q.inverse());
  const double value = rt.volume * out.norm_lower * Nq * out.epsilon * finite / out.projection_bound;

  FiniteBallProblem pr{P, n, sp.p, sp.q, kind};
  out.estimate.problem = pr;
  out.estimate.value = value;
  out.estimate.method = WidthMethod::ChainedLowerBound;
  out.estimate.direction = Direction::Lower;
  return out;
}

} // namespace

ChainedLowerBound chained_lower_bound(const BumpSystem& sys, const SobolevSpec& sp, WidthKind kind, int n,
                                      std::uint64_t seed, const ChainSampling& sampling) {
  if (!SobolevSpec::admissible(sp.p, sp.q, sp.r, sp.s)) fail(ErrorCode::InvalidArgument, "inadmissible " + sp.str());
  if (n < 0) fail(ErrorCode::InvalidArgument, "n must be >= 0");
  if (!(sys.r() == sp.r)) fail(ErrorCode::InvalidArgument, "bump system was built for a different r");
  if (sys.basis().manifold().dimension() != sp.s) fail(ErrorCode::InvalidArgument, "spec dimension differs from the manifold");
  if (!sys.support().inside) fail(ErrorCode::Falsified, "bump supports are not certified inside their balls");
  const std::size_t P = sys.size();
  if (static_cast<std::size_t>(n) >= P) {
    ChainedLowerBound z;
    z.N = sys.N();
    z.n = n;
    z.P = P;
    z.route = "vacuous: n >= P_N";
    z.estimate.problem = {static_cast<int>(P), n, sp.p, sp.q, kind};
    z.estimate.value = 0.0;
    z.estimate.method = WidthMethod::ChainedLowerBound;
    z.estimate.direction = Direction::Lower;
    return z;
  }
  if (P < 2 * static_cast<std::size_t>(n))
    fail(ErrorCode::InvalidArgument, "chained lower bound needs P_N >= 2n (P_N = " + std::to_string(P) +
                                         ", n = " + std::to_string(n) + ")");
  if (kind != WidthKind::Linear) return chain_one(sys, sp, kind, n, seed, sampling);
  // delta_n >= max(d_n, d^n).
  ChainedLowerBound a = chain_one(sys, sp, WidthKind::Kolmogorov, n, seed, sampling);
  ChainedLowerBound b = chain_one(sys, sp, WidthKind::Gelfand, n, seed, sampling);
  ChainedLowerBound& best = a.estimate.value >= b.estimate.value ? a : b;
  best.route = "max(d_n, d^n): " + best.route;
  best.estimate.problem.kind = WidthKind::Linear;
  return best;
}

int choose_nu(BumpFamily& family, int n, const Rational& r, int max_nu) {
  for (int nu = 1; nu <= max_nu; nu *= 2)
    if (family.system(nu * n, r).size() >= 2 * static_cast<std::size_t>(n)) return nu;
  fail(ErrorCode::BandInsufficient, "no nu <= " + std::to_string(max_nu) + " gives P_{nu n} >= 2n");
}

CaseSuiteReport run_case_suite(BumpFamily& family, const CaseSuiteConfig& cfg) {
  if (cfg.specs.empty() || cfg.n_grid.empty() || cfg.kinds.empty())
    fail(ErrorCode::InvalidArgument, "case suite needs specs, kinds and an n-grid");
  for (const auto& sp : cfg.specs)
    if (!SobolevSpec::admissible(sp.p, sp.q, sp.r, sp.s)) fail(ErrorCode::InvalidArgument, "inadmissible " + sp.str());
  CaseSuiteReport rep;
  const Manifold& m = family.manifold();
  for (std::size_t si = 0; si < cfg.specs.size(); ++si) {
    const SobolevSpec& sp = cfg.specs[si];
    if (sp.s != m.dimension()) fail(ErrorCode::InvalidArgument, "spec dimension differs from the manifold: " + sp.str());
    const bool l2 = sp.p == sp.q && sp.p.reciprocal() == kHalf;
    const std::vector<int>& ogrid = cfg.oracle_n_grid.empty() ? cfg.n_grid : cfg.oracle_n_grid;
    BasisPtr oracle_basis;
    std::optional<RateFit> oracle_fit;
    if (l2) {
      const int nmax = std::max(*std::max_element(cfg.n_grid.begin(), cfg.n_grid.end()),
                                *std::max_element(ogrid.begin(), ogrid.end()));
      double lam = 4.0;
      oracle_basis = spectral_data(m, lam);
      while (oracle_basis->size() <= static_cast<std::size_t>(nmax)) oracle_basis = spectral_data(m, lam *= 2.0);
      std::vector<RatePoint> opts;
      for (int n : ogrid) opts.push_back({static_cast<double>(n), exact_L2_sobolev_width(*oracle_basis, sp.r, n)});
      oracle_fit = fit_rate(opts, cfg.window, cfg.r2_retry);
    }
    for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki) {
      const WidthKind kind = cfg.kinds[ki];
      CaseRecord rec;
      rec.spec = sp;
      rec.kind = kind;
      rec.lower = theoretical_exponent(sp, kind, BoundSide::Lower);
      rec.upper = theoretical_exponent(sp, kind, BoundSide::Upper);
      std::vector<RatePoint> pts;
      bool below = true;
      for (int n : cfg.n_grid) {
        const int nu = cfg.nu > 0 ? cfg.nu : choose_nu(family, n, sp.r);
        const BumpSystem& sys = family.system(nu * n, sp.r);
        const ChainSampling sampling{family.config().epsilon_samples, family.config().spectral_samples,
                                    family.config().norm_samples};
        const ChainedLowerBound cb =
            chained_lower_bound(sys, sp, kind, n, mix(cfg.seed, si, static_cast<std::uint64_t>(n)), sampling);
        SeriesPoint pt;
        pt.n = n;
        pt.N = cb.N;
        pt.P = cb.P;
        pt.value = cb.estimate.value;
        pt.finite_width = cb.finite_width;
        pt.epsilon = cb.epsilon;
        pt.norm_lower = cb.norm_lower;
        pt.projection_bound = cb.projection_bound;
        pt.reduction_factor = cb.reduction_factor;
        pt.route = cb.route;
        if (l2) {
          pt.oracle = exact_L2_sobolev_width(*oracle_basis, sp.r, n);
          below = below && pt.value <= *pt.oracle;
        }
        rec.series.push_back(pt);
        pts.push_back({static_cast<double>(n), pt.value});
      }
      rec.fit = fit_rate(pts, cfg.window, cfg.r2_retry);
      const double lo = rec.lower.value.to_double(), up = rec.upper.value.to_double();
      rec.within_bracket = rec.fit.exponent >= lo - cfg.tolerance && rec.fit.exponent <= up + cfg.tolerance;
      rec.matches_lower = std::abs(rec.fit.exponent - lo) <= cfg.tolerance;
      rec.below_upper = rec.fit.exponent <= up + cfg.tolerance;
      bool pass = rec.within_bracket;
      if (l2) {
        rec.below_oracle = below;
        rec.oracle_fit = oracle_fit;
        pass = pass && below && std::abs(oracle_fit->exponent - lo) <= cfg.oracle_tolerance;
      }
      rec.verdict = pass ? "PASS" : "FAIL";
      rep.all_pass = rep.all_pass && pass;
      rep.records.push_back(std::move(rec));
    }
  }
  return rep;
}

} // namespace widthlab
