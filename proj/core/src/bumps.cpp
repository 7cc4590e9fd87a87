#include "widthlab/bumps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "widthlab/errors.hpp"
#include "widthlab/kernel.hpp"

namespace widthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int norm_slot(double p) {
  if (p == 1.0) return 0;
  if (p == 2.0) return 1;
  if (std::isinf(p)) return 2;
  return -1;
}

double ball_norm(const Quadrature& q, const LocalBump& b, const Eigen::VectorXd& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double acc = 0.0;
  for (std::size_t k = 0; k < b.nodes.size(); ++k)
    acc += q.weights()[static_cast<Eigen::Index>(b.nodes[k])] * std::pow(std::abs(v[static_cast<Eigen::Index>(k)]), p);
  return std::pow(acc, 1.0 / p);
}

std::array<std::size_t, 3> grid_index(const Quadrature& q, std::size_t node) {
  std::array<std::size_t, 3> idx{0, 0, 0};
  const int s = static_cast<int>(q.shape().size());
  for (int d = s - 1; d >= 0; --d) {
    const std::size_t n = static_cast<std::size_t>(q.shape()[d]);
    idx[d] = node % n;
    node /= n;
  }
  return idx;
}

std::size_t grid_node(const Quadrature& q, const std::array<std::size_t, 3>& idx) {
  std::size_t node = 0;
  for (std::size_t d = 0; d < q.shape().size(); ++d) node = node * static_cast<std::size_t>(q.shape()[d]) + idx[d];
  return node;
}

// Norm of sum_i a_i v_i for functions with disjoint supports and per-piece norms n_i.
double disjoint_norm(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::VectorXd& piece_norms, double p,
                     const std::function<double(std::size_t)>& fallback) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]) * piece_norms[i]);
    return m;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double n = piece_norms.size() ? piece_norms[i] : fallback(static_cast<std::size_t>(i));
    acc += std::pow(std::abs(a[i]) * n, p);
  }
  return std::pow(acc, 1.0 / p);
}

} // namespace

double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& a, double p) {
  if (std::isinf(p)) return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  if (p == 1.0) return a.cwiseAbs().sum();
  if (p == 2.0) return a.norm();
  return std::pow(a.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

Eigen::VectorXd random_lp_unit(CounterRng& rng, Eigen::Index m, double p) {
  Eigen::VectorXd a(m);
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < m; ++i) a[i] = rng.uniform(-1.0, 1.0);
    const Eigen::Index k = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(m)) % m;
    a[k] = rng.sign();
    return a;
  }
  a = rng.normal_vector(m);
  return a / lp_norm(a, p);
}

double BumpSystem::bump_norm(std::size_t i, double p) const {
  const int slot = norm_slot(p);
  if (slot >= 0) return phi_norms_(static_cast<Eigen::Index>(i), slot);
  return ball_norm(quad_, bumps_[i], *bumps_[i].phi, p);
}

double BumpSystem::lift_bump_norm(std::size_t i, double p) const {
  const int slot = norm_slot(p);
  if (slot >= 0) return lift_norms_(static_cast<Eigen::Index>(i), slot);
  return ball_norm(quad_, bumps_[i], *bumps_[i].lift, p);
}

void BumpSystem::check_length(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  if (static_cast<std::size_t>(a.size()) != size())
    fail(ErrorCode::InvalidArgument, "coefficient vector length must equal the number of bumps");
}

Eigen::VectorXd BumpSystem::center_sums(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  check_length(a);
  if (packing_.centers_on_nodes()) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(quad_.size()));
    for (std::size_t i = 0; i < size(); ++i) v[static_cast<Eigen::Index>(packing_.center_nodes[i])] += a[static_cast<Eigen::Index>(i)];
    return analyze(*basis_, quad_, v, count_);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count_));
  for (std::size_t i = 0; i < size(); ++i)
    out += a[static_cast<Eigen::Index>(i)] * basis_->evaluate_all(packing_.centers[i], count_);
  return out;
}

Eigen::VectorXd BumpSystem::coefficients(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  return f_mult_.cwiseProduct(center_sums(a));
}

Eigen::VectorXd BumpSystem::synthesize(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  return widthlab::synthesize(*basis_, quad_, coefficients(a));
}

Eigen::VectorXd BumpSystem::sobolev_lift(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  return widthlab::synthesize(*basis_, quad_, g_mult_.cwiseProduct(center_sums(a)));
}

Eigen::VectorXd BumpSystem::synthesize_local(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  check_length(a);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(quad_.size()));
  for (std::size_t i = 0; i < size(); ++i) {
    const LocalBump& b = bumps_[i];
    for (std::size_t k = 0; k < b.nodes.size(); ++k)
      g[static_cast<Eigen::Index>(b.nodes[k])] += a[static_cast<Eigen::Index>(i)] * (*b.phi)[static_cast<Eigen::Index>(k)];
  }
  return g;
}

double BumpSystem::norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const {
  check_length(a);
  const int slot = norm_slot(p);
  if (slot >= 0) return disjoint_norm(a, phi_norms_.col(slot), p, {});
  return disjoint_norm(a, Eigen::VectorXd(), p, [&](std::size_t i) { return bump_norm(i, p); });
}

double BumpSystem::lift_norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const {
  check_length(a);
  const int slot = norm_slot(p);
  if (slot >= 0) return disjoint_norm(a, lift_norms_.col(slot), p, {});
  return disjoint_norm(a, Eigen::VectorXd(), p, [&](std::size_t i) { return lift_bump_norm(i, p); });
}

double BumpSystem::sobolev_norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const {
  return norm_local(a, p) + lift_norm_local(a, p);
}

Eigen::VectorXd BumpSystem::project(const Eigen::Ref<const Eigen::VectorXd>& h) const {
  if (static_cast<std::size_t>(h.size()) != quad_.size())
    fail(ErrorCode::InvalidArgument, "project expects samples on every quadrature node");
  Eigen::VectorXd a(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    const LocalBump& b = bumps_[i];
    double dot = 0.0;
    for (std::size_t k = 0; k < b.nodes.size(); ++k) {
      const auto j = static_cast<Eigen::Index>(b.nodes[k]);
      dot += quad_.weights()[j] * h[j] * (*b.phi)[static_cast<Eigen::Index>(k)];
    }
    const double n2 = phi_norms_(static_cast<Eigen::Index>(i), 1);
    if (!(n2 > 0.0)) fail(ErrorCode::NumericalFailure, "bump with zero norm");
    a[static_cast<Eigen::Index>(i)] = dot / (n2 * n2);
  }
  return a;
}

double bump_lambda_cut(const Manifold& m, int N, const FilterFunction& F, double C0, const Rational& r) {
  if (!(C0 > 0.0)) fail(ErrorCode::InvalidArgument, "C0 must be positive");
  const double t = packing_radius(m, N) / (2.0 * C0);
  const FilterFunction G = fractional_filter(F, r);
  return std::max(F.lambda_tail(), G.lambda_tail()) / (t * t);
}

BumpSystem build_bumps(const BallPacking& packing, BasisPtr basis, const Quadrature& q, const FilterFunction& F,
                       double C0, const BumpOptions& options) {
  require(basis != nullptr, "bump system needs a spectral basis");
  if (F.Q() < 1) fail(ErrorCode::InvalidArgument, "bump filters need a power lift Q >= 1");
  if (!(C0 > 0.0)) fail(ErrorCode::InvalidArgument, "C0 must be positive");
  if (options.r < Rational(0)) fail(ErrorCode::InvalidArgument, "r must be nonnegative");
  if (packing.size() == 0) fail(ErrorCode::InvalidArgument, "empty packing");

  BumpSystem sys(q);
  sys.packing_ = packing;
  sys.basis_ = basis;
  sys.F_ = F;
  sys.G_ = fractional_filter(F, options.r);
  sys.r_ = options.r;
  sys.C0_ = C0;
  sys.t_ = packing.rho / (2.0 * C0);
  const double t = sys.t_;
  const double cut = std::max(F.lambda_tail(), sys.G_.lambda_tail()) / (t * t);
  if (cut > basis->lambda_max() * (1.0 + 1e-12))
    fail(ErrorCode::BandInsufficient, "spectral band is insufficient for N = " + std::to_string(packing.N) +
                                          ": need lambda_max >= " + std::to_string(cut));
  sys.count_ = basis->count_le(cut);
  require_exactness(q, *basis, sys.count_, "build_bumps");

  const double invN = 1.0 / packing.N;
  const double t_r = std::pow(t, -options.r.to_double());
  sys.f_mult_.resize(static_cast<Eigen::Index>(sys.count_));
  sys.g_mult_.resize(static_cast<Eigen::Index>(sys.count_));
  for (std::size_t l = 0; l < sys.count_; ++l) {
    const double lam = t * t * basis->eigenvalue(l);
    sys.f_mult_[static_cast<Eigen::Index>(l)] = invN * F(lam);
    sys.g_mult_[static_cast<Eigen::Index>(l)] = invN * t_r * sys.G_(lam);
  }

  const double rho = packing.rho;
  auto rows_at = [&](const Point& x) {
    Eigen::VectorXd u = basis->evaluate_all(x, sys.count_);
    return std::pair{widthlab::synthesize(*basis, q, sys.f_mult_.cwiseProduct(u)),
                     widthlab::synthesize(*basis, q, sys.g_mult_.cwiseProduct(u))};
  };
  // Extracts the ball samples of one directly computed row and updates the support report.
  auto extract = [&](const Point& x, const Eigen::VectorXd& phi, const Eigen::VectorXd& lift) {
    Eigen::VectorXd d = q.distances_from(x);
    LocalBump b;
    const double peak = phi.cwiseAbs().maxCoeff();
    double outside = 0.0;
    std::vector<double> pv, lv;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      if (std::abs(phi[j]) > options.support_rel * peak) sys.support_.support_radius = std::max(sys.support_.support_radius, d[j]);
      if (d[j] <= rho) {
        b.nodes.push_back(static_cast<std::size_t>(j));
        pv.push_back(phi[j]);
        lv.push_back(lift[j]);
      } else {
        outside = std::max(outside, std::abs(phi[j]));
      }
    }
    sys.support_.max_outside_ratio = std::max(sys.support_.max_outside_ratio, outside / peak);
    b.phi = std::make_shared<const Eigen::VectorXd>(Eigen::Map<Eigen::VectorXd>(pv.data(), static_cast<Eigen::Index>(pv.size())));
    b.lift = std::make_shared<const Eigen::VectorXd>(Eigen::Map<Eigen::VectorXd>(lv.data(), static_cast<Eigen::Index>(lv.size())));
    return b;
  };

  const bool translate = q.layout() == QuadratureLayout::UniformGrid && packing.centers_on_nodes();
  if (translate) {
    // Flat manifolds: every bump is a grid translate of the first one.
    const auto [phi0, lift0] = rows_at(packing.centers[0]);
    LocalBump ref = extract(packing.centers[0], phi0, lift0);
    const auto r0 = grid_index(q, packing.center_nodes[0]);
    std::vector<std::array<std::ptrdiff_t, 3>> offsets;
    offsets.reserve(ref.nodes.size());
    for (std::size_t j : ref.nodes) {
      const auto idx = grid_index(q, j);
      offsets.push_back({static_cast<std::ptrdiff_t>(idx[0]) - static_cast<std::ptrdiff_t>(r0[0]),
                         static_cast<std::ptrdiff_t>(idx[1]) - static_cast<std::ptrdiff_t>(r0[1]),
                         static_cast<std::ptrdiff_t>(idx[2]) - static_cast<std::ptrdiff_t>(r0[2])});
    }
    for (std::size_t i = 0; i < packing.size(); ++i) {
      LocalBump b;
      b.phi = ref.phi;
      b.lift = ref.lift;
      const auto ci = grid_index(q, packing.center_nodes[i]);
      b.nodes.reserve(offsets.size());
      for (const auto& o : offsets) {
        std::array<std::size_t, 3> idx{0, 0, 0};
        for (std::size_t d = 0; d < q.shape().size(); ++d) {
          const auto n = static_cast<std::ptrdiff_t>(q.shape()[d]);
          idx[d] = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(ci[d]) + o[d]) % n + n) % n);
        }
        b.nodes.push_back(grid_node(q, idx));
      }
      sys.bumps_.push_back(std::move(b));
    }
    if (packing.size() > 1) {
      // Direct row at the last center against the shifted reference.
      const std::size_t last = packing.size() - 1;
      const auto [phi1, lift1] = rows_at(packing.centers[last]);
      const double peak = phi0.cwiseAbs().maxCoeff();
      double gap = 0.0, outside = 0.0;
      std::vector<char> mark(q.size(), 0);
      const LocalBump& b = sys.bumps_[last];
      for (std::size_t k = 0; k < b.nodes.size(); ++k) {
        mark[b.nodes[k]] = 1;
        gap = std::max(gap, std::abs(phi1[static_cast<Eigen::Index>(b.nodes[k])] - (*b.phi)[static_cast<Eigen::Index>(k)]));
      }
      for (std::size_t j = 0; j < q.size(); ++j)
        if (!mark[j]) outside = std::max(outside, std::abs(phi1[static_cast<Eigen::Index>(j)]));
      sys.support_.translation_gap = gap / peak;
      sys.support_.max_outside_ratio = std::max(sys.support_.max_outside_ratio, outside / peak);
    }
  } else {
    for (std::size_t i = 0; i < packing.size(); ++i) {
      const auto [phi, lift] = rows_at(packing.centers[i]);
      sys.bumps_.push_back(extract(packing.centers[i], phi, lift));
    }
  }
  sys.support_.inside = sys.support_.support_radius <= rho;

  const Eigen::Index P = static_cast<Eigen::Index>(packing.size());
  sys.phi_norms_.resize(P, 3);
  sys.lift_norms_.resize(P, 3);
  const double ps[3] = {1.0, 2.0, kInf};
  for (Eigen::Index i = 0; i < P; ++i) {
    const LocalBump& b = sys.bumps_[static_cast<std::size_t>(i)];
    const bool shared = i > 0 && b.phi == sys.bumps_[0].phi && q.layout() == QuadratureLayout::UniformGrid;
    for (int k = 0; k < 3; ++k) {
      sys.phi_norms_(i, k) = shared ? sys.phi_norms_(0, k) : ball_norm(q, b, *b.phi, ps[k]);
      sys.lift_norms_(i, k) = shared ? sys.lift_norms_(0, k) : ball_norm(q, b, *b.lift, ps[k]);
    }
  }
  return sys;
}

double sobolev_norm(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& f,
                    double p, const Rational& r) {
  if (static_cast<std::size_t>(f.size()) > basis.size())
    fail(ErrorCode::BandInsufficient, "coefficients exceed the materialized basis");
  if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in [1, inf]");
  require_exactness(q, basis, static_cast<std::size_t>(f.size()), "sobolev_norm");
  Eigen::VectorXd lifted(f.size());
  const double h = 0.5 * r.to_double();
  for (Eigen::Index l = 0; l < f.size(); ++l) {
    const double lam = basis.eigenvalue(static_cast<std::size_t>(l));
    lifted[l] = lam > 0.0 ? std::pow(lam, h) * f[l] : (h == 0.0 ? f[l] : 0.0);
  }
  return q.norm(synthesize(basis, q, f), p) + q.norm(synthesize(basis, q, lifted), p);
}

EpsilonCertificate epsilon_embedding(const BumpSystem& sys, double p, std::uint64_t seed, std::size_t samples,
                                     std::size_t spectral_samples) {
  if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in [1, inf]");
  const Eigen::Index P = static_cast<Eigen::Index>(sys.size());
  const int s = sys.basis().manifold().dimension();
  EpsilonCertificate cert;
  cert.exponent = -sys.r().to_double() / s + (std::isinf(p) ? 0.0 : 1.0 / p);

  // Extremal candidates: vertices of b_p, plus the all-ones corner for p = inf
  // and two-term mixtures of the heaviest bumps for p = 2.
  std::vector<Eigen::VectorXd> extremal;
  Eigen::Index ia = 0, ib = 0;
  {
    double ba = -1, bb = -1;
    for (Eigen::Index i = 0; i < P; ++i) {
      const double na = sys.bump_norm(static_cast<std::size_t>(i), p), nb = sys.lift_bump_norm(static_cast<std::size_t>(i), p);
      if (na > ba) ba = na, ia = i;
      if (nb > bb) bb = nb, ib = i;
    }
  }
  if (std::isinf(p)) {
    extremal.push_back(Eigen::VectorXd::Ones(P));
  } else {
    for (Eigen::Index i = 0; i < P; ++i) extremal.push_back(Eigen::VectorXd::Unit(P, i));
    if (ia != ib) {
      for (int k = 1; k < 32; ++k) {
        const double th = 0.5 * 3.14159265358979323846 * k / 32.0;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(P);
        a[ia] = std::cos(th);
        a[ib] = std::sin(th);
        extremal.push_back(a / lp_norm(a, p));
      }
    }
  }

  CounterRng rng(seed);
  CounterRng train = rng.substream(0), held = rng.substream(1), spec = rng.substream(2);
  double max_s = 0.0;
  for (const auto& a : extremal) max_s = std::max(max_s, sys.sobolev_norm_local(a, p));
  for (std::size_t k = 0; k < samples; ++k) max_s = std::max(max_s, sys.sobolev_norm_local(random_lp_unit(train, P, p), p));
  cert.samples = samples + extremal.size();
  cert.max_sobolev = max_s;
  double eps = 1.0 / (1.05 * max_s);

  // Held-out recheck, including the spectral route on a few samples.
  std::vector<Eigen::VectorXd> check;
  for (std::size_t k = 0; k < samples; ++k) check.push_back(random_lp_unit(held, P, p));
  std::vector<Eigen::VectorXd> spectral;
  Eigen::Index worst = 0;
  {
    double w = -1;
    for (std::size_t k = 0; k < extremal.size(); ++k) {
      const double v = sys.sobolev_norm_local(extremal[k], p);
      if (v > w) w = v, worst = static_cast<Eigen::Index>(k);
    }
  }
  spectral.push_back(extremal[static_cast<std::size_t>(worst)]);
  for (std::size_t k = 0; k < spectral_samples; ++k) spectral.push_back(random_lp_unit(spec, P, p));

  for (int attempt = 0; attempt < 40; ++attempt) {
    bool ok = true;
    for (const auto& a : check)
      if (sys.sobolev_norm_local(eps * a, p) > 1.0) {
        ok = false;
        break;
      }
    double spec_max = 0.0;
    if (ok) {
      for (const auto& a : spectral) {
        const double v = sobolev_norm(sys.basis(), sys.quadrature(), sys.coefficients(eps * a), p, sys.r());
        spec_max = std::max(spec_max, v);
        if (v > 1.0) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      cert.epsilon = eps;
      cert.c = eps * std::pow(static_cast<double>(sys.N()), -cert.exponent);
      cert.spectral_check = spec_max;
      return cert;
    }
    eps *= 0.5;
    ++cert.shrinks;
  }
  fail(ErrorCode::NumericalFailure, "epsilon certification underflowed; the band is too small at this N");
}

NormEquivalence norm_equivalence(const BumpSystem& sys, double q, std::uint64_t seed, std::size_t samples) {
  const Eigen::Index P = static_cast<Eigen::Index>(sys.size());
  const double scale = std::isinf(q) ? 1.0 : std::pow(static_cast<double>(sys.N()), -1.0 / q);
  NormEquivalence ne{kInf, 0.0};
  auto visit = [&](const Eigen::VectorXd& a) {
    const double r = sys.norm_local(a, q) / (scale * lp_norm(a, q));
    ne.m = std::min(ne.m, r);
    ne.M = std::max(ne.M, r);
  };
  for (Eigen::Index i = 0; i < P; ++i) visit(Eigen::VectorXd::Unit(P, i));
  visit(Eigen::VectorXd::Ones(P));
  CounterRng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) visit(random_lp_unit(rng, P, q));
  return ne;
}

double projection_constant(const BumpSystem& sys) {
  double c = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double n2 = sys.bump_norm(i, 2.0);
    c = std::max(c, sys.bump_norm(i, 1.0) * sys.bump_norm(i, kInf) / (n2 * n2));
  }
  return c;
}

double measured_projection_ratio(const BumpSystem& sys, double q, std::uint64_t seed, std::size_t samples) {
  CounterRng rng(seed);
  const Quadrature& quad = sys.quadrature();
  double best = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    Eigen::VectorXd h = rng.normal_vector(static_cast<Eigen::Index>(quad.size()));
    if (k % 2 == 1) {
      // Sign patterns aligned with the bumps push the ratio towards its bound.
      Eigen::VectorXd a = random_lp_unit(rng, static_cast<Eigen::Index>(sys.size()), kInf);
      h = sys.synthesize_local(a).array().sign().matrix();
    }
    const double hn = quad.norm(h, q);
    if (hn > 0.0) best = std::max(best, quad.norm(sys.synthesize_local(sys.project(h)), q) / hn);
  }
  return best;
}

double lift_operator_norm(const BumpSystem& sys, double p, std::uint64_t seed, std::size_t samples) {
  const Eigen::Index P = static_cast<Eigen::Index>(sys.size());
  double best = 0.0;
  auto visit = [&](const Eigen::VectorXd& a) { best = std::max(best, sys.lift_norm_local(a, p) / lp_norm(a, p)); };
  for (Eigen::Index i = 0; i < P; ++i) visit(Eigen::VectorXd::Unit(P, i));
  visit(Eigen::VectorXd::Ones(P));
  CounterRng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) visit(random_lp_unit(rng, P, p));
  return best;
}

} // namespace widthlab
