#include "widthlab/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"

namespace widthlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Fractional part of k * u computed with an exact product, so that phases of
// high frequencies keep full relative accuracy.
double frac_turns(double k, double u) {
  const double hi = k * u;
  const double lo = std::fma(k, u, -hi);
  const double r = hi - std::nearbyint(hi);
  return r + lo;
}

bool less_mode(const Mode& a, const Mode& b) {
  if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
  if (a.k != b.k) return a.k < b.k;
  return static_cast<int>(a.parity) < static_cast<int>(b.parity);
}

void assign_groups(std::vector<Mode>& modes) {
  std::int32_t group = -1;
  double last = -1.0;
  for (auto& m : modes) {
    if (group < 0 || m.eigenvalue - last > 1e-12 * std::max(1.0, std::abs(last))) {
      ++group;
      last = m.eigenvalue;
    }
    m.group = group;
  }
}

void check_budget(std::size_t count, const SpectralOptions& options) {
  if (count > options.max_modes)
    fail(ErrorCode::ResourceBudget, "spectral basis would hold " + std::to_string(count) +
                                        " modes, above the budget of " + std::to_string(options.max_modes));
}

std::vector<Mode> circle_modes(double L, double lambda_max, const SpectralOptions& options) {
  const double c = std::pow(2.0 * kPi / L, 2);
  const auto K = static_cast<std::int64_t>(std::floor(std::sqrt(lambda_max / c) + 1e-12));
  check_budget(static_cast<std::size_t>(2 * K + 1), options);
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(2 * K + 1));
  modes.push_back(Mode{0.0, {0, 0, 0}, ModeParity::Constant, 0});
  for (std::int64_t k = 1; k <= K; ++k) {
    const double lam = c * static_cast<double>(k * k);
    if (lam > lambda_max * (1 + 1e-14)) break;
    const auto ki = static_cast<std::int32_t>(k);
    modes.push_back(Mode{lam, {ki, 0, 0}, ModeParity::Cosine, 0});
    modes.push_back(Mode{lam, {ki, 0, 0}, ModeParity::Sine, 0});
  }
  return modes;
}

std::vector<Mode> torus_modes(const std::vector<double>& sides, double lambda_max, const SpectralOptions& options) {
  const int s = static_cast<int>(sides.size());
  std::array<double, 3> c{0, 0, 0};
  std::array<std::int64_t, 3> K{0, 0, 0};
  bool equal_sides = true;
  for (int d = 0; d < s; ++d) {
    c[d] = std::pow(2.0 * kPi / sides[d], 2);
    K[d] = static_cast<std::int64_t>(std::floor(std::sqrt(lambda_max / c[d]) + 1e-12));
    if (sides[d] != sides[0]) equal_sides = false;
  }
  // Upper estimate of the count before allocating.
  double box = 1.0;
  for (int d = 0; d < s; ++d) box *= static_cast<double>(2 * K[d] + 1);
  const double ball_fraction = s == 1 ? 1.0 : (s == 2 ? kPi / 4.0 : kPi / 6.0);
  check_budget(static_cast<std::size_t>(box * ball_fraction * 0.9), options);

  auto eig = [&](const std::array<std::int64_t, 3>& k) {
    if (equal_sides) {
      std::int64_t n2 = 0;
      for (int d = 0; d < s; ++d) n2 += k[d] * k[d];
      return c[0] * static_cast<double>(n2);
    }
    double acc = 0.0;
    for (int d = 0; d < s; ++d) acc += c[d] * static_cast<double>(k[d] * k[d]);
    return acc;
  };

  std::vector<Mode> modes;
  modes.push_back(Mode{0.0, {0, 0, 0}, ModeParity::Constant, 0});
  std::array<std::int64_t, 3> k{0, 0, 0};
  const std::int64_t k1max = s > 1 ? K[1] : 0;
  const std::int64_t k2max = s > 2 ? K[2] : 0;
  for (k[0] = -K[0]; k[0] <= K[0]; ++k[0])
    for (k[1] = -k1max; k[1] <= k1max; ++k[1])
      for (k[2] = -k2max; k[2] <= k2max; ++k[2]) {
        // Representative of {k, -k}: first nonzero component positive.
        int first = 0;
        while (first < 3 && k[first] == 0) ++first;
        if (first == 3 || k[first] < 0) continue;
        const double lam = eig(k);
        if (lam > lambda_max * (1 + 1e-14)) continue;
        const std::array<std::int32_t, 3> k32{static_cast<std::int32_t>(k[0]), static_cast<std::int32_t>(k[1]),
                                             static_cast<std::int32_t>(k[2])};
        modes.push_back(Mode{lam, k32, ModeParity::Cosine, 0});
        modes.push_back(Mode{lam, k32, ModeParity::Sine, 0});
      }
  check_budget(modes.size(), options);
  return modes;
}

std::vector<Mode> sphere_modes(double lambda_max, const SpectralOptions& options, int& degree) {
  int L = 0;
  while (static_cast<double>(L + 1) * (L + 2) <= lambda_max * (1 + 1e-14)) ++L;
  degree = L;
  check_budget(static_cast<std::size_t>((L + 1) * (L + 1)), options);
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>((L + 1) * (L + 1)));
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      modes.push_back(Mode{static_cast<double>(l) * (l + 1), {l, m, 0},
                           l == 0 ? ModeParity::Constant : ModeParity::Harmonic, 0});
  return modes;
}

} // namespace

SpectralBasis::SpectralBasis(Manifold manifold, std::vector<Mode> modes, double lambda_max)
    : manifold_(std::move(manifold)), modes_(std::move(modes)), lambda_max_(lambda_max) {
  if (modes_.empty()) fail(ErrorCode::InvalidArgument, "empty spectral basis");
  if (manifold_.kind() == ManifoldKind::Sphere) {
    sphere_degree_ = 0;
    for (const auto& m : modes_) sphere_degree_ = std::max(sphere_degree_, static_cast<int>(m.k[0]));
  }
}

std::size_t SpectralBasis::count_le(double t) const {
  const double tt = t * (1 + 1e-13) + 1e-300;
  const auto it = std::upper_bound(modes_.begin(), modes_.end(), tt,
                                   [](double v, const Mode& m) { return v < m.eigenvalue; });
  return static_cast<std::size_t>(it - modes_.begin());
}

double SpectralBasis::evaluate(std::size_t l, const Point& x) const {
  if (l >= modes_.size()) fail(ErrorCode::InvalidArgument, "mode index out of range");
  const Mode& md = modes_[l];
  const double vol = manifold_.volume();
  switch (manifold_.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus: {
    if (md.parity == ModeParity::Constant) return 1.0 / std::sqrt(vol);
    double turns = 0.0;
    const auto& sides = manifold_.sides();
    for (int d = 0; d < manifold_.dimension(); ++d) turns += frac_turns(md.k[d], x.x[d] / sides[d]);
    const double angle = 2.0 * kPi * turns;
    const double amp = std::sqrt(2.0 / vol);
    return md.parity == ModeParity::Cosine ? amp * std::cos(angle) : amp * std::sin(angle);
  }
  case ManifoldKind::Sphere: {
    const int deg = md.k[0], ord = md.k[1];
    std::vector<double> p;
    normalized_legendre(std::clamp(x.x[2], -1.0, 1.0), deg, p);
    const int am = std::abs(ord);
    const double pl = p[static_cast<std::size_t>(deg * (deg + 1) / 2 + am)];
    if (ord == 0) return pl;
    const double phi = std::atan2(x.x[1], x.x[0]);
    return std::sqrt(2.0) * pl * (ord > 0 ? std::cos(am * phi) : std::sin(am * phi));
  }
  case ManifoldKind::Mesh:
    manifold_.validate(x);
    return manifold_.surrogate().spectrum.eigenvectors(x.vertex, static_cast<Eigen::Index>(l));
  }
  return 0.0;
}

Eigen::VectorXd SpectralBasis::evaluate_all(const Point& x, std::size_t count) const {
  if (count > modes_.size()) fail(ErrorCode::BandInsufficient, "evaluate_all beyond materialized modes");
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  switch (manifold_.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus: {
    const double vol = manifold_.volume();
    const double amp = std::sqrt(2.0 / vol);
    const auto& sides = manifold_.sides();
    std::array<double, 3> u{0, 0, 0};
    for (int d = 0; d < manifold_.dimension(); ++d) u[d] = x.x[d] / sides[d];
    for (std::size_t l = 0; l < count; ++l) {
      const Mode& md = modes_[l];
      if (md.parity == ModeParity::Constant) {
        out[static_cast<Eigen::Index>(l)] = 1.0 / std::sqrt(vol);
        continue;
      }
      if (md.parity == ModeParity::Sine && l > 0 && modes_[l - 1].k == md.k) {
        continue; // filled together with its cosine partner
      }
      double turns = 0.0;
      for (int d = 0; d < manifold_.dimension(); ++d) turns += frac_turns(md.k[d], u[d]);
      const double angle = 2.0 * kPi * turns;
      if (md.parity == ModeParity::Cosine) {
        out[static_cast<Eigen::Index>(l)] = amp * std::cos(angle);
        if (l + 1 < count && modes_[l + 1].k == md.k && modes_[l + 1].parity == ModeParity::Sine)
          out[static_cast<Eigen::Index>(l + 1)] = amp * std::sin(angle);
      } else {
        out[static_cast<Eigen::Index>(l)] = amp * std::sin(angle);
      }
    }
    return out;
  }
  case ManifoldKind::Sphere: {
    int L = 0;
    for (std::size_t l = 0; l < count; ++l) L = std::max(L, static_cast<int>(modes_[l].k[0]));
    std::vector<double> p;
    normalized_legendre(std::clamp(x.x[2], -1.0, 1.0), L, p);
    const double phi = std::atan2(x.x[1], x.x[0]);
    std::vector<double> cs(static_cast<std::size_t>(L + 1)), sn(static_cast<std::size_t>(L + 1));
    for (int m = 0; m <= L; ++m) {
      cs[m] = std::cos(m * phi);
      sn[m] = std::sin(m * phi);
    }
    for (std::size_t l = 0; l < count; ++l) {
      const int deg = modes_[l].k[0], ord = modes_[l].k[1];
      const int am = std::abs(ord);
      const double pl = p[static_cast<std::size_t>(deg * (deg + 1) / 2 + am)];
      out[static_cast<Eigen::Index>(l)] = ord == 0 ? pl : std::sqrt(2.0) * pl * (ord > 0 ? cs[am] : sn[am]);
    }
    return out;
  }
  case ManifoldKind::Mesh:
    manifold_.validate(x);
    out = manifold_.surrogate().spectrum.eigenvectors.row(x.vertex).head(static_cast<Eigen::Index>(count)).transpose();
    return out;
  }
  return out;
}

void normalized_legendre(double x, int L, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>((L + 1) * (L + 2) / 2), 0.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
  auto idx = [](int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); };
  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
    out[idx(m, m)] = pmm;
    if (m + 1 <= L) out[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= L; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      out[idx(l, m)] = a * (x * out[idx(l - 1, m)] - b * out[idx(l - 2, m)]);
    }
  }
}

BasisPtr spectral_data(const Manifold& m, double lambda_max, const SpectralOptions& options) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    fail(ErrorCode::InvalidArgument, "lambda_max must be positive and finite");
  std::vector<Mode> modes;
  double cutoff = lambda_max;
  switch (m.kind()) {
  case ManifoldKind::Circle:
    modes = circle_modes(m.sides()[0], lambda_max, options);
    break;
  case ManifoldKind::FlatTorus:
    modes = torus_modes(m.sides(), lambda_max, options);
    break;
  case ManifoldKind::Sphere: {
    int degree = 0;
    modes = sphere_modes(lambda_max, options, degree);
    break;
  }
  case ManifoldKind::Mesh: {
    const auto& spec = m.surrogate().spectrum;
    const Eigen::Index k = spec.eigenvalues.size();
    for (Eigen::Index l = 0; l < k; ++l) {
      if (spec.eigenvalues[l] > lambda_max) break;
      modes.push_back(Mode{spec.eigenvalues[l], {static_cast<std::int32_t>(l), 0, 0},
                           l == 0 ? ModeParity::Constant : ModeParity::MeshVector, 0});
    }
    // Only the computed eigenpairs are known; beyond the last one nothing is certified.
    if (static_cast<Eigen::Index>(modes.size()) == k) cutoff = std::min(lambda_max, spec.eigenvalues[k - 1]);
    break;
  }
  }
  std::stable_sort(modes.begin(), modes.end(), less_mode);
  assign_groups(modes);
  return std::make_shared<const SpectralBasis>(m, std::move(modes), cutoff);
}

std::size_t weyl_count(const SpectralBasis& basis, double t) {
  if (t > basis.lambda_max() * (1 + 1e-12))
    fail(ErrorCode::BandInsufficient, "weyl_count: t exceeds the materialized cutoff");
  if (t < 0) return 0;
  return basis.count_le(t);
}

double unit_ball_volume(int s) {
  return 2.0 * std::pow(kPi, s / 2.0) / (s * std::tgamma(s / 2.0));
}

double weyl_leading(const Manifold& m, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "weyl_leading requires t > 0");
  const int s = m.dimension();
  return m.volume() * unit_ball_volume(s) * std::pow(t, s / 2.0) / std::pow(2.0 * kPi, s);
}

} // namespace widthlab
