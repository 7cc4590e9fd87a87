#include "widthlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"

namespace widthlab {

namespace {

constexpr double kPi = std::numbers::pi;

int fast_fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre needs n >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    // Ascending order: node i from the left, mirrored on the right.
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

Quadrature build_quadrature(const Manifold& m, const std::vector<int>& resolution) {
  Quadrature q;
  q.manifold_ = m;
  switch (m.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus: {
    const int s = m.dimension();
    if (static_cast<int>(resolution.size()) != s)
      fail(ErrorCode::InvalidArgument, "uniform grid resolution needs one entry per dimension");
    q.layout_ = QuadratureLayout::UniformGrid;
    q.shape_ = resolution;
    std::size_t total = 1;
    double exact = std::numeric_limits<double>::infinity();
    for (int d = 0; d < s; ++d) {
      if (resolution[d] < 1) fail(ErrorCode::InvalidArgument, "grid resolution must be positive");
      total *= static_cast<std::size_t>(resolution[d]);
      const int K = (resolution[d] - 1) / 2;
      q.exact_degree_.push_back(K);
      exact = std::min(exact, std::pow(2.0 * kPi * K / m.sides()[d], 2));
    }
    if (total > (std::size_t{1} << 26)) fail(ErrorCode::ResourceBudget, "quadrature grid too large");
    q.exactness_lambda_ = exact;
    q.weights_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(total), m.volume() / static_cast<double>(total));
    return q;
  }
  case ManifoldKind::Sphere: {
    if (resolution.size() != 2) fail(ErrorCode::InvalidArgument, "sphere resolution is {n_theta, n_phi}");
    const int nt = resolution[0], np = resolution[1];
    if (nt < 1 || np < 1) fail(ErrorCode::InvalidArgument, "sphere resolution must be positive");
    q.layout_ = QuadratureLayout::SphereGaussLegendre;
    q.shape_ = resolution;
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    q.cos_theta_ = x;
    q.weights_.resize(static_cast<Eigen::Index>(nt) * np);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < np; ++j) q.weights_[static_cast<Eigen::Index>(i) * np + j] = w[i] * 2.0 * kPi / np;
    const int L = std::min(nt - 1, (np - 1) / 2);
    q.exact_degree_ = {L};
    q.exactness_lambda_ = L < 0 ? -1.0 : static_cast<double>(L) * (L + 1);
    return q;
  }
  case ManifoldKind::Mesh: {
    q.layout_ = QuadratureLayout::MeshVertices;
    q.weights_ = m.surrogate().mass;
    q.shape_ = {static_cast<int>(q.weights_.size())};
    q.exactness_lambda_ = std::numeric_limits<double>::infinity();
    return q;
  }
  }
  return q;
}

std::vector<int> resolution_for_band(const Manifold& m, double lambda) {
  switch (m.kind()) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus: {
    std::vector<int> res;
    for (int d = 0; d < m.dimension(); ++d) {
      const double K = std::floor(std::sqrt(std::max(lambda, 0.0)) * m.sides()[d] / (2.0 * kPi) + 1e-9);
      res.push_back(fast_fft_size(2 * static_cast<int>(K) + 1));
    }
    return res;
  }
  case ManifoldKind::Sphere: {
    int L = 0;
    while (static_cast<double>(L + 1) * (L + 2) <= lambda * (1 + 1e-14)) ++L;
    return {L + 1, fast_fft_size(2 * L + 1)};
  }
  case ManifoldKind::Mesh:
    return {};
  }
  return {};
}

void require_exactness(const Quadrature& q, const SpectralBasis& basis, std::size_t count, const char* context) {
  if (count == 0) return;
  if (q.manifold().kind() != basis.manifold().kind() || q.manifold().volume() != basis.manifold().volume())
    fail(ErrorCode::InvalidArgument, std::string(context) + ": quadrature and basis live on different manifolds");
  const double top = basis.eigenvalue(count - 1);
  if (top > q.exactness_lambda() * (1 + 1e-12))
    fail(ErrorCode::BandInsufficient, std::string(context) + ": quadrature exact up to lambda=" +
                                          std::to_string(q.exactness_lambda()) + " but the band reaches " +
                                          std::to_string(top));
}

Point Quadrature::node(std::size_t j) const {
  switch (layout_) {
  case QuadratureLayout::UniformGrid: {
    Point p;
    std::size_t rem = j;
    for (int d = manifold_.dimension() - 1; d >= 0; --d) {
      const std::size_t n = static_cast<std::size_t>(shape_[d]);
      const std::size_t i = rem % n;
      rem /= n;
      p.x[d] = manifold_.sides()[d] * static_cast<double>(i) / static_cast<double>(n);
    }
    return p;
  }
  case QuadratureLayout::SphereGaussLegendre: {
    const std::size_t np = static_cast<std::size_t>(shape_[1]);
    const std::size_t i = j / np, k = j % np;
    const double ct = cos_theta_[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(np);
    Point p;
    p.x = {st * std::cos(phi), st * std::sin(phi), ct};
    return p;
  }
  case QuadratureLayout::MeshVertices:
    return mesh_point(manifold_, static_cast<int>(j));
  }
  return {};
}

Eigen::VectorXd Quadrature::distances_from(const Point& x) const {
  Eigen::VectorXd d(weights_.size());
  if (layout_ == QuadratureLayout::MeshVertices) {
    manifold_.validate(x);
    d = manifold_.surrogate().distances.row(x.vertex).transpose();
    return d;
  }
  for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = manifold_.distance(x, node(static_cast<std::size_t>(j)));
  return d;
}

double Quadrature::integrate(const Eigen::Ref<const Eigen::VectorXd>& values) const {
  if (values.size() != weights_.size()) fail(ErrorCode::InvalidArgument, "integrate: size mismatch");
  return weights_.dot(values);
}

double Quadrature::norm(const Eigen::Ref<const Eigen::VectorXd>& values, double p) const {
  if (values.size() != weights_.size()) fail(ErrorCode::InvalidArgument, "norm: size mismatch");
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  if (p == 1.0) return weights_.dot(values.cwiseAbs());
  if (p == 2.0) return std::sqrt(weights_.dot(values.cwiseAbs2()));
  return std::pow(weights_.dot(values.cwiseAbs().array().pow(p).matrix()), 1.0 / p);
}

} // namespace widthlab
