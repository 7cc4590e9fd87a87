#include <complex>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/quadrature.hpp"
#include "fftw_lock.hpp"

namespace widthlab {

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

constexpr double kPi = std::numbers::pi;

// In-place complex FFT on a row-major grid; FFTW planning is serialized.
class FftGrid {
public:
  FftGrid(const std::vector<int>& shape, int sign) {
    std::size_t total = 1;
    for (int n : shape) total *= static_cast<std::size_t>(n);
    size_ = total;
    data_ = fftw_alloc_complex(total);
    if (!data_) fail(ErrorCode::ResourceBudget, "FFT buffer allocation failed");
    std::memset(data_, 0, sizeof(fftw_complex) * total);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), data_, data_, sign, FFTW_ESTIMATE);
    if (!plan_) fail(ErrorCode::NumericalFailure, "FFT planning failed");
  }
  ~FftGrid() {
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(data_);
  }
  FftGrid(const FftGrid&) = delete;
  FftGrid& operator=(const FftGrid&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
  std::size_t size() const { return size_; }
  void execute() { fftw_execute(plan_); }

private:
  fftw_complex* data_ = nullptr;
  fftw_plan plan_ = nullptr;
  std::size_t size_ = 0;
};

std::size_t wrap(std::int64_t k, int n) {
  std::int64_t r = k % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

std::size_t grid_index(const Mode& md, const std::vector<int>& shape, bool negate) {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < shape.size(); ++d) {
    const std::int64_t k = negate ? -static_cast<std::int64_t>(md.k[d]) : md.k[d];
    idx = idx * static_cast<std::size_t>(shape[d]) + wrap(k, shape[d]);
  }
  return idx;
}

void check_pair(const SpectralBasis& basis, const Quadrature& q) {
  const Manifold& a = basis.manifold();
  const Manifold& b = q.manifold();
  bool same = a.kind() == b.kind() && a.dimension() == b.dimension() && a.sides() == b.sides();
  if (same && a.kind() == ManifoldKind::Mesh) same = a.surrogate_ptr() == b.surrogate_ptr();
  if (!same) fail(ErrorCode::InvalidArgument, "basis and quadrature refer to different manifolds");
}

Eigen::VectorXd grid_synthesize(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& c) {
  FftGrid grid(q.shape(), FFTW_BACKWARD);
  auto* z = grid.data();
  const double vol = basis.manifold().volume();
  const double amp = std::sqrt(2.0 / vol);
  for (Eigen::Index l = 0; l < c.size(); ++l) {
    const Mode& md = basis.mode(static_cast<std::size_t>(l));
    const double v = c[l];
    if (v == 0.0) continue;
    if (md.parity == ModeParity::Constant) {
      z[0] += v / std::sqrt(vol);
      continue;
    }
    const std::size_t ip = grid_index(md, q.shape(), false);
    const std::size_t im = grid_index(md, q.shape(), true);
    const double h = 0.5 * amp * v;
    if (md.parity == ModeParity::Cosine) {
      z[ip] += h;
      z[im] += h;
    } else {
      z[ip] += std::complex<double>(0.0, -h);
      z[im] += std::complex<double>(0.0, h);
    }
  }
  grid.execute();
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) out[static_cast<Eigen::Index>(j)] = z[j].real();
  return out;
}

Eigen::VectorXd grid_analyze(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& v,
                             std::size_t count) {
  FftGrid grid(q.shape(), FFTW_FORWARD);
  auto* z = grid.data();
  for (std::size_t j = 0; j < grid.size(); ++j) z[j] = v[static_cast<Eigen::Index>(j)];
  grid.execute();
  const double vol = basis.manifold().volume();
  const double amp = std::sqrt(2.0 / vol);
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  for (std::size_t l = 0; l < count; ++l) {
    const Mode& md = basis.mode(l);
    if (md.parity == ModeParity::Constant) {
      out[static_cast<Eigen::Index>(l)] = z[0].real() / std::sqrt(vol);
      continue;
    }
    // sum_j v_j e^{-i theta_j}: real part is the cosine sum, minus imaginary the sine sum.
    const std::complex<double> V = z[grid_index(md, q.shape(), false)];
    out[static_cast<Eigen::Index>(l)] = md.parity == ModeParity::Cosine ? amp * V.real() : -amp * V.imag();
  }
  return out;
}

// Slot of (l, m) in a dense (L+1)^2 table.
std::size_t sh_slot(int l, int m) { return static_cast<std::size_t>(l * l + l + m); }

int sphere_degree_of(const SpectralBasis& basis, std::size_t count) {
  int L = 0;
  for (std::size_t l = 0; l < count; ++l) L = std::max(L, static_cast<int>(basis.mode(l).k[0]));
  return L;
}

Eigen::VectorXd sphere_synthesize(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& c) {
  const std::size_t count = static_cast<std::size_t>(c.size());
  const int L = sphere_degree_of(basis, count);
  std::vector<double> dense(static_cast<std::size_t>((L + 1) * (L + 1)), 0.0);
  for (std::size_t l = 0; l < count; ++l) dense[sh_slot(basis.mode(l).k[0], basis.mode(l).k[1])] = c[static_cast<Eigen::Index>(l)];
  const int nt = q.shape()[0], np = q.shape()[1];
  Eigen::VectorXd out(static_cast<Eigen::Index>(nt) * np);
  FftGrid ring({np}, FFTW_BACKWARD);
  auto* z = ring.data();
  std::vector<double> p;
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < nt; ++i) {
    normalized_legendre(q.cos_theta()[static_cast<std::size_t>(i)], L, p);
    for (int j = 0; j < np; ++j) z[j] = 0.0;
    for (int m = 0; m <= L; ++m) {
      double A = 0.0, B = 0.0;
      for (int l = m; l <= L; ++l) {
        const double pl = p[static_cast<std::size_t>(l * (l + 1) / 2 + m)];
        A += dense[sh_slot(l, m)] * pl;
        if (m > 0) B += dense[sh_slot(l, -m)] * pl;
      }
      if (m == 0) {
        z[0] += A;
        continue;
      }
      A *= r2;
      B *= r2;
      z[wrap(m, np)] += std::complex<double>(0.5 * A, -0.5 * B);
      z[wrap(-m, np)] += std::complex<double>(0.5 * A, 0.5 * B);
    }
    ring.execute();
    for (int j = 0; j < np; ++j) out[static_cast<Eigen::Index>(i) * np + j] = z[j].real();
  }
  return out;
}

Eigen::VectorXd sphere_analyze(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& v,
                               std::size_t count) {
  const int L = sphere_degree_of(basis, count);
  std::vector<double> dense(static_cast<std::size_t>((L + 1) * (L + 1)), 0.0);
  const int nt = q.shape()[0], np = q.shape()[1];
  FftGrid ring({np}, FFTW_FORWARD);
  auto* z = ring.data();
  std::vector<double> p;
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) z[j] = v[static_cast<Eigen::Index>(i) * np + j];
    ring.execute();
    normalized_legendre(q.cos_theta()[static_cast<std::size_t>(i)], L, p);
    for (int m = 0; m <= L; ++m) {
      const std::complex<double> V = z[wrap(m, np)];
      const double cs = V.real(), sn = -V.imag();
      for (int l = m; l <= L; ++l) {
        const double pl = p[static_cast<std::size_t>(l * (l + 1) / 2 + m)];
        if (m == 0) {
          dense[sh_slot(l, 0)] += pl * cs;
        } else {
          dense[sh_slot(l, m)] += r2 * pl * cs;
          dense[sh_slot(l, -m)] += r2 * pl * sn;
        }
      }
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  for (std::size_t l = 0; l < count; ++l) out[static_cast<Eigen::Index>(l)] = dense[sh_slot(basis.mode(l).k[0], basis.mode(l).k[1])];
  return out;
}

} // namespace

Eigen::VectorXd synthesize(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  check_pair(basis, q);
  if (static_cast<std::size_t>(coeffs.size()) > basis.size())
    fail(ErrorCode::BandInsufficient, "synthesize: more coefficients than materialized modes");
  switch (q.layout()) {
  case QuadratureLayout::UniformGrid:
    return grid_synthesize(basis, q, coeffs);
  case QuadratureLayout::SphereGaussLegendre:
    return sphere_synthesize(basis, q, coeffs);
  case QuadratureLayout::MeshVertices:
    return basis.manifold().surrogate().spectrum.eigenvectors.leftCols(coeffs.size()) * coeffs;
  }
  return {};
}

Eigen::VectorXd analyze(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& values,
                        std::size_t count) {
  check_pair(basis, q);
  if (static_cast<std::size_t>(values.size()) != q.size()) fail(ErrorCode::InvalidArgument, "analyze: value count mismatch");
  if (count > basis.size()) fail(ErrorCode::BandInsufficient, "analyze: more modes than materialized");
  switch (q.layout()) {
  case QuadratureLayout::UniformGrid:
    return grid_analyze(basis, q, values, count);
  case QuadratureLayout::SphereGaussLegendre:
    return sphere_analyze(basis, q, values, count);
  case QuadratureLayout::MeshVertices:
    return basis.manifold().surrogate().spectrum.eigenvectors.leftCols(static_cast<Eigen::Index>(count)).transpose() * values;
  }
  return {};
}

} // namespace widthlab
