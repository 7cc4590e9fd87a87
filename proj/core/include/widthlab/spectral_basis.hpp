#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "widthlab/manifold.hpp"

namespace widthlab {

enum class ModeParity : std::int8_t { Constant, Cosine, Sine, Harmonic, MeshVector };

struct Mode {
  double eigenvalue = 0.0;
  std::array<std::int32_t, 3> k{}; // frequency vector (circle/torus), (l, m) (sphere), index (mesh)
  ModeParity parity = ModeParity::Constant;
  std::int32_t group = 0; // multiplicity group: index of the distinct eigenvalue
};

class SpectralBasis {
public:
  SpectralBasis(Manifold manifold, std::vector<Mode> modes, double lambda_max);

  const Manifold& manifold() const { return manifold_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t l) const { return modes_[l]; }
  double eigenvalue(std::size_t l) const { return modes_[l].eigenvalue; }
  const std::vector<Mode>& modes() const { return modes_; }
  // Cutoff requested at construction; every eigenvalue <= lambda_max is present.
  double lambda_max() const { return lambda_max_; }
  int sphere_degree() const { return sphere_degree_; }

  // Number of modes with eigenvalue <= t (tolerant to rounding of t).
  std::size_t count_le(double t) const;

  double evaluate(std::size_t l, const Point& x) const;
  // u_l(x) for l < count.
  Eigen::VectorXd evaluate_all(const Point& x, std::size_t count) const;

private:
  Manifold manifold_;
  std::vector<Mode> modes_;
  double lambda_max_;
  int sphere_degree_ = -1;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

struct SpectralOptions {
  std::size_t max_modes = std::size_t{1} << 24; // memory budget
};

BasisPtr spectral_data(const Manifold& m, double lambda_max, const SpectralOptions& options = {});

std::size_t weyl_count(const SpectralBasis& basis, double t);
double weyl_leading(const Manifold& m, double t);
// Volume of the unit ball in R^s.
double unit_ball_volume(int s);

// Fully normalized associated Legendre values pbar(l, m) for 0 <= m <= l <= L,
// stored at index l*(l+1)/2 + m; the real spherical harmonic of degree l and
// order m != 0 is sqrt(2) * pbar(l,|m|) * cos/sin(|m| phi).
void normalized_legendre(double cos_theta, int L, std::vector<double>& out);

} // namespace widthlab
