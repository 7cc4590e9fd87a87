#pragma once

#include <vector>

#include <Eigen/Dense>

#include "widthlab/manifold.hpp"
#include "widthlab/spectral_basis.hpp"

namespace widthlab {

enum class QuadratureLayout { UniformGrid, SphereGaussLegendre, MeshVertices };

class Quadrature {
public:
  QuadratureLayout layout() const { return layout_; }
  const Manifold& manifold() const { return manifold_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  // Grid shape: samples per axis (uniform grid), (n_theta, n_phi) on the sphere.
  const std::vector<int>& shape() const { return shape_; }
  Point node(std::size_t j) const;
  // Nodes are stored implicitly; this materializes distances from x to all of them.
  Eigen::VectorXd distances_from(const Point& x) const;

  // Largest eigenvalue E such that products u_l u_m with lambda_l, lambda_m <= E
  // integrate exactly (infinite for mesh vertices).
  double exactness_lambda() const { return exactness_lambda_; }
  // Frequency / degree bound matching exactness_lambda, per axis.
  const std::vector<int>& exactness_degree() const { return exact_degree_; }
  const std::vector<double>& cos_theta() const { return cos_theta_; }

  // Integral by the rule.
  double integrate(const Eigen::Ref<const Eigen::VectorXd>& values) const;
  // (sum_j w_j |v_j|^p)^{1/p}; p = inf gives max |v_j|.
  double norm(const Eigen::Ref<const Eigen::VectorXd>& values, double p) const;

  friend Quadrature build_quadrature(const Manifold& m, const std::vector<int>& resolution);

private:
  QuadratureLayout layout_ = QuadratureLayout::UniformGrid;
  Manifold manifold_ = Manifold::sphere();
  std::vector<int> shape_;
  Eigen::VectorXd weights_;
  std::vector<double> cos_theta_;
  double exactness_lambda_ = 0.0;
  std::vector<int> exact_degree_;
};

// circle: {M}; torus: {M_1, ..., M_s}; sphere: {n_theta, n_phi}; mesh: ignored.
Quadrature build_quadrature(const Manifold& m, const std::vector<int>& resolution);

// Smallest resolution whose exactness covers every mode with eigenvalue <= lambda.
std::vector<int> resolution_for_band(const Manifold& m, double lambda);

// Throws BandInsufficient unless products of the first `count` modes are exact.
void require_exactness(const Quadrature& q, const SpectralBasis& basis, std::size_t count, const char* context);

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Fast transforms between spectral coefficients of the first coeffs.size()
// modes and node values. analyze is the exact adjoint of synthesize:
// out_l = sum_j values_j u_l(y_j), with no quadrature weights.
Eigen::VectorXd synthesize(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& coeffs);
Eigen::VectorXd analyze(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& values,
                        std::size_t count);

} // namespace widthlab
