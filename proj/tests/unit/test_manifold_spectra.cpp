#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "widthlab/errors.hpp"
#include "widthlab/kernel.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/spectral_basis.hpp"

using namespace widthlab;
constexpr double kPi = std::numbers::pi;

TEST(Manifold, GeometryOfDefaults) {
  const Manifold c = make_manifold("circle", {});
  EXPECT_EQ(c.dimension(), 1);
  EXPECT_NEAR(c.volume(), 2 * kPi, 1e-14);
  EXPECT_NEAR(c.diameter(), kPi, 1e-14);
  const Manifold t = make_manifold("torus", {});
  EXPECT_EQ(t.dimension(), 2);
  EXPECT_NEAR(t.volume(), 4 * kPi * kPi, 1e-12);
  const Manifold s = make_manifold("sphere", {});
  EXPECT_NEAR(s.volume(), 4 * kPi, 1e-14);
  EXPECT_NEAR(s.diameter(), kPi, 1e-14);
  EXPECT_THROW(make_manifold("klein", {}), Error);
}

TEST(Manifold, DistancesWrapAndAreSymmetric) {
  const Manifold c = make_manifold("circle", {});
  EXPECT_NEAR(c.distance(circle_point(0.1), circle_point(2 * kPi - 0.1)), 0.2, 1e-14);
  const Manifold t = make_manifold("torus", {});
  EXPECT_NEAR(t.distance(torus_point(0.1, 0.1), torus_point(2 * kPi - 0.2, 0.5)), 0.5, 1e-14);
  const Manifold s = make_manifold("sphere", {});
  const Point n = sphere_point(0, 0), q = sphere_point(kPi / 2, 1.0), south = sphere_point(kPi, 0);
  EXPECT_NEAR(s.distance(n, q), kPi / 2, 1e-14);
  EXPECT_NEAR(s.distance(n, south), kPi, 1e-14);
  EXPECT_NEAR(s.distance(q, n), s.distance(n, q), 0.0);
}

TEST(SpectralBasis, CircleCountsMatchLattice) {
  const BasisPtr b = spectral_data(make_manifold("circle", {}), 400);
  for (double t : {0.5, 1.0, 10.0, 99.0, 400.0}) {
    const std::size_t expected = 2 * static_cast<std::size_t>(std::floor(std::sqrt(t))) + 1;
    EXPECT_EQ(b->count_le(t), expected) << t;
  }
  EXPECT_DOUBLE_EQ(b->eigenvalue(0), 0.0);
  for (std::size_t l = 1; l < b->size(); ++l) EXPECT_LE(b->eigenvalue(l - 1), b->eigenvalue(l));
}

TEST(SpectralBasis, TorusCountsMatchBruteForceLattice) {
  const BasisPtr b = spectral_data(make_manifold("torus", {}), 300);
  for (double t : {1.0, 2.0, 25.0, 300.0}) {
    std::size_t count = 0;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j)
        if (i * i + j * j <= t) ++count;
    EXPECT_EQ(b->count_le(t), count) << t;
  }
}

TEST(SpectralBasis, SphereDegreesAndMultiplicities) {
  const BasisPtr b = spectral_data(make_manifold("sphere", {}), 110);
  for (int l = 0; l <= 9; ++l) EXPECT_EQ(b->count_le(l * (l + 1.0)), static_cast<std::size_t>((l + 1) * (l + 1)));
}

TEST(SpectralBasis, OrthonormalUnderExactQuadrature) {
  for (const char* kind : {"circle", "torus", "sphere"}) {
    const Manifold m = make_manifold(kind, {});
    const BasisPtr b = spectral_data(m, 60);
    const Quadrature q = build_quadrature(m, resolution_for_band(m, 60));
    const std::size_t n = b->size();
    Eigen::MatrixXd U(q.size(), n);
    for (std::size_t j = 0; j < q.size(); ++j) U.row(j) = b->evaluate_all(q.node(j), n).transpose();
    const Eigen::MatrixXd G = U.transpose() * q.weights().asDiagonal() * U;
    EXPECT_LT((G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-11) << kind;
  }
}

TEST(SpectralBasis, SynthesizeAndAnalyzeAreAdjoint) {
  const Manifold m = make_manifold("sphere", {});
  const BasisPtr b = spectral_data(m, 42);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, 42));
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(b->size()), -1, 1);
  const Eigen::VectorXd v = synthesize(*b, q, c);
  const Eigen::VectorXd back = analyze(*b, q, q.weights().cwiseProduct(v), b->size());
  EXPECT_LT((back - c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralBasis, SpectralFunctionIsConstantOnHomogeneousSpaces) {
  // sum_l u_l(x)^2 over a full eigenspace equals (multiplicity) / volume.
  const Manifold m = make_manifold("sphere", {});
  const BasisPtr b = spectral_data(m, 30);
  for (const Point& x : {sphere_point(0.3, 1.0), sphere_point(2.0, -0.5)})
    EXPECT_NEAR(spectral_function(*b, 30.0, x), 36.0 / (4 * kPi), 1e-12);
}

TEST(SpectralBasis, WeylLeadingTermCircle) {
  const Manifold m = make_manifold("circle", {});
  // vol * omega_1 * sqrt(t) / (2 pi) = 2 sqrt(t).
  EXPECT_NEAR(weyl_leading(m, 400.0), 40.0, 1e-12);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-14);
}

TEST(SpectralBasis, BudgetIsEnforced) {
  SpectralOptions o;
  o.max_modes = 100;
  EXPECT_THROW(spectral_data(make_manifold("torus", {}), 1e4, o), Error);
}
