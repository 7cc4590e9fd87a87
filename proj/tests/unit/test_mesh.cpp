#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/scans.hpp"

using namespace widthlab;
constexpr double kPi = std::numbers::pi;

TEST(Mesh, IcosphereCountsAndArea) {
  for (int k = 0; k <= 3; ++k) {
    const TriangleMesh m = icosphere(k);
    const std::size_t f = 20u << (2 * k);
    EXPECT_EQ(m.faces.size(), f);
    EXPECT_EQ(m.vertices.size(), f / 2 + 2); // Euler characteristic 2
    EXPECT_NO_THROW(validate_closed_mesh(m));
  }
  EXPECT_NEAR(mesh_area(icosphere(4)), 4 * kPi, 0.01 * 4 * kPi);
}

TEST(Mesh, OffRoundTrip) {
  const TriangleMesh m = icosphere(1);
  const TriangleMesh back = parse_off(write_off(m));
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  ASSERT_EQ(back.faces, m.faces);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_LT((back.vertices[i] - m.vertices[i]).norm(), 1e-15);
}

TEST(Mesh, MalformedOffIsRejected) {
  EXPECT_THROW(parse_off("NOFF\n3 1 0\n"), Error);
  EXPECT_THROW(parse_off("OFF\n3 1 0\n0 0 0\n1 0\n"), Error);
  EXPECT_THROW(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"), Error);
  // An open mesh (one triangle) fails the closed-manifold check.
  try {
    parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    FAIL() << "open mesh accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Mesh, CotanLaplacianIsSymmetricWithZeroRowSums) {
  const MeshOperators ops = cotan_laplacian(icosphere(2));
  const Eigen::MatrixXd L = Eigen::MatrixXd(ops.stiffness);
  EXPECT_LT((L - L.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(ops.mass.sum(), mesh_area(icosphere(2)), 1e-12);
}

TEST(Mesh, LanczosMatchesDenseGeneralizedSolver) {
  const MeshOperators ops = cotan_laplacian(icosphere(2));
  const DiscreteSpectrum s = lanczos_eigs(ops, 16, 1);
  const Eigen::MatrixXd L = Eigen::MatrixXd(ops.stiffness);
  const Eigen::MatrixXd M = ops.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(L, M);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(s.eigenvalues[i], dense.eigenvalues()[i], 1e-8 * (1 + dense.eigenvalues()[i])) << i;
  const Eigen::MatrixXd G = s.eigenvectors.transpose() * M * s.eigenvectors;
  EXPECT_LT((G - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-9);
  for (int i = 0; i < 16; ++i) EXPECT_LT(s.residuals[i], 1e-8 * (1 + s.eigenvalues[i])) << i;
}

TEST(Mesh, GeodesicsAreAMetric) {
  const TriangleMesh m = icosphere(1);
  const Eigen::MatrixXd D = all_pairs_geodesics(m);
  const Eigen::Index n = D.rows();
  EXPECT_LT((D - D.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  for (Eigen::Index i = 0; i < n; ++i) {
    EXPECT_EQ(D(i, i), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      EXPECT_GE(D(i, j) + 1e-14, (m.vertices[i] - m.vertices[j]).norm());
      for (Eigen::Index k = 0; k < n; ++k) ASSERT_LE(D(i, k), D(i, j) + D(j, k) + 1e-12);
    }
  }
}

TEST(Mesh, SurrogateSpectrumApproachesSphericalHarmonics) {
  const auto sur = make_mesh_surrogate(icosphere(3), 16, 1);
  const auto groups = cluster_eigenvalues(sur->spectrum.eigenvalues, 0.05);
  ASSERT_GE(groups.size(), 4u);
  for (int l = 1; l <= 3; ++l) {
    EXPECT_NEAR(groups[l].mean, l * (l + 1.0), 0.05 * l * (l + 1.0));
    EXPECT_EQ(groups[l].multiplicity, 2 * l + 1);
  }
  const Manifold m = Manifold::mesh(sur);
  EXPECT_EQ(m.dimension(), 2);
  EXPECT_NEAR(m.volume(), sur->volume, 0.0);
  EXPECT_NEAR(m.distance(mesh_point(m, 0), mesh_point(m, 5)), sur->distances(0, 5), 0.0);
}
