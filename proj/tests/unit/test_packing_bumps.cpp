#include <gtest/gtest.h>

#include <cmath>

#include "widthlab/bumps.hpp"
#include "widthlab/errors.hpp"
#include "widthlab/packing.hpp"
#include "widthlab/rate_lab.hpp"

using namespace widthlab;

namespace {

void check_packing(const Manifold& m, const BallPacking& pk) {
  const double rho = pk.rho;
  EXPECT_NEAR(rho, std::pow(pk.N, -1.0 / m.dimension()), 1e-15);
  double min_d = 1e300;
  for (std::size_t i = 0; i < pk.size(); ++i)
    for (std::size_t j = i + 1; j < pk.size(); ++j) min_d = std::min(min_d, m.distance(pk.centers[i], pk.centers[j]));
  EXPECT_GT(min_d, 2 * rho);
  EXPECT_NEAR(min_d, pk.min_center_distance, 1e-12);
  EXPECT_LE(pk.covering_radius, 3 * rho);
}

} // namespace

TEST(Packing, CircleTorusSphereInvariants) {
  for (const char* kind : {"circle", "torus", "sphere"}) {
    const Manifold m = make_manifold(kind, {});
    for (int N : {8, 32}) {
      const double rho = packing_radius(m, N);
      const Quadrature q = build_quadrature(m, m.kind() == ManifoldKind::Sphere ? std::vector<int>{16, 32}
                                                                                  : resolution_for_band(m, 1.0));
      std::vector<int> res;
      for (double side : m.sides()) res.push_back(static_cast<int>(std::ceil(4.0 * side / rho * 1.01)) + 1);
      const Quadrature grid = m.kind() == ManifoldKind::Sphere ? q : build_quadrature(m, res);
      const BallPacking pk = greedy_packing(m, N, default_candidates(grid, rho));
      SCOPED_TRACE(std::string(kind) + " N=" + std::to_string(N));
      check_packing(m, pk);
    }
  }
}

TEST(Packing, RejectsCoarseCandidatesAndHugeBalls) {
  const Manifold m = make_manifold("circle", {});
  const Quadrature coarse = build_quadrature(m, {16});
  EXPECT_THROW(default_candidates(coarse, packing_radius(m, 64)), Error);
  EXPECT_THROW(packing_radius(m, 0), Error);
}

TEST(Bumps, LpNormsAndUnitSampling) {
  Eigen::VectorXd a(4);
  a << 3, -4, 0, 0;
  EXPECT_NEAR(lp_norm(a, 1), 7, 1e-15);
  EXPECT_NEAR(lp_norm(a, 2), 5, 1e-15);
  EXPECT_NEAR(lp_norm(a, HUGE_VAL), 4, 1e-15);
  CounterRng rng(3);
  for (double p : {1.0, 1.5, 2.0, 4.0, HUGE_VAL}) EXPECT_NEAR(lp_norm(random_lp_unit(rng, 9, p), p), 1.0, 1e-12) << p;
}

class CircleBumps : public ::testing::Test {
protected:
  static BumpFamily& family() {
    static BumpFamily f(make_manifold("circle", {}));
    return f;
  }
};

TEST_F(CircleBumps, SupportsInsideBallsAndProjectionExact) {
  const BumpSystem& sys = family().system(32, Rational(0));
  EXPECT_TRUE(sys.support().inside);
  EXPECT_LE(sys.support().support_radius, sys.packing().rho);
  EXPECT_NEAR(sys.t(), sys.packing().rho / (2 * family().C0()), 1e-15);
  CounterRng rng(5);
  const Eigen::VectorXd a = rng.normal_vector(static_cast<Eigen::Index>(sys.size()));
  const Eigen::VectorXd back = sys.project(sys.synthesize(a));
  EXPECT_LT((back - a).cwiseAbs().maxCoeff(), 1e-10 * a.cwiseAbs().maxCoeff());
  // Disjoint supports: the local and spectral syntheses agree.
  EXPECT_LT((sys.synthesize(a) - sys.synthesize_local(a)).cwiseAbs().maxCoeff(), 1e-8 * sys.synthesize(a).cwiseAbs().maxCoeff());
}

TEST_F(CircleBumps, NormEquivalenceAndEpsilon) {
  const BumpSystem& sys = family().system(16, Rational(1));
  const NormEquivalence ne = norm_equivalence(sys, 2.0, 1, 50);
  EXPECT_GT(ne.m, 0.0);
  EXPECT_LE(ne.m, ne.M);
  const EpsilonCertificate eps = epsilon_embedding(sys, 2.0, 1, 100, 2);
  EXPECT_GT(eps.epsilon, 0.0);
  EXPECT_LE(eps.max_sobolev * eps.epsilon, 1.0 + 1e-12);
  EXPECT_LE(eps.spectral_check, 1.0 + 1e-9);
  EXPECT_GE(projection_constant(sys), measured_projection_ratio(sys, 2.0, 1, 8) * (1 - 1e-12));
}
