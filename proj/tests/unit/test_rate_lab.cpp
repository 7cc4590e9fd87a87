#include <gtest/gtest.h>

#include <cmath>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/rate_lab.hpp"

using namespace widthlab;

namespace {

LpIndex P(const char* s) { return LpIndex::parse(s); }

} // namespace

TEST(RateLab, AdmissibilityRequiresEmbedding) {
  EXPECT_TRUE(SobolevSpec::admissible(P("1"), P("inf"), Rational(2), 1));
  EXPECT_FALSE(SobolevSpec::admissible(P("1"), P("inf"), Rational(1), 1));
  EXPECT_FALSE(SobolevSpec::admissible(P("1"), P("inf"), Rational(1), 2));
  EXPECT_TRUE(SobolevSpec::admissible(P("inf"), P("1"), Rational(1, 10), 3));
  EXPECT_THROW(SobolevSpec::make(P("1"), P("inf"), Rational(1), 1), Error);
}

TEST(RateLab, CaseSelection) {
  EXPECT_EQ(main_theorem_case(SobolevSpec::make(P("inf"), P("1"), Rational(2), 1)), 1);
  EXPECT_EQ(main_theorem_case(SobolevSpec::make(P("1"), P("2"), Rational(2), 1)), 2);
  EXPECT_EQ(main_theorem_case(SobolevSpec::make(P("2"), P("inf"), Rational(2), 1)), 3);
  EXPECT_EQ(main_theorem_case(SobolevSpec::make(P("3/2"), P("3"), Rational(2), 1)), 4);
}

TEST(RateLab, LowerExponentsForCircleSpecs) {
  const auto lo = [](const char* p, const char* q, WidthKind k) {
    return theoretical_exponent(SobolevSpec::make(P(p), P(q), Rational(2), 1), k, BoundSide::Lower).value;
  };
  // q <= p: -r/s for every width.
  EXPECT_EQ(lo("inf", "1", WidthKind::Kolmogorov), Rational(-2));
  EXPECT_EQ(lo("2", "2", WidthKind::Linear), Rational(-2));
  // p <= q <= 2, Kolmogorov: -r/s + 1/p - 1/2.
  EXPECT_EQ(lo("1", "2", WidthKind::Kolmogorov), Rational(-3, 2));
  // 2 <= p <= q, Gelfand: -r/s + 1/2 - 1/q.
  EXPECT_EQ(lo("2", "inf", WidthKind::Gelfand), Rational(-3, 2));
}

TEST(RateLab, FitRateRecoversExponentAndRetries) {
  std::vector<RatePoint> pts;
  for (double n = 4; n <= 256; n *= 2) pts.push_back({n, 5.0 * std::pow(n, -1.25)});
  const RateFit f = fit_rate(pts);
  EXPECT_NEAR(f.exponent, -1.25, 1e-12);
  EXPECT_FALSE(f.retried);
  pts.front().value *= 30.0; // a pre-asymptotic first point
  const RateFit g = fit_rate(pts);
  EXPECT_TRUE(g.retried);
  EXPECT_NEAR(g.exponent, -1.25, 1e-12);
}

TEST(RateLab, FitRateNeedsThreeOctaves) {
  std::vector<RatePoint> pts{{8, 1}, {10, 0.8}, {12, 0.7}, {16, 0.5}};
  EXPECT_THROW(fit_rate(pts), Error);
  EXPECT_THROW(fit_rate({{1, 1}, {8, 0.1}, {16, 0.05}}), Error);
}

TEST(RateLab, ExactL2WidthOnCircle) {
  const BasisPtr b = spectral_data(make_manifold("circle", {}), 400);
  for (int n : {0, 1, 2, 5, 10}) {
    const double k = std::ceil(n / 2.0);
    EXPECT_NEAR(exact_L2_sobolev_width(*b, Rational(2), n), 1.0 / (1.0 + k * k), 1e-15) << n;
    EXPECT_NEAR(exact_L2_sobolev_width(*b, Rational(1), n), 1.0 / (1.0 + k), 1e-15) << n;
  }
}

TEST(RateLab, BruteForceNeverBeatsTheOracle) {
  const BasisPtr b = spectral_data(make_manifold("circle", {}), 100);
  for (int n = 0; n <= 3; ++n) {
    const L2BruteForce r = brute_force_L2_width(*b, Rational(2), n, 8, 20, 3);
    EXPECT_FALSE(r.beaten) << n;
    EXPECT_NEAR(r.first_n_deviation, r.oracle, 1e-8) << n;
    EXPECT_GE(r.best_random, r.oracle * (1 - 1e-9)) << n;
  }
}

TEST(RateLab, ChainedBoundRejectsTooFewBumps) {
  BumpFamily fam(make_manifold("circle", {}));
  const BumpSystem& sys = fam.system(8, Rational(2));
  const SobolevSpec spec = SobolevSpec::make(P("inf"), P("1"), Rational(2), 1);
  const int P_N = static_cast<int>(sys.size());
  EXPECT_THROW(chained_lower_bound(sys, spec, WidthKind::Kolmogorov, P_N / 2 + 1, 1), Error);
  EXPECT_EQ(chained_lower_bound(sys, spec, WidthKind::Kolmogorov, P_N, 1).estimate.value, 0.0);
  const ChainedLowerBound c = chained_lower_bound(sys, spec, WidthKind::Kolmogorov, P_N / 4, 1, {100, 2, 50});
  EXPECT_GT(c.estimate.value, 0.0);
  EXPECT_EQ(c.estimate.direction, Direction::Lower);
}

TEST(RateLab, MeshFamiliesAreUnsupported) {
  const auto sur = make_mesh_surrogate(icosphere(1), 8, 1);
  EXPECT_THROW(BumpFamily(Manifold::mesh(sur)), Error);
}
