#include <gtest/gtest.h>

#include <cmath>

#include "widthlab/errors.hpp"
#include "widthlab/filter.hpp"

using namespace widthlab;

namespace {

double bump(double s, double Lambda) {
  const double u = s / Lambda;
  return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
}

// int_{-Lambda}^{Lambda} bump(s) cos(s xi) ds by composite Simpson.
double psi_reference(double xi, double Lambda) {
  const int n = 40000;
  const double h = 2.0 * Lambda / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = -Lambda + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * bump(s, Lambda) * std::cos(s * xi);
  }
  return sum * h / 3.0;
}

} // namespace

TEST(Filter, MatchesDirectCosineIntegral) {
  for (double Lambda : {0.5, 1.0, 2.0}) {
    const FilterFunction F = make_filter(Lambda, 1.0, 2.0, 0, 1e-12);
    for (double lam : {0.0, 0.3, 1.0, 4.0, 17.0, 90.0, 400.0}) {
      const double ref = psi_reference(std::sqrt(lam), Lambda);
      EXPECT_NEAR(F(lam), ref, 1e-10 * F.sup_norm()) << "Lambda " << Lambda << " lambda " << lam;
    }
  }
}

TEST(Filter, PowerLiftMultipliesByLambdaToTheQ) {
  const FilterFunction F0 = make_filter(1.0, 1.0, 2.0, 0, 1e-12);
  const FilterFunction F2 = make_filter(1.0, 1.0, 2.0, 2, 1e-12);
  for (double lam : {0.5, 2.0, 9.0, 40.0}) EXPECT_NEAR(F2(lam), lam * lam * F0(lam), 1e-9 * F2.sup_norm()) << lam;
  // psi_2(0) is the integral of a derivative; the table reproduces it to rounding.
  EXPECT_NEAR(F2(0.0), 0.0, 1e-12 * F2.sup_norm());
}

TEST(Filter, FourierProfileIsCompactlySupported) {
  const FilterFunction F = make_filter(1.5, 1.0, 2.0, 0);
  EXPECT_EQ(F.hat(1.5), 0.0);
  EXPECT_EQ(F.hat(-2.0), 0.0);
  EXPECT_NEAR(F.hat(0.3), bump(0.3, 1.5), 1e-15);
}

TEST(Filter, TailEnvelopeBoundsValues) {
  const FilterFunction F = make_filter(1.0, 1.0, 2.0, 1, 1e-6);
  for (double lam = 1.0; lam < 5 * F.lambda_tail(); lam *= 1.37) {
    const double env = F.tail_envelope(lam);
    for (double mu = lam; mu < lam * 1.3; mu += lam * 0.01) EXPECT_LE(std::abs(F(mu)), env * (1 + 1e-9) + 1e-300);
  }
  for (double mu = F.lambda_tail(); mu < 4 * F.lambda_tail(); mu *= 1.001) ASSERT_LE(std::abs(F(mu)), F.tau()) << mu;
}

TEST(Filter, FractionalLiftScalesByLambdaPower) {
  const FilterFunction F = make_filter(1.0, 1.0, 2.0, 1, 1e-12);
  const FilterFunction G = fractional_filter(F, Rational(1));
  for (double lam : {0.5, 3.0, 11.0}) EXPECT_NEAR(G(lam), std::sqrt(lam) * F(lam), 1e-9 * G.sup_norm()) << lam;
  EXPECT_THROW(G.hat(0.1), Error);
}

TEST(Filter, RejectsBadParameters) {
  EXPECT_THROW(make_filter(0.0, 1.0, 2.0, 0), Error);
  EXPECT_THROW(make_filter(1.0, 2.0, 1.0, 0), Error);
  EXPECT_THROW(make_filter(1.0, 1.0, 2.0, -1), Error);
  EXPECT_THROW(make_filter(1.0, 1.0, 2.0, 0, 0.0), Error);
}

TEST(Filter, ChooseBandAndPowerLift) {
  const Band b = choose_band(1.0, 4.0, 2, 1.5);
  EXPECT_DOUBLE_EQ(b.a, 1.0);
  EXPECT_NEAR(b.b, 6.0, 1e-12);
  EXPECT_NO_THROW(choose_band(1.0, 1.0, 1, 2.0));
  EXPECT_THROW(choose_band(2.0, 1.0, 1, 2.0), Error);
  EXPECT_EQ(default_power_lift(Rational(3), 2), 5);
  EXPECT_EQ(default_power_lift(Rational(2), 1), 3);
}
