#include <gtest/gtest.h>

#include "widthlab/errors.hpp"
#include "widthlab/random.hpp"
#include "widthlab/rational.hpp"
#include "widthlab/stats.hpp"

using namespace widthlab;

TEST(Rational, ReducesAndNormalizesSign) {
  const Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
}

TEST(Rational, ParsesFractionsAndDecimals) {
  EXPECT_EQ(Rational::parse("3/2"), Rational(3, 2));
  EXPECT_EQ(Rational::parse("-0.25"), Rational(-1, 4));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_THROW(Rational::parse("1/0"), Error);
  EXPECT_THROW(Rational::parse("abc"), Error);
}

TEST(LpIndex, OrdersByValueWithInfinityLargest) {
  const LpIndex one = LpIndex::parse("1"), two = LpIndex::parse("2"), inf = LpIndex::parse("inf");
  EXPECT_LT(one, two);
  EXPECT_LT(two, inf);
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_EQ(inf.inverse(), 0.0);
  EXPECT_EQ(LpIndex::parse("3/2").reciprocal(), Rational(2, 3));
  EXPECT_THROW(LpIndex::parse("1/2"), Error);
}

TEST(Rational, PositivePart) {
  EXPECT_EQ(positive_part(Rational(-1, 2)), Rational(0));
  EXPECT_EQ(positive_part(Rational(1, 2)), Rational(1, 2));
}

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  CounterRng d(42, 3);
  EXPECT_NE(d.next_u64(), c.next_u64());
  const CounterRng base(9);
  CounterRng s1 = base.substream(5), s2 = base.substream(5);
  EXPECT_EQ(s1.next_u64(), s2.next_u64());
}

TEST(CounterRng, UniformMomentsAreReasonable) {
  CounterRng rng(1);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.005);
}

TEST(Stats, LogLogFitRecoversPowerLaw) {
  std::vector<double> x, y;
  for (double v = 1; v <= 1024; v *= 2) {
    x.push_back(v);
    y.push_back(3.0 * std::pow(v, -1.5));
  }
  const LineFit f = fit_log_log(x, y);
  EXPECT_NEAR(f.slope, -1.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_NEAR(octave_span(x), 10.0, 1e-12);
}

TEST(Stats, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
