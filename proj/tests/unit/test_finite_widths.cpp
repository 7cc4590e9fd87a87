#include <gtest/gtest.h>

#include <cmath>

#include "widthlab/errors.hpp"
#include "widthlab/finite_widths.hpp"
#include "widthlab/random.hpp"
#include "widthlab/width_optimizer.hpp"

using namespace widthlab;

namespace {

LpIndex P(const char* s) { return LpIndex::parse(s); }

Eigen::MatrixXd coordinate_frame(int m, int k) { return Eigen::MatrixXd::Identity(m, m).leftCols(k); }

} // namespace

TEST(FiniteWidths, CatalogClosedForms) {
  const auto w = exact_width({10, 3, P("inf"), P("1"), WidthKind::Kolmogorov});
  ASSERT_TRUE(w.has_value());
  EXPECT_DOUBLE_EQ(w->value, 7.0);
  EXPECT_DOUBLE_EQ(exact_width({10, 3, P("inf"), P("1"), WidthKind::Gelfand})->value, 7.0);
  EXPECT_NEAR(exact_width({8, 2, P("1"), P("2"), WidthKind::Kolmogorov})->value, std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(exact_width({8, 6, P("2"), P("inf"), WidthKind::Gelfand})->value, 0.5, 1e-15);
  EXPECT_NEAR(exact_width({9, 0, P("inf"), P("2"), WidthKind::Linear})->value, 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(exact_width({5, 5, P("1"), P("inf"), WidthKind::Gelfand})->value, 0.0);
  EXPECT_DOUBLE_EQ(exact_width({5, 2, P("3/2"), P("3/2"), WidthKind::Kolmogorov})->value, 1.0);
  EXPECT_FALSE(exact_width({6, 2, P("1"), P("inf"), WidthKind::Linear}).has_value());
}

TEST(FiniteWidths, DeviationOfCoordinateSubspaces) {
  const int m = 6;
  for (int k = 0; k < m; ++k) {
    const Eigen::MatrixXd U = coordinate_frame(m, k);
    EXPECT_NEAR(kolmogorov_deviation(U, P("inf"), P("1")), m - k, 1e-9) << k;
    EXPECT_NEAR(kolmogorov_deviation(U, P("1"), P("2")), 1.0, 1e-9) << k;
  }
  for (int k = 1; k <= m; ++k) {
    const Eigen::MatrixXd V = coordinate_frame(m, k);
    EXPECT_NEAR(gelfand_section_norm(V, P("inf"), P("1")), k, 1e-9) << k;
    EXPECT_NEAR(gelfand_section_norm(V, P("2"), P("inf")), 1.0, 1e-9) << k;
  }
}

TEST(FiniteWidths, PrimalAndDualInnerDistancesAgree) {
  CounterRng rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const int m = 5 + trial % 3, k = 1 + trial % 3;
    const Eigen::MatrixXd U = orthonormalize(rng.normal_matrix(m, k));
    for (auto [p, q] : {std::pair{"inf", "1"}, std::pair{"1", "2"}, std::pair{"1", "inf"}, std::pair{"inf", "inf"}}) {
      EXPECT_NEAR(kolmogorov_deviation(U, P(p), P(q)), kolmogorov_deviation_dual(U, P(p), P(q)), 1e-8)
          << p << " " << q << " trial " << trial;
      EXPECT_NEAR(gelfand_section_norm(U, P(p), P(q)), gelfand_section_norm_lp(U, P(p), P(q)), 1e-8)
          << p << " " << q << " trial " << trial;
    }
  }
}

TEST(FiniteWidths, OptimizerReproducesClosedFormsSmall) {
  for (int n = 0; n <= 4; ++n) {
    const FiniteBallProblem k{4, n, P("1"), P("2"), WidthKind::Kolmogorov};
    EXPECT_NEAR(kolmogorov_numeric(k, {}, 3).value, exact_width(k)->value, 1e-3) << n;
    const FiniteBallProblem g{4, n, P("inf"), P("1"), WidthKind::Gelfand};
    EXPECT_NEAR(gelfand_numeric(g, {}, 3).value, exact_width(g)->value, 1e-3) << n;
  }
}

TEST(FiniteWidths, OptimizerIsSeedDeterministic) {
  const FiniteBallProblem pr{5, 2, P("inf"), P("1"), WidthKind::Kolmogorov};
  EXPECT_EQ(kolmogorov_numeric(pr, {}, 9).value, kolmogorov_numeric(pr, {}, 9).value);
}

TEST(FiniteWidths, LinearLowerIsTheMaximum) {
  const auto k = *exact_width({6, 2, P("inf"), P("1"), WidthKind::Kolmogorov});
  auto g = k;
  g.problem.kind = WidthKind::Gelfand;
  g.value = 5.0;
  const WidthEstimate l = linear_lower(k, g);
  EXPECT_EQ(l.problem.kind, WidthKind::Linear);
  EXPECT_EQ(l.direction, Direction::Lower);
  EXPECT_DOUBLE_EQ(l.value, 5.0);
  EXPECT_THROW(linear_lower(g, k), Error);
}

TEST(FiniteWidths, HolderEmbeddingProperty) {
  CounterRng rng(101);
  const std::vector<std::pair<const char*, const char*>> pairs{{"1", "2"}, {"1", "inf"}, {"2", "inf"},
                                                               {"3/2", "3"}, {"1", "1"}};
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const int m = 1 + static_cast<int>(rng.uniform() * 12);
    Eigen::VectorXd a = rng.normal_vector(m);
    if (i % 7 == 0) a.setConstant(rng.normal()); // equality case
    if (i % 11 == 0) a = a.cwiseProduct(a).cwiseProduct(a);
    const auto& [al, al1] = pairs[static_cast<std::size_t>(i) % pairs.size()];
    const HolderCheck h = holder_embed_check(a, P(al), P(al1));
    ASSERT_TRUE(h.ok()) << "vector " << i << " alpha " << al << " alpha1 " << al1;
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
  EXPECT_THROW(holder_embed_check(Eigen::VectorXd::Ones(3), P("2"), P("1")), Error);
}

TEST(FiniteWidths, MonotonicityCheckFlagsIncrease) {
  std::vector<WidthEstimate> es;
  for (int n = 0; n <= 4; ++n) es.push_back(*exact_width({4, n, P("1"), P("2"), WidthKind::Kolmogorov}));
  EXPECT_TRUE(width_monotonicity_check(es).ok);
  es[3].value = 2.0;
  EXPECT_FALSE(width_monotonicity_check(es).ok);
}

TEST(WidthOptimizer, OrthonormalizeAndSoftMax) {
  CounterRng rng(4);
  const Eigen::MatrixXd Q = orthonormalize(rng.normal_matrix(7, 3));
  EXPECT_LT((Q.transpose() * Q - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::VectorXd v(3), w;
  v << 1.0, 3.0, 2.0;
  const double s = soft_max(v, 1e4, &w);
  EXPECT_NEAR(s, 3.0, 1e-3);
  EXPECT_GE(s, 3.0);
  EXPECT_NEAR(w.sum(), 1.0, 1e-14);
}
