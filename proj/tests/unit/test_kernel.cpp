#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "widthlab/kernel.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/scans.hpp"

using namespace widthlab;
constexpr double kPi = std::numbers::pi;

namespace {

double bump(double s, double Lambda) {
  const double u = s / Lambda;
  return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
}

KernelJob circle_job(double t, double Lambda = 1.0) {
  const FilterFunction F = make_filter(Lambda, 1.0, 2.0, 0, 1e-12);
  const Manifold m = make_manifold("circle", {});
  return KernelJob(spectral_data(m, F.lambda_tail() / (t * t) * 1.0001), F, t);
}

} // namespace

TEST(Kernel, CircleKernelMatchesFourierSeries) {
  const KernelJob job = circle_job(0.125);
  const FilterFunction& F = job.filter();
  for (double d : {0.0, 0.05, 0.2, 1.0, 3.0}) {
    double ref = F(0.0) / (2 * kPi);
    for (int k = 1; k * k * 0.125 * 0.125 <= F.lambda_tail(); ++k) ref += F(0.015625 * k * k) * std::cos(k * d) / kPi;
    EXPECT_NEAR(kernel_eval(job, circle_point(0.4), circle_point(0.4 + d)), ref, 1e-10) << d;
  }
}

TEST(Kernel, CircleKernelEqualsRescaledFourierProfile) {
  // For Lambda t < pi the periodized wave kernel is (1/t) hat(d/t).
  for (double t : {0.25, 0.125, 0.0625}) {
    const KernelJob job = circle_job(t);
    for (double d : {0.0, 0.3 * t, 0.7 * t, 0.99 * t, 1.5 * t, 2.0}) {
      const double ref = bump(d / t, 1.0) / t;
      EXPECT_NEAR(kernel_eval(job, circle_point(1.0), circle_point(1.0 + d)), ref, 1e-8 / t) << t << " " << d;
    }
  }
}

TEST(Kernel, SymmetricAndCertified) {
  const KernelJob job = circle_job(0.1, 1.5);
  const Point x = circle_point(0.3), y = circle_point(0.41);
  EXPECT_NEAR(kernel_eval(job, x, y), kernel_eval(job, y, x), 1e-14);
  EXPECT_GT(job.mode_count(), 0u);
  EXPECT_LT(job.certificate().tail_bound, 1e-8);
}

TEST(Kernel, RowNormsAgreeWithSpectralL2) {
  for (const char* kind : {"circle", "torus", "sphere"}) {
    const Manifold m = make_manifold(kind, {});
    const FilterFunction F = make_filter(1.0, 1.0, 2.0, 0, 1e-6);
    const double t = 0.25;
    const double cut = F.lambda_tail() / (t * t);
    const KernelJob job(spectral_data(m, cut * 1.0001), F, t);
    const Quadrature q = build_quadrature(m, resolution_for_band(m, cut));
    const Point x = m.kind() == ManifoldKind::Sphere ? sphere_point(0.7, 0.2) : torus_point(0.3, 0.1);
    const RowNorms n = kernel_row_norms(job, x, q);
    EXPECT_NEAR(n.l2, n.l2_spectral, 1e-9 * n.l2_spectral) << kind;
    EXPECT_LE(n.l2 * n.l2, n.l1 * n.linf * (1 + 1e-12)) << kind;
  }
}

TEST(Kernel, PropagationRadiusWithinLambdaT) {
  const Manifold m = make_manifold("circle", {});
  const double t = 0.0625;
  const KernelJob job = circle_job(t, 1.0);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, job.certificate().lambda_cut));
  const PropagationReport r = measure_propagation(job, {circle_point(0.0), circle_point(2.0)}, 0.0, q);
  EXPECT_FALSE(r.falsified);
  EXPECT_GT(r.measured_radius, 0.5 * t);
  EXPECT_LE(r.measured_radius, t);
}

TEST(Kernel, CirclePropagationAtTail1e10) {
  const FilterFunction F = make_filter(1.0, 1.0, 2.0, 0, 1e-10);
  const Manifold m = make_manifold("circle", {});
  const double t = 1.0 / 16.0;
  const KernelJob job(spectral_data(m, F.lambda_tail() / (t * t) * 1.0001), F, t);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, job.certificate().lambda_cut));
  const PropagationReport r = measure_propagation(job, {circle_point(0.0), circle_point(1.0)}, 0.0, q);
  EXPECT_FALSE(r.falsified);
  EXPECT_LE(r.measured_radius, 1.1 / 16.0);
}

TEST(Kernel, PropagationVacuousAboveSupNorm) {
  const KernelJob job = circle_job(0.0625);
  const Manifold& m = job.basis().manifold();
  const Quadrature q = build_quadrature(m, resolution_for_band(m, job.certificate().lambda_cut));
  const PropagationReport probe = measure_propagation(job, {circle_point(0.0)}, 0.0, q);
  const PropagationReport r = measure_propagation(job, {circle_point(0.0)}, 2.0 * probe.max_abs_kernel, q);
  EXPECT_EQ(r.measured_radius, 0.0);
}

TEST(Kernel, CosineWaveIdentityHolds) {
  const KernelJob job = circle_job(0.2);
  Eigen::VectorXd h = Eigen::VectorXd::Ones(41);
  const CosineWaveResult r = cosine_wave_check(job.basis(), job.filter(), 0.2, h);
  EXPECT_LT(r.residual, 1e-9);
}

TEST(Kernel, CompensatedSumRecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0);
}

TEST(Scans, GeometricGridAndClustering) {
  const auto g = geometric_grid(1.0, 16.0, 2.0);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 16.0);
  Eigen::VectorXd v(7);
  v << 0.0, 2.0, 2.01, 1.99, 6.0, 6.1, 5.95;
  std::sort(v.data(), v.data() + v.size());
  const auto groups = cluster_eigenvalues(v, 0.05);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].multiplicity, 1);
  EXPECT_EQ(groups[1].multiplicity, 3);
  EXPECT_EQ(groups[2].multiplicity, 3);
}

TEST(Scans, WeylRatioNearOneOnTorus) {
  const BasisPtr b = spectral_data(make_manifold("torus", {}), 2000);
  const WeylScan s = weyl_scan(*b, {500, 1000, 2000});
  for (const auto& r : s.rows) EXPECT_NEAR(r.ratio, 1.0, 0.05);
  EXPECT_NEAR(s.fit.slope, 1.0, 0.05);
}
