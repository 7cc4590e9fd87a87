#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "widthlab/filter.hpp"
#include "widthlab/packing.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/random.hpp"
#include "widthlab/rational.hpp"
#include "widthlab/spectral_basis.hpp"

namespace widthlab {

struct BumpOptions {
  Rational r{0};             // Sobolev lift order; the lift uses G = lambda^{r/2} F
  double support_rel = 1e-8; // "outside the ball" threshold relative to the bump peak
};

// Samples of one bump and its lift on the quadrature nodes inside its ball.
// Values are shared between bumps that are grid translates of each other.
struct LocalBump {
  std::vector<std::size_t> nodes;
  std::shared_ptr<const Eigen::VectorXd> phi;
  std::shared_ptr<const Eigen::VectorXd> lift;
};

struct SupportReport {
  double max_outside_ratio = 0.0; // max over bumps of max_{d > rho} |phi| / max |phi|
  double support_radius = 0.0;    // largest distance with |phi| > support_rel * peak
  double translation_gap = 0.0;   // shifted-row versus direct-row discrepancy (grid manifolds)
  bool inside = false;            // support_radius <= rho
};

// phi_i(x) = (1/N) K_t^F(x_i, x) with t = rho / (2 C0).
class BumpSystem {
public:
  const BallPacking& packing() const { return packing_; }
  const SpectralBasis& basis() const { return *basis_; }
  const Quadrature& quadrature() const { return quad_; }
  const FilterFunction& filter() const { return F_; }
  const FilterFunction& lift_filter() const { return G_; }
  const Rational& r() const { return r_; }
  double t() const { return t_; }
  double C0() const { return C0_; }
  int N() const { return packing_.N; }
  std::size_t size() const { return packing_.size(); }
  std::size_t mode_count() const { return count_; }
  const std::vector<LocalBump>& bumps() const { return bumps_; }
  const SupportReport& support() const { return support_; }

  // ||phi_i||_p and ||L^{r/2} phi_i||_p over the ball, by quadrature.
  double bump_norm(std::size_t i, double p) const;
  double lift_bump_norm(std::size_t i, double p) const;

  // Spectral coefficients of g_a = sum a_i phi_i for the first mode_count() modes.
  Eigen::VectorXd coefficients(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  // g_a on all quadrature nodes, by spectral synthesis.
  Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  // g_a from the stored ball samples (zero outside the balls).
  Eigen::VectorXd synthesize_local(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  // sum a_i L^{r/2} phi_i = (1/N) t^{-r} sum a_i K_t^G(x_i, .), by spectral synthesis.
  Eigen::VectorXd sobolev_lift(const Eigen::Ref<const Eigen::VectorXd>& a) const;

  // Norms of g_a and of its lift from disjointness of the balls.
  double norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const;
  double lift_norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const;
  double sobolev_norm_local(const Eigen::Ref<const Eigen::VectorXd>& a, double p) const;

  // a_i = <h, phi_i> / ||phi_i||_2^2.
  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& h_samples) const;

  friend BumpSystem build_bumps(const BallPacking& packing, BasisPtr basis, const Quadrature& q,
                                const FilterFunction& F, double C0, const BumpOptions& options);

private:
  BumpSystem(const Quadrature& q) : quad_(q) {}
  Eigen::VectorXd center_sums(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  void check_length(const Eigen::Ref<const Eigen::VectorXd>& a) const;

  BallPacking packing_;
  BasisPtr basis_;
  Quadrature quad_;
  FilterFunction F_, G_;
  Rational r_{0};
  double t_ = 0.0, C0_ = 0.0;
  std::size_t count_ = 0;
  Eigen::VectorXd f_mult_; // (1/N) F(t^2 lambda_l)
  Eigen::VectorXd g_mult_; // (1/N) t^{-r} G(t^2 lambda_l)
  std::vector<LocalBump> bumps_;
  // Per-bump norms for p in {1, 2, inf}; other p are computed on demand.
  Eigen::MatrixXd phi_norms_, lift_norms_;
  SupportReport support_;
};

// Smallest eigenvalue cutoff and matching quadrature resolution for a bump
// system with packing density N, propagation constant C0 and lift order r.
double bump_lambda_cut(const Manifold& m, int N, const FilterFunction& F, double C0, const Rational& r);

BumpSystem build_bumps(const BallPacking& packing, BasisPtr basis, const Quadrature& q, const FilterFunction& F,
                       double C0, const BumpOptions& options = {});

// ||f||_p + ||L^{r/2} f||_p for f given by spectral coefficients.
double sobolev_norm(const SpectralBasis& basis, const Quadrature& q, const Eigen::Ref<const Eigen::VectorXd>& f_coeffs,
                    double p, const Rational& r);

// ||a||_p for p in [1, inf].
double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& a, double p);

// Random point on the unit sphere of l_p^m.
Eigen::VectorXd random_lp_unit(CounterRng& rng, Eigen::Index m, double p);

struct EpsilonCertificate {
  double epsilon = 0.0;  // eps_N
  double c = 0.0;        // eps_N = c N^{exponent}
  double exponent = 0.0; // -r/s + 1/p
  double max_sobolev = 0.0; // largest sampled Sobolev norm at ||a||_p = 1
  std::size_t samples = 0;
  int shrinks = 0;
  double spectral_check = 0.0; // largest spectral-route Sobolev norm of a certified sample
};

// eps_N such that every sampled a in eps_N b_p gives Sobolev norm <= 1.
EpsilonCertificate epsilon_embedding(const BumpSystem& sys, double p, std::uint64_t seed, std::size_t samples = 500,
                                     std::size_t spectral_samples = 4);

struct NormEquivalence {
  double m = 0.0, M = 0.0; // ||g_a||_q / (N^{-1/q} ||a||_q) in [m, M]
};
NormEquivalence norm_equivalence(const BumpSystem& sys, double q, std::uint64_t seed, std::size_t samples = 200);

// max_i ||phi_i||_1 ||phi_i||_inf / ||phi_i||_2^2, which bounds ||Pi_N||_{q->q} for every q.
double projection_constant(const BumpSystem& sys);
// max over random h of ||Pi_N h||_q / ||h||_q.
double measured_projection_ratio(const BumpSystem& sys, double q, std::uint64_t seed, std::size_t samples = 32);

// max over sampled a of ||sum a_i L^{r/2} phi_i||_p / ||a||_p.
double lift_operator_norm(const BumpSystem& sys, double p, std::uint64_t seed, std::size_t samples = 200);

} // namespace widthlab
