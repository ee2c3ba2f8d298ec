#include <gtest/gtest.h>

#include <random>

#include "riskgmm/smooth_analysis.hpp"

using namespace riskgmm;

namespace {
constexpr double kMu = 6.0;
constexpr double kL = 105.0;
constexpr double kKappa = kL / kMu;
}  // namespace

TEST(SmoothSets, Membership) {
  EXPECT_TRUE(classify_theta_psi({1.0, 1.0}, kMu, kL).in_S0);
  const auto minus = classify_theta_psi({0.9, 0.5}, kMu, kL);
  EXPECT_TRUE(minus.in_Sminus);
  EXPECT_TRUE(minus.in_Sc);
  const auto plus = classify_theta_psi({1.2, 1.5}, kMu, kL);
  EXPECT_TRUE(plus.in_Splus);
  EXPECT_TRUE(plus.in_Sc);
  // In S_+ but outside S_1.
  const auto off = classify_theta_psi({1.2, 2.0}, kMu, kL);
  EXPECT_TRUE(off.in_Splus);
  EXPECT_FALSE(off.in_S1);
  EXPECT_FALSE(off.admissible());
  EXPECT_TRUE(classify_theta_psi({kKappa / (1.0 + kKappa), 0.0}, kMu, kL).in_Sc);
  // Below the heavy-ball lower edge 1/(1 + kappa).
  EXPECT_FALSE(classify_theta_psi({0.5 / (1.0 + kKappa), 0.0}, kMu, kL).admissible());
  EXPECT_FALSE(classify_theta_psi({1.6, 2.0}, kMu, kL).in_Splus);
}

TEST(SmoothParams, MatchOracle) {
  const auto a = smooth_params({0.9, 0.5}, kMu, kL);
  EXPECT_NEAR(a.base.alpha, 0.0019047619047619048, 1e-17);
  EXPECT_NEAR(a.base.beta, 0.80190514199445842, 1e-14);
  EXPECT_NEAR(a.base.gamma, 0.40095257099722921, 1e-14);
  EXPECT_NEAR(a.rate2, 0.89858148943257801, 1e-14);
  EXPECT_NEAR(a.lyap_lambda, 236.25, 1e-10);

  const auto b = smooth_params({1.2, 1.5}, kMu, kL);
  EXPECT_NEAR(b.base.alpha, 0.0038095238095238095, 1e-17);
  EXPECT_NEAR(b.base.beta, 0.74476302917537707, 1e-14);
  EXPECT_NEAR(b.base.gamma, 1.1171445437630656, 1e-14);
  EXPECT_NEAR(b.rate2, 0.83438426575783499, 1e-14);
  EXPECT_NEAR(b.lyap_lambda, 157.5, 1e-10);

  const auto hb = smooth_params({kKappa / (1.0 + kKappa), 0.0}, kMu, kL);
  EXPECT_NEAR(hb.base.alpha, 0.0005148005148005148, 1e-17);
  EXPECT_NEAR(hb.base.beta, 0.89189189189189189, 1e-14);
  EXPECT_EQ(hb.base.gamma, 0.0);
  EXPECT_NEAR(hb.rate2, 0.94594594594594595, 1e-14);
}

TEST(SmoothParams, AgdLimitAndErrors) {
  const auto agd = smooth_params({1.0, 1.0}, kMu, kL, 1.0 / kL);
  const double q = std::sqrt(kMu / kL);
  EXPECT_NEAR(agd.base.beta, (1.0 - q) / (1.0 + q), 1e-15);
  EXPECT_EQ(agd.base.beta, agd.base.gamma);
  EXPECT_THROW(smooth_params({1.0, 1.0}, kMu, kL), std::invalid_argument);
  EXPECT_THROW(smooth_params({1.0, 1.0}, kMu, kL, 2.0 / kL), std::invalid_argument);
  EXPECT_THROW(smooth_params({0.5, 3.0}, kMu, kL), InfeasibleError);
  EXPECT_THROW(classify_theta_psi({1.0, 1.0}, 2.0, 1.0), std::invalid_argument);
}

TEST(GaussianBound, AgdMatchesOracle) {
  const auto agd = smooth_params({1.0, 1.0}, kMu, kL, 1.0 / kL);
  const auto base = risk_bound_gaussian(agd, 10, 1.0, 0.0, 0.0);
  EXPECT_NEAR(base.theta_upper, 14.253522142909845, 1e-11);
  EXPECT_NEAR(base.v, 39.950099601988867, 1e-11);
  const auto r = risk_bound_gaussian(agd, 10, 1.0, 0.5 * base.theta_upper, 0.0);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.rho_bar2, 0.87937460000113309, 1e-14);
  EXPECT_NEAR(r.stationary_bound, 0.84702703626320941, 1e-13);
}

TEST(GaussianBound, GdMatchesOracle) {
  const auto r = gd_risk_bound(1.0 / kL, kMu, kL, 10, 1.0, 5.0, 0.0);
  EXPECT_NEAR(r.theta_upper, 23.314285714285714, 1e-12);
  EXPECT_NEAR(r.rho_bar2, 0.91066202090592334, 1e-14);
  EXPECT_NEAR(r.stationary_bound, 0.54602184087363495, 1e-14);
  EXPECT_THROW(gd_risk_bound(2.5 / (kMu + kL), kMu, kL, 10, 1.0, 5.0, 0.0), std::invalid_argument);
}

TEST(Bounds, PropertiesOnRandomCertifiedParams) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> vt(0.0, 2.0), ps(0.0, 2.5), u(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    const ThetaPsi tp{vt(g), ps(g)};
    if (!classify_theta_psi(tp, kMu, kL).in_Sc) continue;
    ++checked;
    const auto sp = smooth_params(tp, kMu, kL);
    EXPECT_GT(sp.rate2, 0.0);
    EXPECT_LT(sp.rate2, 1.0);
    EXPECT_TRUE(mi_certify(sp.base, sp.rate2, lyapunov_matrix(sp), kMu, kL).certified);

    const auto g0 = risk_bound_gaussian(sp, 3, 1.0, 0.0, 1.0);
    const auto s0 = risk_bound_subgaussian(sp, 1.0, 0.0, 1.0);
    EXPECT_LE(s0.theta_upper, g0.theta_upper);
    const double th = u(g) * s0.theta_upper;
    EXPECT_GE(rho_hat2_subgaussian(sp, th), rho_bar2_gaussian(sp, th));
    EXPECT_GE(rho_bar2_gaussian(sp, th), sp.rate2);
    // Monotone in theta.
    const auto r1 = risk_bound_gaussian(sp, 3, 1.0, 0.25 * g0.theta_upper, 1.0);
    const auto r2 = risk_bound_gaussian(sp, 3, 1.0, 0.5 * g0.theta_upper, 1.0);
    EXPECT_LE(r1.stationary_bound, r2.stationary_bound);
    EXPECT_LE(r1.rho_bar2, r2.rho_bar2);
    // EV@R bound: the active branch is the smaller one when the condition holds.
    const auto e = evar_bound_gaussian(sp, 3, 1.0, 0.95, 0.99, 1.0);
    if (e.condition_holds) EXPECT_LE(e.branch1, e.branch2 * (1.0 + 1e-12));
    EXPECT_TRUE(std::isfinite(e.asymptotic_bound));
    // The bias term decays in k toward the asymptotic bound.
    EXPECT_GT(e.finite_k_bound(5), e.asymptotic_bound);
    EXPECT_LE(e.finite_k_bound(50), e.finite_k_bound(5));
  }
}

TEST(MiCertificate, RejectsBadP) {
  const auto agd = smooth_params({1.0, 1.0}, kMu, kL, 1.0 / kL);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(mi_certify(agd.base, agd.rate2, asym, kMu, kL), std::invalid_argument);
  EXPECT_THROW(mi_certify(agd.base, agd.rate2, -Eigen::Matrix2d::Identity(), kMu, kL),
               std::invalid_argument);
}

TEST(MiCertificate, FasterRateThanCertifiedFails) {
  const auto agd = smooth_params({1.0, 1.0}, kMu, kL, 1.0 / kL);
  const auto c = mi_certify(agd.base, 0.5 * agd.rate2, lyapunov_matrix(agd), kMu, kL);
  EXPECT_FALSE(c.certified);
}

TEST(SmoothDesign, SmallGridPicksAdmissibleCandidate) {
  SmoothDesignSpec spec;
  spec.d = 10;
  spec.grid.n_vartheta = spec.grid.n_psi = 40;
  spec.grid.n_alpha_s0 = 10;
  spec.global_benchmark = true;
  const auto r = design_ra_gmm_smooth(kMu, kL, spec);
  EXPECT_GT(r.feasible, 0);
  EXPECT_LE(r.best.rate_rel, 1.0 + spec.epsilon + 1e-12);
  for (const auto& c : smooth_sweep(kMu, kL, spec))
    if (c.rate_rel <= 1.0 + spec.epsilon) EXPECT_GE(c.evar.asymptotic_bound, r.best.evar.asymptotic_bound);
  spec.agd_only = true;
  const auto agd = design_ra_gmm_smooth(kMu, kL, spec);
  EXPECT_EQ(agd.best.params.source.vartheta, 1.0);
  EXPECT_EQ(agd.best.params.source.psi, 1.0);
}
