#include <gtest/gtest.h>

#include <random>

#include "riskgmm/quad_analysis.hpp"
#include "riskgmm/simulator.hpp"

using namespace riskgmm;

// Frozen values come from tests/oracles/generate_oracles.py (50-digit mpmath).

TEST(ModeAnalysis, RealRootsMatchOracle) {
  const auto m = mode_analysis({0.01, 0.5, 0.3}, 20.0);
  EXPECT_NEAR(m.c, 1.24, 1e-15);
  EXPECT_NEAR(m.d, -0.44, 1e-15);
  EXPECT_NEAR(m.rho, 0.66332495807107997, 1e-14);
  EXPECT_NEAR(m.u, 104.22222222222222, 1e-11);
}

TEST(ModeAnalysis, ComplexRootsMatchOracle) {
  const auto m = mode_analysis({0.02, 0.9, 0.1}, 3.0);
  EXPECT_NEAR(m.rho, 0.94551573228582506, 1e-14);
  EXPECT_NEAR(m.u, 10.432101372756072, 1e-11);
}

TEST(ModeAnalysis, StationaryVarianceMatchesOracle) {
  Vec lam(2);
  lam << 20.0, 3.0;
  const QuadraticObjective q(lam, Vec::Zero(2), 0.0, std::nullopt, "two-mode");
  // Eigenvalues are stored ascending, so lambda = 20 is mode 1.
  const auto fix = lyapunov_fixpoint_oracle({0.01, 0.5, 0.3}, q, 1.0);
  EXPECT_NEAR(fix[1], 0.0047974413646055437, 1e-15);
  EXPECT_NEAR(1.0 / (2.0 * mode_analysis({0.01, 0.5, 0.3}, 20.0).u), 0.0047974413646055437, 1e-15);
  EXPECT_NEAR(1.0 / (2.0 * mode_analysis({0.02, 0.9, 0.1}, 3.0).u), 0.047928982103814074, 1e-14);
}

TEST(ModeAnalysis, GdModeIsScalarGeometricSeries) {
  const double a = 0.03, lam = 7.0;
  const double expected = lam * a * a / (2.0 * (1.0 - (1.0 - a * lam) * (1.0 - a * lam)));
  EXPECT_NEAR(1.0 / (2.0 * mode_analysis(GmmParams::gd(a), lam).u), expected, 1e-15);
  Vec l(1);
  l << lam;
  const QuadraticObjective q(l, Vec::Zero(1), 0.0, std::nullopt, "scalar");
  EXPECT_NEAR(lyapunov_fixpoint_oracle(GmmParams::gd(a), q, 1.0)[0], expected, 1e-13);
  EXPECT_EQ(lyapunov_fixpoint_oracle(GmmParams::gd(a), q, 0.0)[0], 0.0);
}

TEST(Quadratic10d, AgdRiskAndEvarMatchOracle) {
  const auto q = make_paper_quadratic();
  const GmmParams agd = GmmParams::agd_standard(q.mu(), q.lsmooth());
  // lambda = mu is a defective double root for AGD, so rho is only sqrt(eps)-conditioned.
  EXPECT_NEAR(spectral_radius(agd, q), 0.76095427813312127, 5e-8);
  EXPECT_NEAR(entropic_risk_exact(agd, q, 1.0, 1.0).entropic_risk, 0.04832009600273537, 1e-14);
  EXPECT_NEAR(entropic_risk_exact(agd, q, 1.0, 5.0).entropic_risk, 0.048800415186840306, 1e-14);
  const EvarResult e = evar_exact(agd, q, 1.0, 0.95);
  EXPECT_NEAR(e.value, 0.055494753187035231, 1e-12);
  EXPECT_NEAR(e.theta_star, 26.854311551262483, 1e-3);
  EXPECT_GE(evar_bound(agd, q, 1.0, 0.95).value, e.value);
}

TEST(Quadratic10d, RateBenchmark) {
  EXPECT_NEAR(quad_rate_benchmark(17.5), 0.52789761352045632, 1e-15);
}

TEST(StableSet, GdStepsizeBoundary) {
  const auto q = make_paper_quadratic();
  EXPECT_TRUE(in_stable_set(GmmParams::gd(1.9 / q.lsmooth()), q));
  EXPECT_FALSE(in_stable_set(GmmParams::gd(2.1 / q.lsmooth()), q));
  EXPECT_EQ(stable_set_status(GmmParams::gd(2.0 / q.lsmooth()), q), SetStatus::boundary);
}

TEST(StableSet, PropertyMatchesDenseEigensolve) {
  const auto q = make_figure1_quadratic();
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> a(0.0, 1.2), b(0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    const GmmParams p{a(g), b(g), b(g)};
    const double rho = spectral_radius(p, q);
    EXPECT_NEAR(rho, spectral_radius_numeric(p, q), 1e-9);
    if (std::abs(rho - 1.0) > 1e-8) EXPECT_EQ(in_stable_set(p, q), rho < 1.0);
  }
}

TEST(EntropicRisk, PropertiesOnRandomStableParams) {
  const auto q = make_paper_quadratic();
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> a(0.0, 2.2 / q.lsmooth()), b(0.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    const GmmParams p{a(g), b(g), b(g)};
    if (!in_stable_set(p, q)) continue;
    ++checked;
    const auto r1 = entropic_risk_exact(p, q, 1.0, 1e-3);
    const auto r2 = entropic_risk_exact(p, q, 1.0, 1e-2);
    ASSERT_TRUE(r1.feasible);
    // Risk is at least the mean and nondecreasing in theta.
    EXPECT_GE(r1.entropic_risk, r1.mean() * (1.0 - 1e-12));
    if (r2.feasible) EXPECT_GE(r2.entropic_risk, r1.entropic_risk * (1.0 - 1e-12));
    // Linear in sigma^2 at fixed theta.
    EXPECT_NEAR(entropic_risk_exact(p, q, 3.0, 1e-3).entropic_risk, 3.0 * r1.entropic_risk,
                1e-12 * r1.entropic_risk + 1e-300);
  }
}

TEST(EntropicRisk, InfeasibleThetaIsInfinite) {
  const auto q = make_paper_quadratic();
  const GmmParams agd = GmmParams::agd_standard(q.mu(), q.lsmooth());
  double umin = kInf;
  for (const auto& m : mode_table(agd, q)) umin = std::min(umin, m.u);
  EXPECT_TRUE(in_feasible_set(agd, q, 1.9 * umin));
  EXPECT_FALSE(in_feasible_set(agd, q, 2.1 * umin));
  EXPECT_FALSE(entropic_risk_exact(agd, q, 1.0, 2.1 * umin).feasible);
}

TEST(Design, RespectsRateConstraintAndBeatsAgdBound) {
  const auto q = make_paper_quadratic();
  QuadDesignSpec spec;
  spec.grid.n_alpha = spec.grid.n_beta = spec.grid.n_gamma = 25;
  const auto r = design_ra_gmm_quad(q, spec);
  EXPECT_LE(r.rate * r.rate, (1.0 + spec.epsilon) * r.rate_benchmark * (1.0 + 1e-12));
  EXPECT_GT(r.feasible_points, 0);
  EXPECT_LE(r.exact.value, r.bound.value + 1e-12);
  spec.agd_constraint = true;
  const auto ra_agd = design_ra_gmm_quad(q, spec);
  EXPECT_EQ(ra_agd.params.beta, ra_agd.params.gamma);
}

TEST(Design, ImpossibleConstraintThrows) {
  const auto q = make_paper_quadratic();
  QuadDesignSpec spec;
  spec.grid.n_alpha = spec.grid.n_beta = spec.grid.n_gamma = 5;
  spec.epsilon = 0.0;
  spec.zeta = 0.95;
  // A 5^3 grid cannot reach the optimal rate exactly.
  EXPECT_THROW(design_ra_gmm_quad(q, spec), InfeasibleError);
}

TEST(Params, ValidationRejectsNonFinite) {
  EXPECT_THROW((GmmParams{std::nan(""), 0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((GmmParams{-1.0, 0.0, 0.0}.validate()), std::invalid_argument);
}
