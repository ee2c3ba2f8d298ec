#include <gtest/gtest.h>

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "riskgmm/quad_analysis.hpp"
#include "riskgmm/rng.hpp"
#include "riskgmm/simulator.hpp"

using namespace riskgmm;

namespace {

RunConfig config(const GmmParams& p, int dim, int k_max, int n_paths, std::uint64_t seed = 3) {
  RunConfig rc;
  rc.params = p;
  rc.k_max = k_max;
  rc.n_paths = n_paths;
  rc.x0 = Vec::Ones(dim);
  rc.seed = seed;
  return rc;
}

Ensemble constant_ensemble(const std::vector<double>& values) {
  Ensemble e;
  e.steps = {0};
  e.subopt = Mat(static_cast<Eigen::Index>(values.size()), 1);
  for (size_t i = 0; i < values.size(); ++i) e.subopt(static_cast<Eigen::Index>(i), 0) = values[i];
  e.diverged.assign(values.size(), 0);
  return e;
}

}  // namespace

TEST(RunGmm, NoiselessConvergesLinearly) {
  const auto q = make_paper_quadratic();
  const GmmParams agd = GmmParams::agd_standard(q.mu(), q.lsmooth());
  const double rho = spectral_radius(agd, q);
  const double f0 = q.subopt(Vec::Ones(10));
  const int k = static_cast<int>(std::ceil(std::log(1e-10 / f0) / (2.0 * std::log(rho)))) + 40;
  const Ensemble e = run_gmm(q, config(agd, 10, k, 1), NoiseModel{});
  EXPECT_LE(e.mean(k), 1e-10);
}

TEST(RunGmm, ZeroMomentumIsPlainGd) {
  const auto q = make_paper_quadratic();
  const double a = 1.0 / q.lsmooth(), s2 = 0.5;
  const Ensemble e = run_gmm(q, config(GmmParams::gd(a), 10, 100, 1, 8), NoiseModel::gaussian(s2));
  // Plain GD replaying the documented noise stream: Philox(seed, path 0, substream k).
  Vec x = Vec::Ones(10);
  Philox4x32 eng(8);
  for (int k = 0; k < 100; ++k) {
    eng.reset(0, static_cast<std::uint32_t>(k));
    boost::random::normal_distribution<double> n(0.0, std::sqrt(s2));
    Vec w(10);
    for (int i = 0; i < 10; ++i) w(i) = n(eng);
    x -= a * (q.grad(x) + w);
  }
  EXPECT_LE((e.final_x.row(0).transpose() - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RunGmm, NoiselessGdMatchesManualLoop) {
  const auto q = make_paper_quadratic();
  const double a = 1.0 / q.lsmooth();
  const Ensemble e = run_gmm(q, config(GmmParams::gd(a), 10, 100, 1), NoiseModel{});
  Vec x = Vec::Ones(10);
  for (int k = 0; k < 100; ++k) x -= a * q.grad(x);
  EXPECT_LE((e.final_x.row(0).transpose() - x).norm(), 1e-14);
}

TEST(RunGmm, PathsIndependentOfEnsembleSize) {
  const auto q = make_paper_quadratic();
  const GmmParams agd = GmmParams::agd_standard(q.mu(), q.lsmooth());
  const Ensemble small = run_gmm(q, config(agd, 10, 50, 3), NoiseModel::gaussian(1.0));
  const Ensemble big = run_gmm(q, config(agd, 10, 50, 17), NoiseModel::gaussian(1.0));
  EXPECT_EQ(small.final_x, big.final_x.topRows(3));
  const Ensemble again = run_gmm(q, config(agd, 10, 50, 17), NoiseModel::gaussian(1.0));
  EXPECT_EQ(big.subopt, again.subopt);
}

TEST(RunGmm, SampleMeanFollowsMeanRecursion) {
  const auto q = make_paper_quadratic();
  const GmmParams agd = GmmParams::agd_standard(q.mu(), q.lsmooth());
  const int n = 20000, k = 20;
  const Ensemble e = run_gmm(q, config(agd, 10, k, n), NoiseModel::gaussian(1.0));
  // Exact mean: z_k - z_* = A_Q^k (z_0 - z_*).
  const Mat A = aq_matrix(agd, q);
  Vec z(20);
  z << Vec::Ones(10) - q.xstar(), Vec::Ones(10) - q.xstar();
  for (int i = 0; i < k; ++i) z = A * z;
  const Vec mean = e.final_x.colwise().mean().transpose();
  const Mat centered = e.final_x.rowwise() - mean.transpose();
  for (int i = 0; i < 10; ++i) {
    const double se = std::sqrt(centered.col(i).squaredNorm() / (n - 1) / n);
    EXPECT_NEAR(mean(i) - q.xstar()(i), z(i), 3.0 * se) << "coordinate " << i;
  }
}

TEST(RunGmm, DivergenceIsFlaggedAndExcluded) {
  const auto q = make_paper_quadratic();
  const Ensemble e = run_gmm(q, config(GmmParams::gd(3.0 / q.lsmooth()), 10, 2000, 4),
                             NoiseModel::gaussian(1.0));
  EXPECT_EQ(e.n_diverged, 4);
  EXPECT_TRUE(e.samples(2000).empty());
  EXPECT_TRUE(std::isnan(e.mean(2000)));
}

TEST(RunGmm, UniformBallNoiseStaysInBall) {
  Vec lam(3);
  lam << 1.0, 2.0, 3.0;
  const QuadraticObjective q(lam, Vec::Zero(3), 0.0, std::nullopt, "ball");
  // One GD step from ones: x_1 = (0.5, 0, -0.5) - 0.5 w.
  const Ensemble e = run_gmm(q, config(GmmParams::gd(0.5), 3, 1, 500), NoiseModel::uniform_ball(2.0));
  for (Eigen::Index i = 0; i < e.final_x.rows(); ++i) {
    Vec w = e.final_x.row(i).transpose();
    w(0) -= 0.5;
    w(2) -= -0.5;
    EXPECT_LE(w.norm() / 0.5, 2.0 + 1e-12);
  }
  EXPECT_NEAR(NoiseModel::uniform_ball(2.0).variance_proxy(), 4.0 / (2.0 * std::log(2.0)), 1e-15);
}

TEST(EmpiricalRisk, EqualSamplesAndSmallTheta) {
  const Ensemble c = constant_ensemble({0.7, 0.7, 0.7});
  EXPECT_NEAR(empirical_entropic_risk(c, 1.0, 3.0, 0), 0.7, 1e-15);
  const Ensemble e = constant_ensemble({0.1, 0.4, 2.0, 0.3});
  EXPECT_NEAR(empirical_entropic_risk(e, 1.0, 1e-8, 0), 0.7, 1e-6 * 0.7);
  EXPECT_GT(empirical_entropic_risk(e, 1.0, 2.0, 0), 0.7);
  // Huge exponents fall back to log-sum-exp instead of overflowing.
  const Ensemble big = constant_ensemble({1.0, 5000.0});
  const double r = empirical_entropic_risk(big, 1.0, 2.0, 0);
  EXPECT_NEAR(r, 5000.0 + std::log(0.5), 1e-9);
  EXPECT_THROW(empirical_entropic_risk(e, 1.0, 0.0, 0), std::invalid_argument);
}

TEST(Ecdf, BasicShape) {
  const Ecdf one = ecdf({2.5});
  EXPECT_EQ(one(2.4), 0.0);
  EXPECT_EQ(one(2.5), 1.0);
  const Ecdf f = ecdf({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(f(3.0), 1.0);
  EXPECT_EQ(f(2.0), 0.75);
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(ks_distance(f, f), 0.0);
  EXPECT_NEAR(ks_distance(f, ecdf({10.0})), 1.0, 0.0);
}

TEST(Dominance, IdenticalAndShifted) {
  const Ensemble a = constant_ensemble({0.1, 0.5, 0.9, 1.3});
  EXPECT_EQ(dominance_report(a, a, {0.2, 0.6, 1.0}), 1.0);
  const Ensemble lower = constant_ensemble({0.0, 0.4, 0.8, 1.2});
  EXPECT_EQ(dominance_report(lower, a, {0.05, 0.2, 0.45, 0.6, 1.0, 1.25}), 1.0);
  EXPECT_LT(dominance_report(a, lower, {0.05, 0.45}), 1.0);
}

TEST(McEvar, SinglePointAndRefinement) {
  const Ensemble e = constant_ensemble({0.1, 0.4, 2.0, 0.3, 0.9, 0.2});
  const McEvar one = mc_evar_oracle(e, 1.0, 0.9, {1.5}, 0);
  EXPECT_NEAR(one.value, empirical_entropic_risk(e, 1.0, 1.5, 0) + 2.0 / 1.5 * std::log(1.0 / 0.9), 1e-15);
  std::vector<double> coarse, fine;
  for (int i = 0; i < 50; ++i) coarse.push_back(1e-2 * std::pow(1e4, i / 49.0));
  for (int i = 0; i < 500; ++i) fine.push_back(1e-2 * std::pow(1e4, i / 499.0));
  const double c = mc_evar_oracle(e, 1.0, 0.9, coarse, 0).value;
  const double f = mc_evar_oracle(e, 1.0, 0.9, fine, 0).value;
  EXPECT_LE(std::abs(c - f), 0.01 * f);
}
