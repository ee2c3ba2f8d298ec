#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskgmm/experiments.hpp"

namespace riskgmm {

/// Outcome of one oracle comparison. metric is the worst observed value of the
/// quantity compared against tolerance (error, violation count, fraction, ...).
struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double tolerance = 0.0;
  std::string detail;

  nlohmann::json to_json() const;
};

/// Standard error of the sample mean.
double mean_standard_error(const std::vector<double>& s);

/// Delta-method standard error of the empirical entropic risk at step k.
double empirical_risk_standard_error(const Ensemble& ens, double sigma2, double theta, int k);

// Closed form vs numeric eigen-radius of the 2x2 companion block (random triples).
CheckResult check_companion_radius(int n, std::uint64_t seed);
// Closed-form rho(A_Q) vs a dense eigensolve on the two-mode and 10-d quadratics.
CheckResult check_aq_radius(int n, std::uint64_t seed);
// sigma^2/(2 u_i) vs the per-mode Lyapunov fixpoint for random params in S_q.
CheckResult check_stationary_variance(int n, std::uint64_t seed);
// F_theta inside S_q, F_theta monotone in theta, S_q equals {rho < 1} off the boundary.
std::vector<CheckResult> check_set_identities(int n, std::uint64_t seed);
// Exact stationary entropic risk vs Monte Carlo on the 10-d quadratic.
CheckResult check_risk_vs_mc(const Ensemble& ens, const GmmParams& p, double sigma2,
                             double theta, int k, double rel_tol);
// evar_exact <= evar_bound on random feasible (params, zeta).
CheckResult check_evar_dominance(int n, std::uint64_t seed);
// Monte Carlo EV@R at stationarity <= closed-form bound + 3 standard errors.
CheckResult check_mc_evar_vs_bound(const Ensemble& ens, const GmmParams& p, double sigma2,
                                   double zeta, int k);
// Certified parameters satisfy the matrix inequality (samples plus AGD and HB).
CheckResult check_mi_certification(int n, std::uint64_t seed, double mu, double L);
// Deterministic Lyapunov decay along `steps` iterations for several certified parameters.
CheckResult check_lyapunov_contraction(const Objective& obj, int steps, std::uint64_t seed);
// Simulation never exceeds the Gaussian expected-suboptimality, risk, GD and tail bounds.
std::vector<CheckResult> check_bound_coverage(int n_paths, const std::vector<int>& ks,
                                              std::uint64_t seed);
// theta_u^sg <= theta_u^g and rho_hat^2 >= rho_bar^2 on random admissible samples.
CheckResult check_subgaussian_thresholds(int n, std::uint64_t seed);
// Uniform-ball noise never breaks the sub-Gaussian mean and tail bounds.
std::vector<CheckResult> check_subgaussian_coverage(int n_paths, const std::vector<int>& ks,
                                                    std::uint64_t seed);
// theta -> 0 limits of the exact risk, the empirical risk and rho_bar^2 / rho_hat^2.
std::vector<CheckResult> check_limits(std::uint64_t seed);

}  // namespace riskgmm
