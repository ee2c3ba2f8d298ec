#pragma once

#include <optional>
#include <vector>

#include "riskgmm/quad_analysis.hpp"

namespace riskgmm {

/// The two free variables (vartheta, psi) generating certified parameters.
struct ThetaPsi {
  double vartheta = 1.0;
  double psi = 1.0;
};

struct SetMembership {
  bool in_S0 = false;
  bool in_Splus = false;
  bool in_Sminus = false;
  bool in_S1 = false;
  bool in_Sc = false;

  bool admissible() const { return in_S0 || in_Sc; }
};

/// Exact evaluation of the S_0, S_+, S_-, S_1 and S_c inequalities.
SetMembership classify_theta_psi(const ThetaPsi& tp, double mu, double L);

struct SmoothParams {
  GmmParams base;
  ThetaPsi source;
  double rate2 = 1.0;        // 1 - sqrt(vartheta alpha mu)
  double lyap_lambda = 0.0;  // vartheta / (2 alpha)
  double mu = 0.0;
  double L = 0.0;
};

/// Certified (alpha, beta, gamma) for tp in S_c (alpha fixed by tp) or S_0
/// (alpha_s0 in (0, 1/L]). Throws InfeasibleError outside S_c u S_0.
SmoothParams smooth_params(const ThetaPsi& tp, double mu, double L,
                           std::optional<double> alpha_s0 = std::nullopt);

/// p = (sqrt(vartheta/2alpha), -sqrt(vartheta/2alpha) + sqrt(mu/2)); P~ = p p^T.
Eigen::Vector2d lyapunov_vector(const SmoothParams& sp);
Eigen::Matrix2d lyapunov_matrix(const SmoothParams& sp);

/// V_P(z) = (z - z*)^T (P~ kron I)(z - z*) + f(x_k) - f*, z = (x_k, x_{k-1}).
double lyapunov_value(const SmoothParams& sp, const Objective& obj, const Vec& x_k,
                      const Vec& x_km1);

enum class NoiseKind { gaussian, subgaussian };

const char* to_string(NoiseKind n);

/// Bound on E[f(x_k)] - f*. For sub-Gaussian noise sigma2 is the variance proxy.
double expected_subopt_bound(const SmoothParams& sp, int d, double sigma2, double z0_lyapunov,
                             int k, NoiseKind noise);

/// (2L^2/mu)(2(beta-gamma)^2 + (1-alpha L)^2 (1 + 2gamma + 2gamma^2)) + lambda_P rho^2.
double risk_v(const SmoothParams& sp);

struct RiskBoundReport {
  double theta = 0.0;
  double theta_upper = 0.0;
  double v = 0.0;
  double rho_bar2 = kInf;
  double stationary_bound = kInf;
  double bias0 = 0.0;  // 2 V_P(z_0), or L ||x_0 - x*||^2 / 2 for GD
  bool feasible = false;
  NoiseKind noise = NoiseKind::gaussian;

  double bias_at_k(int k) const;
  double bound_at_k(int k) const { return stationary_bound + bias_at_k(k); }
};

struct EvarBoundReport {
  double phi = 0.0;
  double zeta = 0.0;
  double theta_phi = 0.0;
  double rho_barbar = 1.0;
  bool condition_holds = false;
  double branch1 = kInf;  // value at the interior minimizer
  double branch2 = kInf;  // value at theta_phi
  double asymptotic_bound = kInf;
  double bias0 = 0.0;
  NoiseKind noise = NoiseKind::gaussian;

  double finite_k_bound(int k) const;
};

RiskBoundReport risk_bound_gaussian(const SmoothParams& sp, int d, double sigma2, double theta,
                                    double z0_lyapunov);

/// rho_bar^2 as a function of theta (exposed for monotonicity checks).
double rho_bar2_gaussian(const SmoothParams& sp, double theta);

EvarBoundReport evar_bound_gaussian(const SmoothParams& sp, int d, double sigma2, double zeta,
                                    double phi, double z0_lyapunov);

/// Chernoff tail: P{S_k >= t} < exp(...) for a feasible Gaussian report.
double gaussian_tail_bound(double sigma2, const RiskBoundReport& rep, int k, double t);

RiskBoundReport risk_bound_subgaussian(const SmoothParams& sp, double sigma2, double theta,
                                       double z0_lyapunov);

double rho_hat2_subgaussian(const SmoothParams& sp, double theta);

EvarBoundReport evar_bound_subgaussian(const SmoothParams& sp, double sigma2, double zeta,
                                       double phi, double z0_lyapunov);

/// max{|1 - alpha mu|, |1 - alpha L|}.
double gd_rate(double alpha, double mu, double L);

/// Entropic-risk bound for noisy GD; x0_dist = ||x_0 - x*||.
RiskBoundReport gd_risk_bound(double alpha, double mu, double L, int d, double sigma2,
                              double theta, double x0_dist);

/// EV@R bound for noisy GD.
EvarBoundReport gd_evar_bound(double alpha, double mu, double L, int d, double sigma2,
                              double zeta, double x0_dist);

struct MiCertificate {
  GmmParams params;
  double rho2 = 0.0;
  Eigen::Matrix2d p_tilde = Eigen::Matrix2d::Zero();
  Eigen::Matrix3d lhs = Eigen::Matrix3d::Zero();
  double max_eig_lhs = kInf;
  bool certified = false;
};

/// Assembles the 3x3 dissipation inequality and checks it numerically.
MiCertificate mi_certify(const GmmParams& p, double rho2, const Eigen::Matrix2d& p_tilde,
                         double mu, double L);

struct SmoothGrid {
  int n_vartheta = 200;
  int n_psi = 200;
  double vartheta_max = 2.0;
  double psi_max = 2.5;
  int n_alpha_s0 = 60;
  double alpha_s0_min_ratio = 1e-3;  // smallest S_0 alpha, relative to 1/L

  std::vector<double> alphas_s0(double L) const;
  nlohmann::json to_json() const;
};

struct SmoothDesignSpec {
  int d = 1;
  double sigma2 = 1.0;
  double zeta = 0.95;
  double epsilon = 0.05;
  double phi = 0.99;
  SmoothGrid grid;
  bool agd_only = false;
  /// Benchmark 1 - sqrt(mu/L) instead of 1 - sqrt(alpha mu) at the candidate's alpha.
  bool global_benchmark = false;

  void validate() const;
};

struct SmoothCandidate {
  SmoothParams params;
  double rate_benchmark;
  double rate_rel;
  EvarBoundReport evar;
};

struct SmoothDesignResult {
  SmoothCandidate best;
  long candidates = 0;
  long feasible = 0;
};

/// Every admissible grid candidate (S_c lattice points and the S_0 slice).
std::vector<SmoothCandidate> smooth_sweep(double mu, double L, const SmoothDesignSpec& spec);

/// Minimizes the asymptotic EV@R bound subject to rate2 / rho_*^2 <= 1 + epsilon.
SmoothDesignResult design_ra_gmm_smooth(double mu, double L, const SmoothDesignSpec& spec);

nlohmann::json to_json(const SmoothParams& sp);
nlohmann::json to_json(const RiskBoundReport& r);
nlohmann::json to_json(const EvarBoundReport& r);
nlohmann::json to_json(const MiCertificate& c);

}  // namespace riskgmm
