#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskgmm/quad_analysis.hpp"

namespace riskgmm {

struct NoiseModel {
  enum class Kind { none, gaussian_isotropic, uniform_ball };

  Kind kind = Kind::none;
  double sigma2 = 0.0;  // per-coordinate variance for gaussian_isotropic
  double radius = 0.0;  // for uniform_ball

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma2);
  static NoiseModel uniform_ball(double radius);

  /// Sub-Gaussian variance proxy of ||w||: sigma2 for Gaussian, R^2 / (2 ln 2) for the ball.
  double variance_proxy() const;
  nlohmann::json to_json() const;
};

struct RunConfig {
  GmmParams params;
  int k_max = 300;
  int n_paths = 50;
  Vec x0;
  std::uint64_t seed = 0;
  int record_every = 1;
  /// Explicit steps to record; overrides record_every when nonempty.
  std::vector<int> record_steps;

  void validate(int dim) const;
  /// Sorted recorded steps (always includes 0 and k_max).
  std::vector<int> steps() const;
  nlohmann::json to_json() const;
};

struct Ensemble {
  std::vector<int> steps;
  Mat subopt;                   // n_paths x steps.size(); NaN after divergence
  Mat final_x;                  // n_paths x d, iterate x_{k_max}
  Mat final_x_prev;             // n_paths x d, iterate x_{k_max - 1}
  std::vector<char> diverged;   // per path
  int n_diverged = 0;
  nlohmann::json meta;

  int n_paths() const { return static_cast<int>(subopt.rows()); }
  int n_alive() const { return n_paths() - n_diverged; }
  /// Column index of step k; throws std::invalid_argument if k was not recorded.
  int index_of(int k) const;
  /// Suboptimalities of surviving paths at recorded step k.
  std::vector<double> samples(int k) const;
  std::vector<double> final_samples() const { return samples(steps.back()); }
  double mean(int k) const;
  double stddev(int k) const;
  /// Root-mean-square suboptimality (the band drawn around the mean in the plots).
  double rms(int k) const;
};

/// Simulates n_paths independent noisy GMM trajectories with x_{-1} = x_0. The
/// noise of path p at step k comes from Philox(seed, stream = p, substream = k),
/// so path p does not depend on n_paths or on thread scheduling.
Ensemble run_gmm(const Objective& obj, const RunConfig& cfg, const NoiseModel& noise);

/// (2 sigma^2/theta) log mean exp(theta S / (2 sigma^2)) over surviving paths at step k.
double empirical_entropic_risk(const Ensemble& ens, double sigma2, double theta, int k);

struct Ecdf {
  std::vector<double> values;     // sorted
  std::vector<double> fractions;  // i / n at values[i - 1]

  /// Fraction of samples <= t.
  double operator()(double t) const;
};

Ecdf ecdf(std::vector<double> samples);
Ecdf ecdf_final(const Ensemble& ens);

/// sup_t |F_a(t) - F_b(t)|.
double ks_distance(const Ecdf& a, const Ecdf& b);

/// Fraction of thresholds t with P_a{S >= t} <= P_b{S >= t} on the final samples.
double dominance_report(const Ensemble& a, const Ensemble& b, const std::vector<double>& thresholds);

/// Per-mode stationary variance 0.5 lambda Xi_11 of the 2x2 recursion
/// Xi <- M Xi M^T + sigma^2 B B^T, iterated until the update is below tol * max|Xi|.
std::vector<double> lyapunov_fixpoint_oracle(const GmmParams& p, const QuadraticObjective& obj,
                                             double sigma2, double tol = 1e-15);

/// Spectral radius of [[c, d], [1, 0]] via a general eigensolver.
double companion_radius_numeric(double c, double d);

/// The 2d x 2d iteration matrix A_Q in the original coordinates.
Mat aq_matrix(const GmmParams& p, const QuadraticObjective& obj);

/// Spectral radius of A_Q via a dense general eigensolver.
double spectral_radius_numeric(const GmmParams& p, const QuadraticObjective& obj);

struct McEvar {
  double value = kInf;
  double theta = 0.0;
};

/// min over theta_grid of empirical risk + (2 sigma^2 / theta) log(1/zeta) at step k.
McEvar mc_evar_oracle(const Ensemble& ens, double sigma2, double zeta,
                      const std::vector<double>& theta_grid, int k);

}  // namespace riskgmm
