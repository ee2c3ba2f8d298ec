#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskgmm/quad_analysis.hpp"
#include "riskgmm/simulator.hpp"
#include "riskgmm/smooth_analysis.hpp"

namespace riskgmm {

struct MethodRun {
  std::string name;
  GmmParams params;
  nlohmann::json design;  // how the parameters were obtained
  Ensemble ensemble;
};

struct ExperimentResult {
  std::string experiment;
  double sigma2 = 1.0;
  double theta = 5.0;
  std::vector<MethodRun> runs;
  nlohmann::json summary;

  const MethodRun& run(const std::string& name) const;
  /// Empirical entropic risk at theta for every recorded step.
  std::vector<double> risk_trace(const std::string& name) const;
};

/// Defaults: 10-d quadratic Q = diag(i^2), 50 paths x 300 steps, x0 = ones, sigma^2 = 1.
struct QuadExperimentConfig {
  int n_paths = 50;
  int k_max = 300;
  std::uint64_t seed = 1;
  double sigma2 = 1.0;
  double zeta = 0.95;
  double epsilon = 0.25;
  double theta = 5.0;
  QuadGrid grid;

  nlohmann::json to_json() const;
};

/// Runs GD(1/L), standard AGD, RA-AGD and RA-GMM.
ExperimentResult run_quad_experiment(const QuadExperimentConfig& cfg);

/// Defaults: desk-scale synthetic logistic regression, 50 paths x 600 steps.
struct LogregExperimentConfig {
  int d = 20;
  int n = 200;
  double reg = 1.0;
  double feature_std = 5.0;
  std::uint64_t data_seed = 7;
  int n_paths = 50;
  int k_max = 600;
  std::uint64_t seed = 1;
  double sigma2 = 1.0;
  double zeta = 0.95;
  double epsilon = 0.05;
  double phi = 0.99;
  double theta = 5.0;
  bool global_benchmark = true;
  SmoothGrid grid;

  static LogregExperimentConfig paper_scale();
  nlohmann::json to_json() const;
};

ExperimentResult run_logreg_experiment(const LogregExperimentConfig& cfg);

}  // namespace riskgmm
