#include "riskgmm/experiments.hpp"

#include <stdexcept>

namespace riskgmm {

const MethodRun& ExperimentResult::run(const std::string& name) const {
  for (const auto& r : runs)
    if (r.name == name) return r;
  throw std::invalid_argument("unknown method " + name);
}

std::vector<double> ExperimentResult::risk_trace(const std::string& name) const {
  const Ensemble& e = run(name).ensemble;
  std::vector<double> out;
  out.reserve(e.steps.size());
  for (int k : e.steps) out.push_back(empirical_entropic_risk(e, sigma2, theta, k));
  return out;
}

nlohmann::json QuadExperimentConfig::to_json() const {
  return {{"objective", "paper_quadratic"}, {"n_paths", n_paths}, {"k_max", k_max},
          {"seed", seed},                   {"sigma2", sigma2},   {"zeta", zeta},
          {"epsilon", epsilon},             {"theta", theta},     {"grid", grid.to_json()}};
}

namespace {

MethodRun simulate(const std::string& name, const GmmParams& p, nlohmann::json design,
                   const Objective& obj, int n_paths, int k_max, std::uint64_t seed,
                   double sigma2) {
  RunConfig rc;
  rc.params = p;
  rc.k_max = k_max;
  rc.n_paths = n_paths;
  rc.x0 = Vec::Ones(obj.dim());
  rc.seed = seed;
  return {name, p, std::move(design), run_gmm(obj, rc, NoiseModel::gaussian(sigma2))};
}

}  // namespace

ExperimentResult run_quad_experiment(const QuadExperimentConfig& cfg) {
  const QuadraticObjective obj = make_paper_quadratic();
  QuadDesignSpec spec;
  spec.zeta = cfg.zeta;
  spec.epsilon = cfg.epsilon;
  spec.sigma2 = cfg.sigma2;
  spec.grid = cfg.grid;
  const QuadDesignResult gmm = design_ra_gmm_quad(obj, spec);
  spec.agd_constraint = true;
  const QuadDesignResult agd = design_ra_gmm_quad(obj, spec);

  auto design_json = [](const QuadDesignResult& r) {
    return nlohmann::json{{"rate", r.rate},
                          {"rate_benchmark", r.rate_benchmark},
                          {"evar_bound", to_json(r.bound)},
                          {"evar_exact", to_json(r.exact)},
                          {"grid_points", r.grid_points},
                          {"stable_points", r.stable_points},
                          {"feasible_points", r.feasible_points}};
  };

  ExperimentResult res;
  res.experiment = "quad";
  res.sigma2 = cfg.sigma2;
  res.theta = cfg.theta;
  const double mu = obj.mu();
  const double L = obj.lsmooth();
  const std::vector<std::pair<std::string, std::pair<GmmParams, nlohmann::json>>> methods = {
      {"gd", {GmmParams::gd(1.0 / L), {{"rule", "alpha = 1/L"}}}},
      {"agd", {GmmParams::agd_standard(mu, L), {{"rule", "alpha = 1/L, beta = gamma = (sqrt(L)-sqrt(mu))/(sqrt(L)+sqrt(mu))"}}}},
      {"ra-agd", {agd.params, design_json(agd)}},
      {"ra-gmm", {gmm.params, design_json(gmm)}}};
  for (const auto& [name, pd] : methods) {
    res.runs.push_back(simulate(name, pd.first, pd.second, obj, cfg.n_paths, cfg.k_max, cfg.seed,
                                cfg.sigma2));
  }
  nlohmann::json methods_json = nlohmann::json::object();
  for (const auto& r : res.runs) {
    const auto exact = entropic_risk_exact(r.params, obj, cfg.sigma2, cfg.theta);
    methods_json[r.name] = {{"params", to_json(r.params)},
                            {"rho", spectral_radius(r.params, obj)},
                            {"stationary_mean", exact.mean()},
                            {"stationary_risk", exact.feasible ? nlohmann::json(exact.entropic_risk)
                                                               : nlohmann::json(nullptr)},
                            {"final_mean", r.ensemble.mean(cfg.k_max)},
                            {"n_diverged", r.ensemble.n_diverged},
                            {"design", r.design}};
  }
  res.summary = {{"experiment", "quad"},
                 {"config", cfg.to_json()},
                 {"objective", obj.descriptor()},
                 {"methods", methods_json}};
  return res;
}

LogregExperimentConfig LogregExperimentConfig::paper_scale() {
  LogregExperimentConfig c;
  c.d = 100;
  c.n = 1000;
  return c;
}

nlohmann::json LogregExperimentConfig::to_json() const {
  return {{"d", d},
          {"n", n},
          {"reg", reg},
          {"feature_std", feature_std},
          {"data_seed", data_seed},
          {"n_paths", n_paths},
          {"k_max", k_max},
          {"seed", seed},
          {"sigma2", sigma2},
          {"zeta", zeta},
          {"epsilon", epsilon},
          {"phi", phi},
          {"theta", theta},
          {"global_benchmark", global_benchmark},
          {"grid", grid.to_json()}};
}

ExperimentResult run_logreg_experiment(const LogregExperimentConfig& cfg) {
  const LogisticObjective obj =
      make_synthetic_logreg(cfg.d, cfg.n, cfg.reg, cfg.feature_std, cfg.data_seed);
  const double mu = obj.mu();
  const double L = obj.lsmooth();

  SmoothDesignSpec spec;
  spec.d = cfg.d;
  spec.sigma2 = cfg.sigma2;
  spec.zeta = cfg.zeta;
  spec.epsilon = cfg.epsilon;
  spec.phi = cfg.phi;
  spec.grid = cfg.grid;
  spec.global_benchmark = cfg.global_benchmark;
  const SmoothDesignResult gmm = design_ra_gmm_smooth(mu, L, spec);
  spec.agd_only = true;
  const SmoothDesignResult agd = design_ra_gmm_smooth(mu, L, spec);

  auto design_json = [](const SmoothDesignResult& r) {
    return nlohmann::json{{"smooth_params", to_json(r.best.params)},
                          {"rate_benchmark", r.best.rate_benchmark},
                          {"rate_rel", r.best.rate_rel},
                          {"evar_bound", to_json(r.best.evar)},
                          {"candidates", r.candidates},
                          {"feasible", r.feasible}};
  };

  ExperimentResult res;
  res.experiment = "logreg";
  res.sigma2 = cfg.sigma2;
  res.theta = cfg.theta;
  const std::vector<std::pair<std::string, std::pair<GmmParams, nlohmann::json>>> methods = {
      {"gd", {GmmParams::gd(1.0 / L), {{"rule", "alpha = 1/L"}}}},
      {"agd", {GmmParams::agd_standard(mu, L), {{"rule", "alpha = 1/L, beta = gamma = (sqrt(L)-sqrt(mu))/(sqrt(L)+sqrt(mu))"}}}},
      {"ra-agd", {agd.best.params.base, design_json(agd)}},
      {"ra-gmm", {gmm.best.params.base, design_json(gmm)}}};
  for (const auto& [name, pd] : methods) {
    res.runs.push_back(simulate(name, pd.first, pd.second, obj, cfg.n_paths, cfg.k_max, cfg.seed,
                                cfg.sigma2));
  }
  nlohmann::json methods_json = nlohmann::json::object();
  for (const auto& r : res.runs) {
    methods_json[r.name] = {{"params", to_json(r.params)},
                            {"final_mean", r.ensemble.mean(cfg.k_max)},
                            {"n_diverged", r.ensemble.n_diverged},
                            {"design", r.design}};
  }
  res.summary = {{"experiment", "logreg"},
                 {"config", cfg.to_json()},
                 {"objective", obj.descriptor()},
                 {"methods", methods_json}};
  return res;
}

}  // namespace riskgmm
