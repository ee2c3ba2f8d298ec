// riskgmm: analyze, design, reproduce and verify risk-averse momentum parameters.
//
// Exit codes: 0 ok, 2 infeasible or invalid input, 3 verification failure.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "riskgmm/experiments.hpp"
#include "riskgmm/io.hpp"
#include "riskgmm/verify.hpp"

namespace fs = std::filesystem;
using namespace riskgmm;
using nlohmann::json;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitVerify = 3;

std::unique_ptr<Objective> load_objective(const std::string& spec) {
  if (spec == "paper") return std::make_unique<QuadraticObjective>(make_paper_quadratic());
  if (spec == "figure1") return std::make_unique<QuadraticObjective>(make_figure1_quadratic());
  if (spec == "logreg")
    return std::make_unique<LogisticObjective>(make_synthetic_logreg(20, 200, 1.0, 5.0, 7));
  if (spec == "logreg-paper")
    return std::make_unique<LogisticObjective>(make_synthetic_logreg(100, 1000, 1.0, 5.0, 7));
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("unknown objective '" + spec + "' (not a preset or readable file)");
  return objective_from_json(json::parse(in));
}

// Accepts a number, "1/L", "c/L" or "2/(mu+L)".
double parse_alpha(const std::string& s, double mu, double L) {
  if (s == "2/(mu+L)") return 2.0 / (mu + L);
  const auto pos = s.find("/L");
  if (pos != std::string::npos && pos + 2 == s.size())
    return (pos == 0 ? 1.0 : std::stod(s.substr(0, pos))) / L;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("cannot parse stepsize '" + s + "'");
  return v;
}

// Accepts a number or "agd" for (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)).
double parse_momentum(const std::string& s, double mu, double L) {
  if (s == "agd") return GmmParams::agd_standard(mu, L).beta;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("cannot parse momentum '" + s + "'");
  return v;
}

std::string violated_inequality(const GmmParams& p, const QuadraticObjective& obj) {
  std::ostringstream os;
  for (const auto& m : mode_table(p, obj)) {
    if (!(std::abs(m.c) < std::abs(1.0 - m.d)))
      os << "  lambda=" << m.lambda << ": |c| < |1-d| violated (c=" << m.c << ", d=" << m.d << ")\n";
    if (!(m.u > 0.0)) os << "  lambda=" << m.lambda << ": u > 0 violated (u=" << m.u << ")\n";
  }
  return os.str();
}

std::string set_diagnostic(const SetMembership& m) {
  std::ostringstream os;
  os << "  S_0=" << m.in_S0 << " S_+=" << m.in_Splus << " S_-=" << m.in_Sminus
     << " S_1=" << m.in_S1 << " S_c=" << m.in_Sc << "\n";
  if (!m.in_Splus && !m.in_Sminus) os << "  neither the S_+ nor the S_- inequalities hold\n";
  if (!m.in_S1) os << "  the S_1 inequality fails (or psi = 1 with vartheta != 1)\n";
  return os.str();
}

json null_if_inf(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> g_argv;  // original arguments, stored in manifests

json manifest_for(const std::string& command, const json& extra) {
  json m{{"command", command}, {"argv", g_argv}, {"csv_schema", kCsvHeader}};
  m.update(extra);
  return m;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeOpts {
  std::string objective = "paper";
  std::string quad;
  bool smooth = false;
  std::string method = "custom";
  std::string alpha, beta, gamma;
  double vartheta = 1.0, psi = 1.0;
  double theta = 1.0, zeta = 0.95, phi = 0.99, sigma2 = 1.0;
  int k = 0;
};

int cmd_analyze_quad(const AnalyzeOpts& o) {
  const auto obj_ptr = load_objective(o.quad.empty() ? o.objective : o.quad);
  const auto* obj = dynamic_cast<const QuadraticObjective*>(obj_ptr.get());
  if (!obj) throw std::invalid_argument("quadratic analysis needs a quadratic objective");
  const double mu = obj->mu(), L = obj->lsmooth();
  GmmParams p;
  if (o.method == "gd") {
    p = GmmParams::gd(o.alpha.empty() ? 1.0 / L : parse_alpha(o.alpha, mu, L));
  } else if (o.method == "agd") {
    p = GmmParams::agd_standard(mu, L);
    if (!o.alpha.empty()) p.alpha = parse_alpha(o.alpha, mu, L);
  } else {
    if (o.alpha.empty()) throw std::invalid_argument("--alpha is required");
    p.alpha = parse_alpha(o.alpha, mu, L);
    p.beta = o.beta.empty() ? 0.0 : parse_momentum(o.beta, mu, L);
    const bool same = o.beta == "agd" && o.method != "hb";
    p.gamma = o.method == "hb" ? 0.0
              : o.gamma.empty() ? (same ? p.beta : 0.0)
                                : parse_momentum(o.gamma, mu, L);
  }
  p.validate();
  const SetStatus st = stable_set_status(p, *obj);
  if (st != SetStatus::inside) {
    std::cerr << "parameters are " << (st == SetStatus::boundary ? "on the boundary of" : "outside")
              << " the stable set S_q:\n"
              << violated_inequality(p, *obj);
    return kExitInfeasible;
  }
  const auto risk = entropic_risk_exact(p, *obj, o.sigma2, o.theta);
  json modes = json::array();
  for (const auto& m : mode_table(p, *obj))
    modes.push_back({{"lambda", m.lambda}, {"c", m.c}, {"d", m.d}, {"rho", m.rho}, {"u", m.u}});
  const json out{{"objective", obj->descriptor()},
                 {"params", to_json(p)},
                 {"rho", spectral_radius(p, *obj)},
                 {"stable", true},
                 {"theta", o.theta},
                 {"theta_feasible", in_feasible_set(p, *obj, o.theta)},
                 {"entropic_risk", null_if_inf(risk.entropic_risk)},
                 {"stationary_mean", risk.mean()},
                 {"evar_exact", to_json(evar_exact(p, *obj, o.sigma2, o.zeta))},
                 {"evar_bound", to_json(evar_bound(p, *obj, o.sigma2, o.zeta))},
                 {"modes", modes}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_analyze_smooth(const AnalyzeOpts& o) {
  const auto obj = load_objective(o.objective);
  const double mu = obj->mu(), L = obj->lsmooth();
  const int d = obj->dim();
  const Vec x0 = Vec::Ones(d);
  json out{{"objective", obj->descriptor()}};
  if (o.method == "gd") {
    const double a = o.alpha.empty() ? 1.0 / L : parse_alpha(o.alpha, mu, L);
    const double dist = (x0 - obj->xstar()).norm();
    out["params"] = to_json(GmmParams::gd(a));
    out["rho_gd"] = gd_rate(a, mu, L);
    out["risk_bound"] = to_json(gd_risk_bound(a, mu, L, d, o.sigma2, o.theta, dist));
    out["evar_bound"] = to_json(gd_evar_bound(a, mu, L, d, o.sigma2, o.zeta, dist));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  const ThetaPsi tp{o.vartheta, o.psi};
  const SetMembership m = classify_theta_psi(tp, mu, L);
  if (!m.admissible()) {
    std::cerr << "(vartheta, psi) = (" << tp.vartheta << ", " << tp.psi
              << ") is outside S_c and S_0:\n"
              << set_diagnostic(m);
    return kExitInfeasible;
  }
  std::optional<double> a0;
  if (m.in_S0) a0 = o.alpha.empty() ? 1.0 / L : parse_alpha(o.alpha, mu, L);
  const SmoothParams sp = smooth_params(tp, mu, L, a0);
  const double v0 = lyapunov_value(sp, *obj, x0, x0);
  const double s2 = o.sigma2;
  out["sets"] = {{"S0", m.in_S0}, {"Splus", m.in_Splus}, {"Sminus", m.in_Sminus},
                 {"S1", m.in_S1}, {"Sc", m.in_Sc}};
  out["smooth_params"] = to_json(sp);
  out["lyapunov_z0"] = v0;
  out["mi_certificate"] = to_json(mi_certify(sp.base, sp.rate2, lyapunov_matrix(sp), mu, L));
  out["expected_subopt_bound"] = expected_subopt_bound(sp, d, s2, v0, o.k, NoiseKind::gaussian);
  out["risk_bound_gaussian"] = to_json(risk_bound_gaussian(sp, d, s2, o.theta, v0));
  out["evar_bound_gaussian"] = to_json(evar_bound_gaussian(sp, d, s2, o.zeta, o.phi, v0));
  out["risk_bound_subgaussian"] = to_json(risk_bound_subgaussian(sp, s2, o.theta, v0));
  out["evar_bound_subgaussian"] = to_json(evar_bound_subgaussian(sp, s2, o.zeta, o.phi, v0));
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(obj.get())) {
    const double r = spectral_radius(sp.base, *q);
    out["quadratic_rho2"] = r * r;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------- design

struct DesignOpts {
  std::string mode = "quad";
  std::string objective = "paper";
  double zeta = 0.95, phi = 0.99, sigma2 = 1.0;
  double epsilon = -1.0;  // mode-dependent default
  bool agd = false, global_benchmark = false, no_sweep = false;
  std::vector<double> thetas{1.0, 5.0};
  QuadGrid qgrid;
  SmoothGrid sgrid;
  std::string out = "out/design";
};

int cmd_design(const DesignOpts& o) {
  const auto obj = load_objective(o.objective);
  const fs::path dir(o.out);
  const json manifest = manifest_for("design", {{"objective", obj->descriptor()}});
  write_json(dir / "manifest.json", manifest);
  json result;
  if (o.mode == "quad") {
    const auto* q = dynamic_cast<const QuadraticObjective*>(obj.get());
    if (!q) throw std::invalid_argument("quad design needs a quadratic objective");
    QuadDesignSpec spec;
    spec.zeta = o.zeta;
    spec.epsilon = o.epsilon < 0 ? 0.25 : o.epsilon;
    spec.sigma2 = o.sigma2;
    spec.grid = o.qgrid;
    spec.agd_constraint = o.agd;
    spec.validate();
    const QuadDesignResult r = design_ra_gmm_quad(*q, spec);
    result = {{"mode", "quad"},
              {"method", o.agd ? "ra-agd" : "ra-gmm"},
              {"params", to_json(r.params)},
              {"rate", r.rate},
              {"rate_benchmark", r.rate_benchmark},
              {"constraint_slack", (1.0 + spec.epsilon) * r.rate_benchmark - r.rate * r.rate},
              {"evar_bound", to_json(r.bound)},
              {"evar_exact", to_json(r.exact)},
              {"zeta", spec.zeta},
              {"epsilon", spec.epsilon},
              {"grid_meta", spec.grid.to_json()},
              {"grid_points", r.grid_points},
              {"stable_points", r.stable_points},
              {"feasible_points", r.feasible_points}};
    if (!o.no_sweep) {
      std::vector<std::string> cols{"alpha", "beta", "gamma", "rho"};
      for (double t : o.thetas) cols.push_back("risk_theta_" + CsvTable::num(t));
      cols.push_back("evar_exact");
      cols.push_back("evar_bound");
      CsvTable t(cols);
      for (const auto& row : quad_sweep(*q, spec, o.thetas)) {
        std::vector<std::string> cells{CsvTable::num(row.params.alpha), CsvTable::num(row.params.beta),
                                       CsvTable::num(row.params.gamma), CsvTable::num(row.rho)};
        for (double v : row.risk) cells.push_back(CsvTable::num(v));
        cells.push_back(CsvTable::num(row.evar_exact));
        cells.push_back(CsvTable::num(row.evar_bound));
        t.add_row(cells);
      }
      write_atomic(dir / "sweep.csv", t.str());
    }
  } else {
    SmoothDesignSpec spec;
    spec.d = obj->dim();
    spec.sigma2 = o.sigma2;
    spec.zeta = o.zeta;
    spec.epsilon = o.epsilon < 0 ? 0.05 : o.epsilon;
    spec.phi = o.phi;
    spec.grid = o.sgrid;
    spec.agd_only = o.agd;
    spec.global_benchmark = o.global_benchmark;
    const SmoothDesignResult r = design_ra_gmm_smooth(obj->mu(), obj->lsmooth(), spec);
    const SmoothParams& sp = r.best.params;
    result = {{"mode", "smooth"},
              {"method", o.agd ? "ra-agd" : "ra-gmm"},
              {"params", to_json(sp.base)},
              {"smooth_params", to_json(sp)},
              {"rate2", sp.rate2},
              {"rate_benchmark", r.best.rate_benchmark},
              {"benchmark", spec.global_benchmark ? "global" : "per-candidate"},
              {"constraint_slack", (1.0 + spec.epsilon) * r.best.rate_benchmark - sp.rate2},
              {"evar_bound", to_json(r.best.evar)},
              {"mi_certificate", to_json(mi_certify(sp.base, sp.rate2, lyapunov_matrix(sp), sp.mu, sp.L))},
              {"zeta", spec.zeta},
              {"epsilon", spec.epsilon},
              {"phi", spec.phi},
              {"grid_meta", spec.grid.to_json()},
              {"candidates", r.candidates},
              {"feasible", r.feasible}};
    if (!o.no_sweep) {
      CsvTable t({"vartheta", "psi", "alpha", "beta", "gamma", "rate2", "rate_rel", "evar_bound",
                  "condition_branch"});
      for (const auto& c : smooth_sweep(obj->mu(), obj->lsmooth(), spec)) {
        const auto& p = c.params;
        t.add_row({CsvTable::num(p.source.vartheta), CsvTable::num(p.source.psi),
                   CsvTable::num(p.base.alpha), CsvTable::num(p.base.beta),
                   CsvTable::num(p.base.gamma), CsvTable::num(p.rate2), CsvTable::num(c.rate_rel),
                   CsvTable::num(c.evar.asymptotic_bound), c.evar.condition_holds ? "1" : "2"});
      }
      write_atomic(dir / "sweep.csv", t.str());
    }
  }
  write_json(dir / "design.json", result);
  std::cout << result.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceOpts {
  std::string experiment = "quad";
  bool paper_scale = false;
  int paths = -1, k = -1;
  std::uint64_t seed = 1, data_seed = 7;
  double theta = 5.0;
  bool per_candidate = false;
  std::string out = "out/reproduce";
};

void write_experiment(const ExperimentResult& res, const fs::path& dir) {
  CsvTable longt({"method", "path", "k", "subopt"});
  CsvTable summ({"method", "k", "mean", "std", "rms", "n_alive"});
  CsvTable trace({"method", "k", "theta", "risk"});
  CsvTable ecdft({"method", "value", "fraction"});
  for (const auto& r : res.runs) {
    append_ensemble_long(longt, r.name, r.ensemble);
    append_ensemble_summary(summ, r.name, r.ensemble);
    const auto tr = res.risk_trace(r.name);
    for (std::size_t j = 0; j < tr.size(); ++j)
      trace.add_row({r.name, std::to_string(r.ensemble.steps[j]), CsvTable::num(res.theta),
                     CsvTable::num(tr[j])});
    const Ecdf e = ecdf_final(r.ensemble);
    for (std::size_t j = 0; j < e.values.size(); ++j)
      ecdft.add_row({r.name, CsvTable::num(e.values[j]), CsvTable::num(e.fractions[j])});
  }
  write_atomic(dir / "ensemble_long.csv", longt.str());
  write_atomic(dir / "ensemble_summary.csv", summ.str());
  write_atomic(dir / "risk_trace.csv", trace.str());
  write_atomic(dir / "ecdf_final.csv", ecdft.str());
  write_json(dir / "summary.json", res.summary);
}

int cmd_reproduce(const ReproduceOpts& o) {
  const fs::path dir(o.out);
  if (o.experiment == "quad") {
    QuadExperimentConfig cfg;
    if (o.paths > 0) cfg.n_paths = o.paths;
    if (o.k > 0) cfg.k_max = o.k;
    cfg.seed = o.seed;
    cfg.theta = o.theta;
    write_json(dir / "manifest.json", manifest_for("reproduce", {{"config", cfg.to_json()}}));
    write_experiment(run_quad_experiment(cfg), dir);
  } else {
    LogregExperimentConfig cfg = o.paper_scale ? LogregExperimentConfig::paper_scale()
                                               : LogregExperimentConfig{};
    if (o.paths > 0) cfg.n_paths = o.paths;
    if (o.k > 0) cfg.k_max = o.k;
    cfg.seed = o.seed;
    cfg.data_seed = o.data_seed;
    cfg.theta = o.theta;
    cfg.global_benchmark = !o.per_candidate;
    write_json(dir / "manifest.json", manifest_for("reproduce", {{"config", cfg.to_json()}}));
    write_experiment(run_logreg_experiment(cfg), dir);
  }
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyOpts {
  std::string suite = "all";
  std::uint64_t seed = 2024;
  int paths = 2000;
  std::string out;
};

int cmd_verify(const VerifyOpts& o) {
  std::vector<CheckResult> results;
  auto add = [&](CheckResult r) { results.push_back(std::move(r)); };
  auto add_all = [&](std::vector<CheckResult> rs) {
    for (auto& r : rs) results.push_back(std::move(r));
  };
  const bool all = o.suite == "all";
  if (all || o.suite == "oracles") {
    add(check_companion_radius(10000, o.seed));
    add(check_aq_radius(1000, o.seed + 1));
    add(check_stationary_variance(1000, o.seed + 2));
    add_all(check_set_identities(5000, o.seed + 3));
    add(check_evar_dominance(500, o.seed + 4));
    add_all(check_limits(o.seed + 5));
  }
  if (all || o.suite == "mi") {
    const auto quad10 = make_paper_quadratic();
    add(check_mi_certification(200, o.seed + 6, quad10.mu(), quad10.lsmooth()));
    add(check_lyapunov_contraction(quad10, 500, o.seed + 7));
  }
  if (all || o.suite == "bounds") {
    add_all(check_bound_coverage(o.paths, {50, 200, 1000}, o.seed + 8));
    add(check_subgaussian_thresholds(100, o.seed + 9));
    add_all(check_subgaussian_coverage(o.paths, {50, 200, 1000}, o.seed + 10));
  }
  bool ok = true;
  json report = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": metric " << r.metric << " (tol "
              << r.tolerance << "); " << r.detail << "\n";
    report.push_back(r.to_json());
  }
  if (!o.out.empty()) write_json(o.out, {{"suite", o.suite}, {"seed", o.seed}, {"checks", report}});
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv + 1, argv + argc);
  CLI::App app{"Risk-averse generalized momentum: analysis, design and simulation"};
  app.require_subcommand(1);

  AnalyzeOpts ao;
  auto* an = app.add_subcommand("analyze", "Rate, sets, risk and EV@R for given parameters");
  an->add_option("--objective", ao.objective, "paper | figure1 | logreg | logreg-paper | descriptor.json");
  an->add_option("--quad", ao.quad, "Quadratic analysis on this objective (paper | figure1 | file)");
  an->add_flag("--smooth", ao.smooth, "Smooth strongly convex analysis over (vartheta, psi)");
  an->add_option("--method", ao.method, "gd | agd | hb | custom")
      ->check(CLI::IsMember({"gd", "agd", "hb", "custom"}));
  an->add_option("--alpha", ao.alpha, "Stepsize: number, 1/L, c/L or 2/(mu+L)");
  an->add_option("--beta", ao.beta, "Momentum: number or agd");
  an->add_option("--gamma", ao.gamma, "Gradient extrapolation: number or agd");
  an->add_option("--vartheta", ao.vartheta);
  an->add_option("--psi", ao.psi);
  an->add_option("--theta", ao.theta, "Risk parameter")->check(CLI::PositiveNumber);
  an->add_option("--zeta", ao.zeta)->check(CLI::Range(0.0, 1.0));
  an->add_option("--phi", ao.phi)->check(CLI::Range(0.0, 1.0));
  an->add_option("--sigma2", ao.sigma2)->check(CLI::PositiveNumber);
  an->add_option("--k", ao.k, "Iteration for finite-horizon bounds")->check(CLI::NonNegativeNumber);

  DesignOpts dopt;
  auto* de = app.add_subcommand("design", "Grid-search RA-GMM / RA-AGD parameters");
  de->add_option("--mode", dopt.mode)->check(CLI::IsMember({"quad", "smooth"}));
  de->add_option("--objective", dopt.objective);
  de->add_option("--zeta", dopt.zeta)->check(CLI::Range(0.0, 1.0));
  de->add_option("--epsilon", dopt.epsilon, "Rate slack (default 0.25 quad, 0.05 smooth)");
  de->add_option("--phi", dopt.phi)->check(CLI::Range(0.0, 1.0));
  de->add_option("--sigma2", dopt.sigma2)->check(CLI::PositiveNumber);
  de->add_flag("--agd", dopt.agd, "Restrict to beta = gamma (quad) or vartheta = psi = 1 (smooth)");
  de->add_flag("--global-benchmark", dopt.global_benchmark,
               "Smooth mode: benchmark rate 1 - sqrt(mu/L) instead of 1 - sqrt(alpha mu)");
  de->add_flag("--no-sweep", dopt.no_sweep, "Skip the sweep CSV");
  de->add_option("--theta", dopt.thetas, "Risk columns in the quad sweep");
  de->add_option("--grid-alpha", dopt.qgrid.n_alpha);
  de->add_option("--grid-beta", dopt.qgrid.n_beta);
  de->add_option("--grid-gamma", dopt.qgrid.n_gamma);
  de->add_option("--grid-alpha-min-ratio", dopt.qgrid.alpha_min_ratio);
  de->add_option("--grid-vartheta", dopt.sgrid.n_vartheta);
  de->add_option("--grid-psi", dopt.sgrid.n_psi);
  de->add_option("--grid-alpha-s0", dopt.sgrid.n_alpha_s0);
  de->add_option("--out", dopt.out, "Output directory");

  ReproduceOpts ro;
  auto* re = app.add_subcommand("reproduce", "Run the quadratic or logistic experiment");
  re->add_option("--experiment", ro.experiment)->check(CLI::IsMember({"quad", "logreg"}));
  auto* desk = re->add_flag("--desk", "Desk-scale logistic instance (d=20, N=200; default)");
  re->add_flag("--paper-scale", ro.paper_scale, "Full-size logistic instance (d=100, N=1000)")
      ->excludes(desk);
  re->add_option("--paths", ro.paths);
  re->add_option("--k", ro.k, "Iterations");
  re->add_option("--seed", ro.seed);
  re->add_option("--data-seed", ro.data_seed);
  re->add_option("--theta", ro.theta)->check(CLI::PositiveNumber);
  re->add_flag("--per-candidate-benchmark", ro.per_candidate,
               "Logistic design with rho_*^2 = 1 - sqrt(alpha mu) per candidate");
  re->add_option("--out", ro.out);

  VerifyOpts vo;
  auto* ve = app.add_subcommand("verify", "Run oracle comparison suites");
  ve->add_option("--suite", vo.suite)->check(CLI::IsMember({"oracles", "bounds", "mi", "all"}));
  ve->add_option("--seed", vo.seed);
  ve->add_option("--paths", vo.paths, "Monte Carlo paths for the bounds suite");
  ve->add_option("--out", vo.out, "Optional JSON report path");

  std::string rerun_manifest, rerun_out;
  auto* rr = app.add_subcommand("rerun", "Re-run a command from its manifest.json");
  rr->add_option("manifest", rerun_manifest)->required()->check(CLI::ExistingFile);
  rr->add_option("--out", rerun_out, "Output directory (default: the manifest's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInfeasible;
  }

  try {
    if (*an) return ao.smooth ? cmd_analyze_smooth(ao) : cmd_analyze_quad(ao);
    if (*de) return cmd_design(dopt);
    if (*re) return cmd_reproduce(ro);
    if (*ve) return cmd_verify(vo);
    if (*rr) {
      std::ifstream in(rerun_manifest);
      const json m = json::parse(in);
      std::vector<std::string> args{"riskgmm"};
      const auto old = m.at("argv").get<std::vector<std::string>>();
      for (std::size_t i = 0; i < old.size(); ++i) {
        if (old[i] == "--out") {
          ++i;
          continue;
        }
        args.push_back(old[i]);
      }
      args.push_back("--out");
      args.push_back(rerun_out.empty() ? fs::path(rerun_manifest).parent_path().string() : rerun_out);
      std::vector<char*> cargs;
      for (auto& s : args) cargs.push_back(s.data());
      return main(static_cast<int>(cargs.size()), cargs.data());
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return 0;
}
