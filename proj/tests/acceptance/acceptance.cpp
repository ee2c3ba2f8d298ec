// Acceptance suite: one PASS/FAIL line per primary criterion, exit 1 if any fails.
// Runtime limits are part of the pass condition where a criterion states one.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "riskgmm/experiments.hpp"
#include "riskgmm/verify.hpp"

using namespace riskgmm;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool passed = true;
  std::vector<std::string> lines;

  void add(const CheckResult& r) {
    passed = passed && r.passed;
    char buf[96];
    std::snprintf(buf, sizeof buf, "metric %.4g, tol %.3g", r.metric, r.tolerance);
    lines.push_back((r.passed ? "ok   " : "FAIL ") + r.name + " [" + buf + "] " + r.detail);
  }
  void add(const std::vector<CheckResult>& rs) {
    for (const auto& r : rs) add(r);
  }
  void add(const std::string& name, bool ok, const std::string& detail) {
    passed = passed && ok;
    lines.push_back((ok ? "ok   " : "FAIL ") + name + ": " + detail);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  body(out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = out.passed;
  std::string timing = num(secs) + " s";
  if (limit_s > 0) {
    timing += " (limit " + num(limit_s) + " s)";
    ok = ok && secs < limit_s;
  }
  std::printf("%s %2d %s  %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), timing.c_str());
  for (const auto& l : out.lines) std::printf("       %s\n", l.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double window_mean(const Ensemble& e, int k_lo, int k_hi) {
  double acc = 0.0;
  int n = 0;
  for (int k : e.steps)
    if (k >= k_lo && k <= k_hi) {
      acc += e.mean(k);
      ++n;
    }
  return acc / n;
}

std::vector<double> pooled_deciles(const Ensemble& a, const Ensemble& b) {
  std::vector<double> pool = a.final_samples();
  const auto sb = b.final_samples();
  pool.insert(pool.end(), sb.begin(), sb.end());
  std::sort(pool.begin(), pool.end());
  std::vector<double> t;
  for (int q = 1; q <= 9; ++q) t.push_back(pool[static_cast<size_t>(q * (pool.size() - 1) / 10)]);
  return t;
}

}  // namespace

int main() {
  criterion(1, "spectral-radius oracle", 10.0, [](Outcome& o) {
    o.add(check_companion_radius(10000, kSeed));
    o.add(check_aq_radius(1000, kSeed + 1));
  });

  criterion(2, "stationary-variance oracle", 10.0,
            [](Outcome& o) { o.add(check_stationary_variance(1000, kSeed + 2)); });

  criterion(3, "set identities", 0, [](Outcome& o) { o.add(check_set_identities(5000, kSeed + 3)); });

  // Criteria 4 and 5 share the stationary RA-GMM ensemble.
  const QuadraticObjective quad10 = make_paper_quadratic();
  QuadDesignSpec spec;
  spec.zeta = 0.95;
  spec.epsilon = 0.25;
  const GmmParams ra = design_ra_gmm_quad(quad10, spec).params;
  Ensemble stationary;

  criterion(4, "entropic risk vs Monte Carlo", 120.0, [&](Outcome& o) {
    RunConfig rc;
    rc.params = ra;
    rc.k_max = 2000;
    rc.n_paths = 100000;
    rc.x0 = Vec::Ones(quad10.dim());
    rc.seed = kSeed + 4;
    rc.record_steps = {2000};
    stationary = run_gmm(quad10, rc, NoiseModel::gaussian(1.0));
    for (double theta : {1.0, 5.0}) {
      if (!in_feasible_set(ra, quad10, theta)) {
        o.add("theta=" + num(theta), false, "outside the feasible set for the designed parameters");
        continue;
      }
      o.add(check_risk_vs_mc(stationary, ra, 1.0, theta, 2000, 0.05));
    }
  });

  criterion(5, "EV@R bound dominance", 0, [&](Outcome& o) {
    o.add(check_evar_dominance(500, kSeed + 5));
    o.add(check_mc_evar_vs_bound(stationary, ra, 1.0, 0.95, 2000));
  });

  criterion(6, "matrix inequality certification", 0, [&](Outcome& o) {
    o.add(check_mi_certification(200, kSeed + 6, quad10.mu(), quad10.lsmooth()));
  });

  criterion(7, "Lyapunov contraction", 0, [&](Outcome& o) {
    o.add(check_lyapunov_contraction(quad10, 500, kSeed + 7));
    const LogisticObjective logreg = make_synthetic_logreg(20, 200, 1.0, 5.0, 7);
    auto r = check_lyapunov_contraction(logreg, 500, kSeed + 7);
    r.name += " (logistic d=20, N=200)";
    o.add(r);
  });

  criterion(8, "bound coverage in simulation", 180.0,
            [](Outcome& o) { o.add(check_bound_coverage(10000, {50, 200, 1000}, kSeed + 8)); });

  criterion(9, "quadratic experiment reproduction", 60.0, [](Outcome& o) {
    QuadExperimentConfig cfg;
    cfg.seed = kSeed + 9;
    const ExperimentResult res = run_quad_experiment(cfg);
    const auto& gd = res.run("gd");
    const auto& agd = res.run("agd");
    const QuadraticObjective q = make_paper_quadratic();
    const double rho_agd = spectral_radius(agd.params, q);
    const double m_gd = window_mean(gd.ensemble, 250, 300);
    const double m_agd = window_mean(agd.ensemble, 250, 300);
    for (const char* name : {"ra-gmm", "ra-agd"}) {
      const auto& r = res.run(name);
      const double rho = spectral_radius(r.params, q);
      o.add(std::string("(a) ") + name + " rho > AGD rho", rho > rho_agd,
            num(rho) + " vs " + num(rho_agd));
      const double m = window_mean(r.ensemble, 250, 300);
      o.add(std::string("(b) ") + name + " mean over k in [250,300] below GD", m < m_gd,
            num(m) + " vs " + num(m_gd));
      o.add(std::string("(b) ") + name + " mean over k in [250,300] below AGD", m < m_agd,
            num(m) + " vs " + num(m_agd));
      const double frac =
          dominance_report(r.ensemble, agd.ensemble, pooled_deciles(r.ensemble, agd.ensemble));
      o.add(std::string("(c) ") + name + " ECDF dominance over AGD at k=300", frac >= 0.9,
            "fraction " + num(frac) + " of pooled deciles");
    }
  });

  criterion(10, "logistic experiment at desk scale", 180.0, [](Outcome& o) {
    LogregExperimentConfig cfg;
    cfg.n_paths = 200;
    cfg.seed = kSeed + 10;
    const ExperimentResult res = run_logreg_experiment(cfg);
    const auto& methods = res.summary.at("methods");
    const double b_gmm = methods.at("ra-gmm").at("design").at("evar_bound").at("asymptotic_bound");
    const double b_agd = methods.at("ra-agd").at("design").at("evar_bound").at("asymptotic_bound");
    o.add("RA-GMM bound <= RA-AGD bound", b_gmm <= b_agd, num(b_gmm) + " vs " + num(b_agd));
    auto plateau = [&](const std::string& name) {
      const auto tr = res.risk_trace(name);
      return std::accumulate(tr.end() - 50, tr.end(), 0.0) / 50.0;
    };
    const double p_gmm = plateau("ra-gmm"), p_agd = plateau("agd");
    o.add("RA-GMM risk plateau r(5) below AGD", p_gmm < p_agd, num(p_gmm) + " vs " + num(p_agd));
  });

  criterion(11, "sub-Gaussian suite", 0, [](Outcome& o) {
    o.add(check_subgaussian_thresholds(100, kSeed + 11));
    o.add(check_subgaussian_coverage(10000, {50, 200, 1000}, kSeed + 11));
  });

  criterion(12, "limit checks", 0, [](Outcome& o) { o.add(check_limits(kSeed + 12)); });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
