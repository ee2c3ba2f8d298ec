#include "riskgmm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/random/uniform_real_distribution.hpp>

#include "riskgmm/rng.hpp"

namespace riskgmm {

namespace {

// Streams reserved for verification draws, disjoint from simulation paths.
constexpr std::uint64_t kVerifyStream = (std::uint64_t{1} << 62);

class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : eng_(seed, kVerifyStream) {}
  double uniform(double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

private:
  Philox4x32 eng_;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult make(std::string name, bool passed, double metric, double tol, std::string detail) {
  return {std::move(name), passed, metric, tol, std::move(detail)};
}

double tail_fraction(const std::vector<double>& s, double t) {
  const auto c = std::count_if(s.begin(), s.end(), [t](double v) { return v >= t; });
  return static_cast<double>(c) / static_cast<double>(s.size());
}

// A certified smooth parameter set drawn uniformly from S_c (or S_0 with probability 1/10).
SmoothParams sample_certified(Sampler& rng, double mu, double L, bool allow_s0 = true) {
  if (allow_s0 && rng.uniform(0.0, 1.0) < 0.1) {
    return smooth_params({1.0, 1.0}, mu, L, rng.uniform(1e-3, 1.0) / L);
  }
  for (;;) {
    const ThetaPsi tp{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.5)};
    if (classify_theta_psi(tp, mu, L).in_Sc) return smooth_params(tp, mu, L);
  }
}

SmoothParams agd_certified(double mu, double L) { return smooth_params({1.0, 1.0}, mu, L, 1.0 / L); }

SmoothParams hb_certified(double mu, double L) {
  const double kappa = L / mu;
  return smooth_params({kappa / (1.0 + kappa), 0.0}, mu, L);
}

Ensemble simulate(const Objective& obj, const GmmParams& p, int n_paths,
                  const std::vector<int>& ks, std::uint64_t seed, const NoiseModel& noise) {
  RunConfig rc;
  rc.params = p;
  rc.k_max = *std::max_element(ks.begin(), ks.end());
  rc.n_paths = n_paths;
  rc.x0 = Vec::Ones(obj.dim());
  rc.seed = seed;
  rc.record_steps = ks;
  return run_gmm(obj, rc, noise);
}

}  // namespace

nlohmann::json CheckResult::to_json() const {
  return {{"name", name}, {"passed", passed}, {"metric", metric},
          {"tolerance", tolerance}, {"detail", detail}};
}

double mean_standard_error(const std::vector<double>& s) {
  if (s.size() < 2) return 0.0;
  const double n = static_cast<double>(s.size());
  const double m = std::accumulate(s.begin(), s.end(), 0.0) / n;
  double acc = 0.0;
  for (double v : s) acc += (v - m) * (v - m);
  return std::sqrt(acc / (n - 1.0) / n);
}

double empirical_risk_standard_error(const Ensemble& ens, double sigma2, double theta, int k) {
  const auto s = ens.samples(k);
  if (s.size() < 2) return kInf;
  const double scale = theta / (2.0 * sigma2);
  const double top = scale * *std::max_element(s.begin(), s.end());
  std::vector<double> e(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) e[i] = std::exp(scale * s[i] - top);
  const double m = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
  // r = log(m) / scale, so se(r) = se(m) / (scale m).
  return mean_standard_error(e) / (scale * m);
}

CheckResult check_companion_radius(int n, std::uint64_t seed) {
  Sampler rng(seed);
  double worst = 0.0;
  int stable = 0;
  for (int i = 0; i < n; ++i) {
    const GmmParams p{rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
    const ModeAnalysis m = mode_analysis(p, rng.uniform(0.05, 10.0));
    worst = std::max(worst, std::abs(m.rho - companion_radius_numeric(m.c, m.d)));
    stable += m.rho < 1.0 ? 1 : 0;
  }
  return make("companion-block spectral radius", worst <= 1e-10, worst, 1e-10,
              std::to_string(n) + " triples, " + std::to_string(stable) + " with rho < 1");
}

CheckResult check_aq_radius(int n, std::uint64_t seed) {
  Sampler rng(seed);
  double worst = 0.0;
  int stable = 0;
  for (const QuadraticObjective& obj : {make_figure1_quadratic(), make_paper_quadratic()}) {
    const double L = obj.lsmooth();
    for (int i = 0; i < n; ++i) {
      const GmmParams p{rng.uniform(0.0, 2.4 / L), rng.uniform(0.0, 1.2), rng.uniform(0.0, 1.2)};
      const double r = spectral_radius(p, obj);
      worst = std::max(worst, std::abs(r - spectral_radius_numeric(p, obj)));
      stable += r < 1.0 ? 1 : 0;
    }
  }
  return make("full A_Q spectral radius", worst <= 1e-10, worst, 1e-10,
              std::to_string(2 * n) + " parameter sets, " + std::to_string(stable) + " stable");
}

CheckResult check_stationary_variance(int n, std::uint64_t seed) {
  Sampler rng(seed);
  const QuadraticObjective obj = make_paper_quadratic();
  const double L = obj.lsmooth();
  double worst = 0.0;
  int drawn = 0;
  for (int got = 0; got < n;) {
    ++drawn;
    const GmmParams p{rng.uniform(0.0, 2.4 / L), rng.uniform(0.0, 1.2), rng.uniform(0.0, 1.2)};
    // rho is capped so the plain fixpoint iteration stays within its budget.
    if (stable_set_status(p, obj) != SetStatus::inside || spectral_radius(p, obj) > 0.999) continue;
    ++got;
    const auto fix = lyapunov_fixpoint_oracle(p, obj, 1.0);
    const auto modes = mode_table(p, obj);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double closed = 1.0 / (2.0 * modes[i].u);
      worst = std::max(worst, std::abs(fix[i] - closed) / closed);
    }
  }
  return make("stationary variance vs Lyapunov fixpoint", worst <= 1e-8, worst, 1e-8,
              std::to_string(n) + " params in S_q with rho <= 0.999 (" + std::to_string(drawn) +
                  " drawn); relative error");
}

std::vector<CheckResult> check_set_identities(int n, std::uint64_t seed) {
  Sampler rng(seed);
  int subset_viol = 0, mono_viol = 0, equiv_viol = 0, feasible = 0, compared = 0;
  for (const QuadraticObjective& obj : {make_figure1_quadratic(), make_paper_quadratic()}) {
    const double L = obj.lsmooth();
    for (int i = 0; i < n; ++i) {
      const GmmParams p{rng.uniform(0.0, 2.4 / L), rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
      const double th = rng.log_uniform(1e-3, 1e3);
      const bool f1 = in_feasible_set(p, obj, th);
      const bool stable = in_stable_set(p, obj);
      feasible += f1 ? 1 : 0;
      if (f1 && !stable) ++subset_viol;
      const double th2 = th * rng.uniform(0.0, 1.0);
      if (f1 && !in_feasible_set(p, obj, th2)) ++mono_viol;
      const double rho = spectral_radius(p, obj);
      if (std::abs(rho - 1.0) >= 1e-9) {
        ++compared;
        if (stable != (rho < 1.0)) ++equiv_viol;
      }
    }
  }
  const std::string tot = std::to_string(2 * n) + " samples";
  return {make("F_theta subset of S_q", subset_viol == 0, subset_viol, 0,
               tot + ", " + std::to_string(feasible) + " feasible"),
          make("F_theta monotone in theta", mono_viol == 0, mono_viol, 0, tot),
          make("S_q equals rho < 1", equiv_viol == 0, equiv_viol, 0,
               std::to_string(compared) + " off-boundary samples")};
}

CheckResult check_risk_vs_mc(const Ensemble& ens, const GmmParams& p, double sigma2,
                             double theta, int k, double rel_tol) {
  const QuadraticObjective obj = make_paper_quadratic();
  const QuadRiskReport exact = entropic_risk_exact(p, obj, sigma2, theta);
  const double emp = empirical_entropic_risk(ens, sigma2, theta, k);
  const double rel = exact.feasible ? std::abs(emp - exact.entropic_risk) / exact.entropic_risk : kInf;
  return make("entropic risk vs Monte Carlo (theta=" + fmt_double(theta) + ")", rel <= rel_tol,
              rel, rel_tol,
              "exact " + fmt_double(exact.entropic_risk) + ", empirical " + fmt_double(emp) +
                  " at k=" + std::to_string(k) + " over " + std::to_string(ens.n_alive()) +
                  " paths");
}

CheckResult check_evar_dominance(int n, std::uint64_t seed) {
  Sampler rng(seed);
  double worst = -kInf;
  int viol = 0;
  for (const QuadraticObjective& obj : {make_figure1_quadratic(), make_paper_quadratic()}) {
    const double L = obj.lsmooth();
    for (int got = 0; got < n;) {
      const GmmParams p{rng.uniform(0.0, 2.4 / L), rng.uniform(0.0, 1.2), rng.uniform(0.0, 1.2)};
      if (stable_set_status(p, obj) != SetStatus::inside) continue;
      ++got;
      const double zeta = rng.uniform(0.01, 0.99);
      const double diff = evar_exact(p, obj, 1.0, zeta).value - evar_bound(p, obj, 1.0, zeta).value;
      worst = std::max(worst, diff);
      viol += diff > 1e-9 ? 1 : 0;
    }
  }
  return make("evar_exact <= evar_bound", viol == 0, viol, 0,
              std::to_string(2 * n) + " stable (params, zeta); max(exact - bound) = " +
                  fmt_double(worst));
}

CheckResult check_mc_evar_vs_bound(const Ensemble& ens, const GmmParams& p, double sigma2,
                                   double zeta, int k) {
  const QuadraticObjective obj = make_paper_quadratic();
  double umin = kInf;
  for (const auto& m : mode_table(p, obj)) umin = std::min(umin, m.u);
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(1e-2 * std::pow(0.95 * 2.0 * umin / 1e-2, i / 199.0));
  const McEvar mc = mc_evar_oracle(ens, sigma2, zeta, grid, k);
  const double se = empirical_risk_standard_error(ens, sigma2, mc.theta, k);
  const double bound = evar_bound(p, obj, sigma2, zeta).value;
  const double excess = mc.value - bound - 3.0 * se;
  return make("Monte Carlo EV@R <= bound", excess <= 0.0, excess, 0.0,
              "mc " + fmt_double(mc.value) + " (theta " + fmt_double(mc.theta) + ", se " +
                  fmt_double(se) + "), bound " + fmt_double(bound));
}

CheckResult check_mi_certification(int n, std::uint64_t seed, double mu, double L) {
  Sampler rng(seed);
  std::vector<SmoothParams> cases = {agd_certified(mu, L), hb_certified(mu, L)};
  for (int i = 0; i < n; ++i) cases.push_back(sample_certified(rng, mu, L));
  double worst = -kInf;
  int fails = 0;
  for (const auto& sp : cases) {
    const MiCertificate c = mi_certify(sp.base, sp.rate2, lyapunov_matrix(sp), mu, L);
    worst = std::max(worst, c.max_eig_lhs);
    fails += c.certified ? 0 : 1;
  }
  return make("matrix inequality certification", fails == 0, worst, 1e-9,
              std::to_string(cases.size()) + " parameter sets (AGD, HB, " + std::to_string(n) +
                  " sampled), " + std::to_string(fails) + " uncertified");
}

CheckResult check_lyapunov_contraction(const Objective& obj, int steps, std::uint64_t seed) {
  Sampler rng(seed);
  const double mu = obj.mu();
  const double L = obj.lsmooth();
  std::vector<SmoothParams> cases = {agd_certified(mu, L), hb_certified(mu, L),
                                     smooth_params({1.0, 1.0}, mu, L, 0.5 / L)};
  for (int i = 0; i < 5; ++i) cases.push_back(sample_certified(rng, mu, L, false));
  double worst = -kInf;
  const int d = obj.dim();
  for (const auto& sp : cases) {
    const auto& p = sp.base;
    Vec x = Vec::Ones(d), x_prev = x, y(d), g(d);
    double v = lyapunov_value(sp, obj, x, x_prev);
    for (int k = 0; k < steps; ++k) {
      y = (1.0 + p.gamma) * x - p.gamma * x_prev;
      obj.grad(y, g);
      Vec next = (1.0 + p.beta) * x - p.beta * x_prev - p.alpha * g;
      x_prev = x;
      x = next;
      const double v_next = lyapunov_value(sp, obj, x, x_prev);
      worst = std::max(worst, v_next - sp.rate2 * v);
      v = v_next;
    }
  }
  return make("Lyapunov contraction", worst <= 1e-9, worst, 1e-9,
              std::to_string(cases.size()) + " certified parameter sets x " +
                  std::to_string(steps) + " steps; max V_{k+1} - rho^2 V_k");
}

std::vector<CheckResult> check_bound_coverage(int n_paths, const std::vector<int>& ks,
                                              std::uint64_t seed) {
  const QuadraticObjective obj = make_paper_quadratic();
  const double mu = obj.mu(), L = obj.lsmooth(), sigma2 = 1.0, zeta = 0.95, phi = 0.99;
  const int d = obj.dim();
  const Vec x0 = Vec::Ones(d);
  const double z = 3.0 * std::sqrt(zeta * (1.0 - zeta) / n_paths);
  double mean_ex = -kInf, risk_ex = -kInf, tail_ex = -kInf;
  for (const SmoothParams& sp : {agd_certified(mu, L), hb_certified(mu, L)}) {
    const Ensemble ens = simulate(obj, sp.base, n_paths, ks, seed, NoiseModel::gaussian(sigma2));
    const double v0 = lyapunov_value(sp, obj, x0, x0);
    const RiskBoundReport rb0 = risk_bound_gaussian(sp, d, sigma2, 0.0, v0);
    const double theta = 0.5 * rb0.theta_upper;
    const RiskBoundReport rb = risk_bound_gaussian(sp, d, sigma2, theta, v0);
    const EvarBoundReport eb = evar_bound_gaussian(sp, d, sigma2, zeta, phi, v0);
    for (int k : ks) {
      const auto s = ens.samples(k);
      const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
      mean_ex = std::max(mean_ex, mean - expected_subopt_bound(sp, d, sigma2, v0, k, NoiseKind::gaussian) -
                                      3.0 * mean_standard_error(s));
      risk_ex = std::max(risk_ex, empirical_entropic_risk(ens, sigma2, theta, k) - rb.bound_at_k(k) -
                                      3.0 * empirical_risk_standard_error(ens, sigma2, theta, k));
      tail_ex = std::max(tail_ex, tail_fraction(s, eb.finite_k_bound(k)) - (1.0 - zeta) - z);
    }
  }
  const double alpha = 1.0 / L, theta_gd = 5.0;
  const Ensemble gd = simulate(obj, GmmParams::gd(alpha), n_paths, ks, seed + 1,
                               NoiseModel::gaussian(sigma2));
  const RiskBoundReport gb = gd_risk_bound(alpha, mu, L, d, sigma2, theta_gd, (x0 - obj.xstar()).norm());
  double gd_ex = -kInf;
  for (int k : ks) {
    gd_ex = std::max(gd_ex, empirical_entropic_risk(gd, sigma2, theta_gd, k) - gb.bound_at_k(k) -
                                3.0 * empirical_risk_standard_error(gd, sigma2, theta_gd, k));
  }
  const std::string where = std::to_string(n_paths) + " paths; certified AGD and HB parameters";
  return {make("expected-suboptimality bound coverage", mean_ex <= 0.0, mean_ex, 0.0,
               where + "; max(mean - bound - 3se)"),
          make("finite-horizon risk bound coverage", risk_ex <= 0.0, risk_ex, 0.0,
               where + ", theta = theta_u/2; max(risk - bound - 3se)"),
          make("GD risk bound coverage", gd_ex <= 0.0, gd_ex, 0.0,
               std::to_string(n_paths) + " paths, alpha = 1/L, theta = 5"),
          make("Gaussian tail bound coverage", tail_ex <= 0.0, tail_ex, 0.0,
               where + "; max(P(f - f* >= bound) - (1 - zeta) - 3se)")};
}

CheckResult check_subgaussian_thresholds(int n, std::uint64_t seed) {
  Sampler rng(seed);
  int viol = 0;
  double worst = -kInf;
  for (int i = 0; i < n; ++i) {
    const bool wide = i % 2 == 0;
    const double mu = wide ? 6.0 : 1.0, L = wide ? 105.0 : 12.0;
    const SmoothParams sp = sample_certified(rng, mu, L);
    const double tu_g = risk_bound_gaussian(sp, 1, 1.0, 0.0, 0.0).theta_upper;
    const double tu_sg = risk_bound_subgaussian(sp, 1.0, 0.0, 0.0).theta_upper;
    const double th = rng.uniform(0.0, 1.0) * tu_sg;
    const double gap = rho_bar2_gaussian(sp, th) - rho_hat2_subgaussian(sp, th);
    worst = std::max({worst, tu_sg - tu_g, gap});
    viol += (tu_sg > tu_g || gap > 0.0) ? 1 : 0;
  }
  return make("sub-Gaussian thresholds and rates", viol == 0, viol, 0,
              std::to_string(n) + " admissible samples; max of (theta_sg - theta_g, rho_bar2 - rho_hat2) = " +
                  fmt_double(worst));
}

std::vector<CheckResult> check_subgaussian_coverage(int n_paths, const std::vector<int>& ks,
                                                    std::uint64_t seed) {
  const QuadraticObjective obj = make_paper_quadratic();
  const double mu = obj.mu(), L = obj.lsmooth(), zeta = 0.95, phi = 0.99;
  const NoiseModel noise = NoiseModel::uniform_ball(1.0);
  const double s2 = noise.variance_proxy();
  const Vec x0 = Vec::Ones(obj.dim());
  const double z = 3.0 * std::sqrt(zeta * (1.0 - zeta) / n_paths);
  double mean_ex = -kInf, tail_ex = -kInf;
  for (const SmoothParams& sp : {agd_certified(mu, L), hb_certified(mu, L)}) {
    const Ensemble ens = simulate(obj, sp.base, n_paths, ks, seed, noise);
    const double v0 = lyapunov_value(sp, obj, x0, x0);
    const EvarBoundReport eb = evar_bound_subgaussian(sp, s2, zeta, phi, v0);
    for (int k : ks) {
      const auto s = ens.samples(k);
      const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
      mean_ex = std::max(mean_ex, mean - expected_subopt_bound(sp, obj.dim(), s2, v0, k, NoiseKind::subgaussian) -
                                      3.0 * mean_standard_error(s));
      tail_ex = std::max(tail_ex, tail_fraction(s, eb.finite_k_bound(k)) - (1.0 - zeta) - z);
    }
  }
  const std::string where = std::to_string(n_paths) + " paths, uniform ball radius 1";
  return {make("sub-Gaussian expected-suboptimality coverage", mean_ex <= 0.0, mean_ex, 0.0, where),
          make("sub-Gaussian tail bound coverage", tail_ex <= 0.0, tail_ex, 0.0, where)};
}

std::vector<CheckResult> check_limits(std::uint64_t seed) {
  const QuadraticObjective obj = make_paper_quadratic();
  const double mu = obj.mu(), L = obj.lsmooth();
  const GmmParams agd = GmmParams::agd_standard(mu, L);
  double umin = kInf;
  for (const auto& m : mode_table(agd, obj)) umin = std::min(umin, m.u);
  const QuadRiskReport r = entropic_risk_exact(agd, obj, 1.0, 1e-8 * umin);
  const double exact_rel = std::abs(r.entropic_risk - r.mean()) / r.mean();

  const Ensemble ens = simulate(obj, agd, 1000, {200}, seed, NoiseModel::gaussian(1.0));
  const double emp = empirical_entropic_risk(ens, 1.0, 1e-8, 200);
  const double emp_rel = std::abs(emp - ens.mean(200)) / ens.mean(200);

  Sampler rng(seed);
  double rho_gap = 0.0;
  for (int i = 0; i < 50; ++i) {
    const SmoothParams sp = sample_certified(rng, mu, L);
    const double tg = 1e-10 * risk_bound_gaussian(sp, 1, 1.0, 0.0, 0.0).theta_upper;
    const double ts = 1e-10 * risk_bound_subgaussian(sp, 1.0, 0.0, 0.0).theta_upper;
    rho_gap = std::max({rho_gap, (rho_bar2_gaussian(sp, tg) - sp.rate2) / sp.rate2,
                        (rho_hat2_subgaussian(sp, ts) - sp.rate2) / sp.rate2});
  }
  return {make("exact risk theta -> 0", exact_rel <= 1e-6, exact_rel, 1e-6,
               "AGD on the 10-d quadratic, theta = 1e-8 min u"),
          make("empirical risk theta -> 0", emp_rel <= 1e-6, emp_rel, 1e-6,
               "1000 paths, k = 200, theta = 1e-8"),
          make("rho_bar2, rho_hat2 -> rho2", rho_gap <= 1e-6, rho_gap, 1e-6,
               "50 certified samples, theta = 1e-10 theta_u")};
}

}  // namespace riskgmm
