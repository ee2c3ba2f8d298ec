#include "riskgmm/quad_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <tuple>

#include "riskgmm/parallel.hpp"

namespace riskgmm {

namespace {

constexpr double kSetMargin = 1e-12;
constexpr double kLogGuard = 1e-14;
constexpr double kTieTol = 1e-12;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

// Golden-section search for the minimum of a unimodal f on [a, b].
template <class F>
double golden_section(F&& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

void GmmParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
}

GmmParams GmmParams::agd_standard(double mu, double L) {
  const double b = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));
  return {1.0 / L, b, b};
}

ModeAnalysis mode_analysis(const GmmParams& p, double lambda) {
  ModeAnalysis m{};
  m.lambda = lambda;
  m.c = (1.0 + p.beta) - p.alpha * (1.0 + p.gamma) * lambda;
  m.d = -(p.beta - p.alpha * p.gamma * lambda);
  const double disc = m.c * m.c + 4.0 * m.d;
  m.rho = disc >= 0.0 ? 0.5 * std::abs(m.c) + 0.5 * std::sqrt(disc) : std::sqrt(std::abs(m.d));
  const double one_minus_d = 1.0 - m.d;
  m.u = one_minus_d == 0.0
            ? -kInf
            : (1.0 + m.d) * (one_minus_d * one_minus_d - m.c * m.c) /
                  (lambda * one_minus_d * p.alpha * p.alpha);
  return m;
}

std::vector<ModeAnalysis> mode_table(const GmmParams& p, const QuadraticObjective& obj) {
  std::vector<ModeAnalysis> modes;
  modes.reserve(static_cast<size_t>(obj.dim()));
  for (Eigen::Index i = 0; i < obj.eigenvalues().size(); ++i)
    modes.push_back(mode_analysis(p, obj.eigenvalues()(i)));
  return modes;
}

double spectral_radius(const GmmParams& p, const QuadraticObjective& obj) {
  double r = 0.0;
  for (const auto& m : mode_table(p, obj)) r = std::max(r, m.rho);
  return r;
}

double mean_distance_bound(const GmmParams& p, const QuadraticObjective& obj, int k) {
  if (k < 1) throw std::invalid_argument("mean_distance_bound needs k >= 1");
  double ck = 0.0;
  double rho = 0.0;
  for (const auto& m : mode_table(p, obj)) {
    rho = std::max(rho, m.rho);
    const double disc = m.c * m.c + 4.0 * m.d;
    double ci;
    if (disc != 0.0) {
      ci = std::abs(m.c * m.c + 2.0 * m.d + 2.0) * m.rho / std::sqrt(std::abs(disc));
    } else {
      if (m.rho == 0.0) return kInf;
      ci = (m.c * m.c / 4.0 + 2.0) * std::sqrt(2.0 * m.rho * m.rho + double(k) * k);
    }
    ck = std::max(ck, ci);
  }
  return ck * std::pow(rho, k - 1);
}

SetStatus stable_set_status(const GmmParams& p, const QuadraticObjective& obj) {
  SetStatus status = SetStatus::inside;
  for (const auto& m : mode_table(p, obj)) {
    const double gap = std::abs(1.0 - m.d) - std::abs(m.c);
    if (std::isnan(m.u) || gap < -kSetMargin || m.u < -kSetMargin) return SetStatus::outside;
    if (gap <= kSetMargin || m.u <= kSetMargin) status = SetStatus::boundary;
  }
  return status;
}

bool in_stable_set(const GmmParams& p, const QuadraticObjective& obj) {
  return stable_set_status(p, obj) == SetStatus::inside;
}

bool in_feasible_set(const GmmParams& p, const QuadraticObjective& obj, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!in_stable_set(p, obj)) return false;
  for (const auto& m : mode_table(p, obj))
    if (!(theta < 2.0 * m.u)) return false;
  return true;
}

double QuadRiskReport::mean() const {
  double s = 0.0;
  for (double v : per_mode_variance) s += v;
  return s;
}

QuadRiskReport entropic_risk_exact(const GmmParams& p, const QuadraticObjective& obj,
                                   double sigma2, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  QuadRiskReport rep;
  rep.theta = theta;
  const auto modes = mode_table(p, obj);
  const bool stable = in_stable_set(p, obj);
  for (const auto& m : modes) rep.per_mode_variance.push_back(stable ? sigma2 / (2.0 * m.u) : kInf);
  if (!stable) return rep;

  double s = 0.0;
  for (const auto& m : modes) {
    const double x = theta / (2.0 * m.u);
    if (!(x <= 1.0 - kLogGuard)) return rep;
    s += std::log1p(-x);
  }
  rep.feasible = true;
  rep.entropic_risk = -(sigma2 / theta) * s;
  return rep;
}

EvarResult evar_exact(const GmmParams& p, const QuadraticObjective& obj, double sigma2,
                      double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (!in_stable_set(p, obj)) throw InfeasibleError("unstable parameters");
  std::vector<double> us;
  double umin = kInf;
  for (const auto& m : mode_table(p, obj)) {
    us.push_back(m.u);
    umin = std::min(umin, m.u);
  }
  const double top = 2.0 * umin;
  const double lz = std::log(1.0 / zeta);
  // Same expression as entropic_risk_exact, without re-deriving the modes.
  auto h = [&](double th) {
    double s = 0.0;
    for (double u : us) {
      const double x = th / (2.0 * u);
      if (!(x <= 1.0 - kLogGuard)) return kInf;
      s += std::log1p(-x);
    }
    return -(sigma2 / th) * s + 2.0 * sigma2 * lz / th;
  };

  const double tol = 1e-10 * top;
  double th = golden_section(h, 0.0, top, tol);
  double best = h(th);

  // Bracket check against a coarse scan; refine around the scan minimum if
  // the golden-section result was beaten.
  constexpr int kScan = 64;
  double scan_best = kInf;
  int scan_arg = 0;
  for (int j = 1; j <= kScan; ++j) {
    const double v = h(top * j / (kScan + 1));
    if (v < scan_best) {
      scan_best = v;
      scan_arg = j;
    }
  }
  if (scan_best < best) {
    const double lo = top * (scan_arg - 1) / (kScan + 1);
    const double hi = top * (scan_arg + 1) / (kScan + 1);
    th = golden_section(h, lo, hi, tol);
    best = h(th);
  }
  return {best, th, EvarKind::exact, zeta};
}

double evar_theta0(double zeta, int d) {
  const double lz = std::log(1.0 / zeta);
  return (lz / d) * (std::sqrt(1.0 + 2.0 * d / lz) - 1.0);
}

EvarResult evar_bound(const GmmParams& p, const QuadraticObjective& obj, double sigma2,
                      double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (!in_stable_set(p, obj)) throw InfeasibleError("unstable parameters");
  const int d = obj.dim();
  double umin = kInf;
  for (const auto& m : mode_table(p, obj)) umin = std::min(umin, m.u);
  const double lz = std::log(1.0 / zeta);
  const double t0 = evar_theta0(zeta, d);
  const double value = sigma2 / (2.0 * t0 * umin) * (-d * std::log1p(-t0) + 2.0 * lz);
  return {value, t0 * 2.0 * umin, EvarKind::bound, zeta};
}

std::vector<double> QuadGrid::alphas(double L) const {
  const double hi = alpha_max_factor * 2.0 / L;
  const double lo = alpha_min_ratio * hi;
  std::vector<double> v(static_cast<size_t>(n_alpha));
  for (int i = 0; i < n_alpha; ++i)
    v[static_cast<size_t>(i)] =
        n_alpha == 1 ? hi : lo * std::pow(hi / lo, double(i) / (n_alpha - 1));
  return v;
}

std::vector<double> QuadGrid::betas() const { return linspace(0.0, beta_max, n_beta); }
std::vector<double> QuadGrid::gammas() const { return linspace(0.0, gamma_max, n_gamma); }

nlohmann::json QuadGrid::to_json() const {
  return {{"n_alpha", n_alpha},
          {"n_beta", n_beta},
          {"n_gamma", n_gamma},
          {"alpha_spacing", "log"},
          {"alpha_max", "alpha_max_factor * 2 / L"},
          {"alpha_max_factor", alpha_max_factor},
          {"alpha_min_ratio", alpha_min_ratio},
          {"beta_range", {0.0, beta_max}},
          {"gamma_range", {0.0, gamma_max}}};
}

void QuadDesignSpec::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  if (grid.n_alpha < 1 || grid.n_beta < 1 || (!agd_constraint && grid.n_gamma < 1))
    throw std::invalid_argument("design grid is empty");
}

double quad_rate_benchmark(double kappa) {
  const double r = 1.0 - 2.0 / std::sqrt(3.0 * kappa + 1.0);
  return r * r;
}

namespace {

struct Candidate {
  GmmParams p;
  double value;
  double rho2;
};

}  // namespace

QuadDesignResult design_ra_gmm_quad(const QuadraticObjective& obj, const QuadDesignSpec& spec) {
  spec.validate();
  QuadDesignResult res;
  res.rate_benchmark = quad_rate_benchmark(obj.kappa());
  const auto alphas = spec.grid.alphas(obj.lsmooth());
  const auto betas = spec.grid.betas();
  const auto gammas = spec.grid.gammas();

  struct Slot {
    std::vector<Candidate> cands;
    long points = 0, stable = 0;
  };
  std::vector<Slot> slots(alphas.size());
  parallel_for(alphas.size(), [&](size_t ia) {
    Slot& s = slots[ia];
    for (double b : betas) {
      const size_t ng = spec.agd_constraint ? 1 : gammas.size();
      for (size_t ig = 0; ig < ng; ++ig) {
        const GmmParams p{alphas[ia], b, spec.agd_constraint ? b : gammas[ig]};
        ++s.points;
        if (!in_stable_set(p, obj)) continue;
        ++s.stable;
        const double rho = spectral_radius(p, obj);
        if (rho * rho / res.rate_benchmark > 1.0 + spec.epsilon) continue;
        s.cands.push_back({p, evar_bound(p, obj, spec.sigma2, spec.zeta).value, rho * rho});
      }
    }
  });

  std::vector<Candidate> all;
  for (const auto& s : slots) {
    res.grid_points += s.points;
    res.stable_points += s.stable;
    all.insert(all.end(), s.cands.begin(), s.cands.end());
  }
  res.feasible_points = static_cast<long>(all.size());
  if (all.empty())
    throw InfeasibleError("no parameters satisfy rate constraint at this grid resolution");

  double best = kInf;
  for (const auto& c : all) best = std::min(best, c.value);
  const Candidate* pick = nullptr;
  auto key = [](const Candidate& c) {
    return std::make_tuple(c.rho2, c.p.alpha, c.p.beta, c.p.gamma);
  };
  for (const auto& c : all) {
    if (c.value > best + kTieTol) continue;
    if (!pick || key(c) < key(*pick)) pick = &c;
  }
  res.params = pick->p;
  res.rate = std::sqrt(pick->rho2);
  res.bound = evar_bound(pick->p, obj, spec.sigma2, spec.zeta);
  res.exact = evar_exact(pick->p, obj, spec.sigma2, spec.zeta);
  return res;
}

std::vector<QuadSweepRow> quad_sweep(const QuadraticObjective& obj, const QuadDesignSpec& spec,
                                     const std::vector<double>& thetas) {
  spec.validate();
  const auto alphas = spec.grid.alphas(obj.lsmooth());
  const auto betas = spec.grid.betas();
  const auto gammas = spec.grid.gammas();
  std::vector<std::vector<QuadSweepRow>> slots(alphas.size());
  parallel_for(alphas.size(), [&](size_t ia) {
    for (double b : betas) {
      const size_t ng = spec.agd_constraint ? 1 : gammas.size();
      for (size_t ig = 0; ig < ng; ++ig) {
        QuadSweepRow row;
        row.params = {alphas[ia], b, spec.agd_constraint ? b : gammas[ig]};
        row.rho = spectral_radius(row.params, obj);
        row.stable = in_stable_set(row.params, obj);
        for (double th : thetas)
          row.risk.push_back(entropic_risk_exact(row.params, obj, spec.sigma2, th).entropic_risk);
        row.evar_exact = row.stable ? evar_exact(row.params, obj, spec.sigma2, spec.zeta).value : kInf;
        row.evar_bound = row.stable ? evar_bound(row.params, obj, spec.sigma2, spec.zeta).value : kInf;
        slots[ia].push_back(std::move(row));
      }
    }
  });
  std::vector<QuadSweepRow> rows;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(rows));
  return rows;
}

nlohmann::json to_json(const GmmParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}};
}

nlohmann::json to_json(const EvarResult& e) {
  return {{"value", e.value},
          {"theta_star", e.theta_star},
          {"kind", e.kind == EvarKind::exact ? "exact" : "bound"},
          {"zeta", e.zeta}};
}

}  // namespace riskgmm
