#include "riskgmm/smooth_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "riskgmm/parallel.hpp"

namespace riskgmm {

namespace {

constexpr double kMiTol = 1e-9;
constexpr double kTieTol = 1e-12;

// alpha (vartheta + alpha L) = alpha^2 (L + 2 lambda_P).
double noise_gain(const SmoothParams& sp) {
  return sp.base.alpha * (sp.source.vartheta + sp.base.alpha * sp.L);
}

double quad_root(double a, double l) { return 0.5 * a + 0.5 * std::sqrt(a * a + 4.0 * l); }

void check_phi_zeta(double phi, double zeta) {
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0, 1)");
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
}

void check_mu_l(double mu, double L) {
  if (!(mu > 0.0 && mu < L)) throw std::invalid_argument("need 0 < mu < L");
}

}  // namespace

SetMembership classify_theta_psi(const ThetaPsi& tp, double mu, double L) {
  check_mu_l(mu, L);
  const double th = tp.vartheta;
  const double ps = tp.psi;
  const double kappa = L / mu;
  SetMembership m;
  m.in_S0 = th == 1.0 && ps == 1.0;
  m.in_Splus = ps > 1.0 && th > 1.0 && th <= 2.0 - 1.0 / ps;
  if (ps >= 0.0 && ps < 1.0) {
    // With psi = 0 the first entry of the max is read as -inf.
    const double lo_hb = 1.0 / (1.0 + kappa * (1.0 - ps));
    const double lo = ps == 0.0 ? lo_hb : std::max(2.0 - 1.0 / ps, lo_hb);
    m.in_Sminus = th >= lo && th < 1.0;
  }
  if (ps != 1.0 && th > 0.0) {
    const double a = (1.0 - th) * th / (kappa * (1.0 - ps));
    if (a >= 0.0) {
      const double lhs = (1.0 - std::sqrt(a)) *
                         (1.0 - (1.0 - th) * (mu * ps * ps - L * (1.0 - ps) * (1.0 - ps)) /
                                    (L * (1.0 - ps) * th));
      const double r = 1.0 - (1.0 - th) * ps / (kappa * (1.0 - ps));
      m.in_S1 = lhs <= r * r;
    }
  }
  m.in_Sc = (m.in_Splus || m.in_Sminus) && m.in_S1;
  return m;
}

SmoothParams smooth_params(const ThetaPsi& tp, double mu, double L,
                           std::optional<double> alpha_s0) {
  const SetMembership m = classify_theta_psi(tp, mu, L);
  double alpha = 0.0;
  if (m.in_S0) {
    if (!alpha_s0) throw std::invalid_argument("alpha required for vartheta = psi = 1");
    alpha = *alpha_s0;
    if (!(alpha > 0.0 && alpha <= 1.0 / L)) throw std::invalid_argument("alpha must lie in (0, 1/L]");
  } else if (m.in_Sc) {
    alpha = (1.0 - tp.vartheta) / (L * (1.0 - tp.psi));
  } else {
    throw InfeasibleError("(vartheta, psi) lies outside S_0 and S_c");
  }
  SmoothParams sp;
  sp.source = tp;
  sp.mu = mu;
  sp.L = L;
  const double s = std::sqrt(tp.vartheta * alpha * mu);
  const double beta =
      (1.0 - s) / (1.0 - alpha * tp.psi * mu) * (1.0 - std::sqrt(alpha * mu / tp.vartheta));
  sp.base = {alpha, beta, tp.psi * beta};
  sp.rate2 = 1.0 - s;
  sp.lyap_lambda = tp.vartheta / (2.0 * alpha);
  return sp;
}

Eigen::Vector2d lyapunov_vector(const SmoothParams& sp) {
  const double a = std::sqrt(sp.source.vartheta / (2.0 * sp.base.alpha));
  return {a, -a + std::sqrt(sp.mu / 2.0)};
}

Eigen::Matrix2d lyapunov_matrix(const SmoothParams& sp) {
  const Eigen::Vector2d p = lyapunov_vector(sp);
  return p * p.transpose();
}

double lyapunov_value(const SmoothParams& sp, const Objective& obj, const Vec& x_k,
                      const Vec& x_km1) {
  const Eigen::Vector2d p = lyapunov_vector(sp);
  const Vec& xs = obj.xstar();
  const Vec w = p(0) * (x_k - xs) + p(1) * (x_km1 - xs);
  return w.squaredNorm() + obj.subopt(x_k);
}

const char* to_string(NoiseKind n) { return n == NoiseKind::gaussian ? "gaussian" : "subgaussian"; }

double expected_subopt_bound(const SmoothParams& sp, int d, double sigma2, double z0_lyapunov,
                             int k, NoiseKind noise) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  const double a = sp.base.alpha;
  const double decay = std::pow(sp.rate2, k) * z0_lyapunov;
  if (noise == NoiseKind::gaussian) {
    return decay + std::sqrt(a) * (sp.L * a + sp.source.vartheta) /
                       (2.0 * std::sqrt(sp.source.vartheta * sp.mu)) * d * sigma2;
  }
  return decay + 2.0 * sigma2 * a * a * (sp.L / 2.0 + sp.lyap_lambda) / (1.0 - sp.rate2);
}

double risk_v(const SmoothParams& sp) {
  const double a = sp.base.alpha;
  const double g = sp.base.gamma;
  const double delta = sp.base.beta - g;
  const double one_al = 1.0 - a * sp.L;
  return 2.0 * sp.L * sp.L / sp.mu *
             (2.0 * delta * delta + one_al * one_al * (1.0 + 2.0 * g + 2.0 * g * g)) +
         sp.lyap_lambda * sp.rate2;
}

double RiskBoundReport::bias_at_k(int k) const {
  if (!feasible) return kInf;
  return std::pow(rho_bar2, k) * bias0;
}

double EvarBoundReport::finite_k_bound(int k) const {
  return asymptotic_bound + std::pow(rho_barbar, k) * bias0;
}

double rho_bar2_gaussian(const SmoothParams& sp, double theta) {
  const double c1 = noise_gain(sp);
  const double a = sp.base.alpha;
  const double l = 4.0 * theta * a * a * risk_v(sp) / (2.0 - theta * c1);
  return quad_root(sp.rate2 + l, l);
}

RiskBoundReport risk_bound_gaussian(const SmoothParams& sp, int d, double sigma2, double theta,
                                    double z0_lyapunov) {
  const double a = sp.base.alpha;
  const double c1 = noise_gain(sp);
  const double gap = 1.0 - sp.rate2;
  RiskBoundReport r;
  r.noise = NoiseKind::gaussian;
  r.theta = theta;
  r.v = risk_v(sp);
  r.theta_upper = 2.0 * gap / (8.0 * a * a * r.v + gap * c1);
  r.bias0 = 2.0 * z0_lyapunov;
  r.feasible = theta > 0.0 && theta < r.theta_upper;
  if (!r.feasible) return r;
  r.rho_bar2 = rho_bar2_gaussian(sp, theta);
  r.stationary_bound = sigma2 * d * c1 / ((1.0 - r.rho_bar2) * (2.0 - theta * c1));
  return r;
}

EvarBoundReport evar_bound_gaussian(const SmoothParams& sp, int d, double sigma2, double zeta,
                                    double phi, double z0_lyapunov) {
  check_phi_zeta(phi, zeta);
  const double c1 = noise_gain(sp);
  const RiskBoundReport base = risk_bound_gaussian(sp, d, sigma2, 0.0, z0_lyapunov);
  EvarBoundReport e;
  e.noise = NoiseKind::gaussian;
  e.phi = phi;
  e.zeta = zeta;
  e.bias0 = base.bias0;
  e.theta_phi = phi * base.theta_upper;
  e.rho_barbar = rho_bar2_gaussian(sp, e.theta_phi);
  const double lz = std::log(1.0 / zeta);
  const double gap = 1.0 - e.rho_barbar;
  const double denom = 2.0 - e.theta_phi * c1;
  const double ratio = e.theta_phi * c1 / denom;
  e.condition_holds = lz <= d / (2.0 * gap) * ratio * ratio;
  const double root = std::sqrt(d / gap) + std::sqrt(2.0 * lz);
  e.branch1 = sigma2 * c1 / 2.0 * root * root;
  e.branch2 = sigma2 * d * c1 / (gap * denom) + 2.0 * sigma2 * lz / e.theta_phi;
  e.asymptotic_bound = e.condition_holds ? e.branch1 : e.branch2;
  return e;
}

double gaussian_tail_bound(double sigma2, const RiskBoundReport& rep, int k, double t) {
  if (!rep.feasible) return 1.0;
  // exp(theta / (2 sigma^2) * (bound_k - t)); the stationary part already carries d.
  const double expo = rep.theta / (2.0 * sigma2) * (rep.bound_at_k(k) - t);
  return std::min(1.0, std::exp(expo));
}

double rho_hat2_subgaussian(const SmoothParams& sp, double theta) {
  const double a = sp.base.alpha;
  const double q = 32.0 * a * a * risk_v(sp) * theta;
  return quad_root(sp.rate2 + q, q);
}

RiskBoundReport risk_bound_subgaussian(const SmoothParams& sp, double sigma2, double theta,
                                       double z0_lyapunov) {
  const double a = sp.base.alpha;
  const double c1 = noise_gain(sp);
  RiskBoundReport r;
  r.noise = NoiseKind::subgaussian;
  r.theta = theta;
  r.v = risk_v(sp);
  r.theta_upper = std::min((1.0 - sp.rate2) / (64.0 * a * a * r.v), 1.0 / (4.0 * c1));
  r.bias0 = 2.0 * z0_lyapunov;
  r.feasible = theta > 0.0 && theta < r.theta_upper;
  if (!r.feasible) return r;
  r.rho_bar2 = rho_hat2_subgaussian(sp, theta);
  r.stationary_bound = 4.0 * sigma2 * c1 / (1.0 - r.rho_bar2);
  return r;
}

EvarBoundReport evar_bound_subgaussian(const SmoothParams& sp, double sigma2, double zeta,
                                       double phi, double z0_lyapunov) {
  check_phi_zeta(phi, zeta);
  const double a = sp.base.alpha;
  const double c1 = noise_gain(sp);
  const RiskBoundReport base = risk_bound_subgaussian(sp, sigma2, 0.0, z0_lyapunov);
  const double v = base.v;
  EvarBoundReport e;
  e.noise = NoiseKind::subgaussian;
  e.phi = phi;
  e.zeta = zeta;
  e.bias0 = base.bias0;
  e.theta_phi = phi * base.theta_upper;
  const double q = 32.0 * a * a * v * e.theta_phi;
  const double s = sp.rate2 + q;
  const double t_hat = std::sqrt(s * s + 4.0 * q);
  e.rho_barbar = 0.5 * s + 0.5 * t_hat;
  const double lz = std::log(1.0 / zeta);
  const double c_lin = 2.0 - sp.rate2 - t_hat;  // > 0 since theta_phi < theta_u
  const double denom = c_lin - q;               // = 2 (1 - rho_hat_hat)
  const double ratio = e.theta_phi / denom;
  e.condition_holds = lz <= 128.0 * a * a * v * c1 * ratio * ratio;
  const double root = std::sqrt(8.0 * c1) + std::sqrt(64.0 * a * a * v * lz);
  e.branch1 = sigma2 / c_lin * root * root;
  e.branch2 = 8.0 * sigma2 * c1 / denom + 2.0 * sigma2 * lz / e.theta_phi;
  e.asymptotic_bound = e.condition_holds ? e.branch1 : e.branch2;
  return e;
}

double gd_rate(double alpha, double mu, double L) {
  return std::max(std::abs(1.0 - alpha * mu), std::abs(1.0 - alpha * L));
}

namespace {

void check_gd_alpha(double alpha, double mu, double L) {
  check_mu_l(mu, L);
  if (!(alpha > 0.0 && alpha <= 2.0 / (mu + L)))
    throw std::invalid_argument("GD stepsize must lie in (0, 2/(mu+L)]");
}

}  // namespace

RiskBoundReport gd_risk_bound(double alpha, double mu, double L, int d, double sigma2,
                              double theta, double x0_dist) {
  check_gd_alpha(alpha, mu, L);
  const double rho = gd_rate(alpha, mu, L);
  const double rho2 = rho * rho;
  const double a2l = alpha * alpha * L;
  RiskBoundReport r;
  r.noise = NoiseKind::gaussian;
  r.theta = theta;
  r.theta_upper = 2.0 * (1.0 - rho2) / a2l;
  r.bias0 = L * x0_dist * x0_dist / 2.0;
  r.feasible = theta > 0.0 && theta < r.theta_upper;
  if (!r.feasible) return r;
  r.rho_bar2 = rho2 / (1.0 - theta * a2l / 2.0);
  r.stationary_bound = sigma2 * d * a2l / (2.0 * (1.0 - rho2) - theta * a2l);
  return r;
}

EvarBoundReport gd_evar_bound(double alpha, double mu, double L, int d, double sigma2,
                              double zeta, double x0_dist) {
  check_gd_alpha(alpha, mu, L);
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  const double rho = gd_rate(alpha, mu, L);
  const double rho2 = rho * rho;
  const double s = std::sqrt(2.0 * std::log(1.0 / zeta));
  EvarBoundReport e;
  e.zeta = zeta;
  e.phi = s / (s + std::sqrt(static_cast<double>(d)));
  e.theta_phi = e.phi * 2.0 * (1.0 - rho2) / (alpha * alpha * L);
  e.rho_barbar = rho2 / (1.0 - e.phi * (1.0 - rho2));
  e.condition_holds = true;
  const double root = s + std::sqrt(static_cast<double>(d));
  e.branch1 = sigma2 * alpha * alpha * L / (2.0 * (1.0 - rho2)) * root * root;
  e.asymptotic_bound = e.branch1;
  e.bias0 = L * x0_dist * x0_dist / 2.0;
  return e;
}

MiCertificate mi_certify(const GmmParams& p, double rho2, const Eigen::Matrix2d& p_tilde,
                         double mu, double L) {
  check_mu_l(mu, L);
  if (!(rho2 > 0.0 && rho2 < 1.0)) throw std::invalid_argument("rho2 must lie in (0, 1)");
  if ((p_tilde - p_tilde.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("P must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> pes(p_tilde, Eigen::EigenvaluesOnly);
  if (pes.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, p_tilde.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("P must be positive semidefinite");

  const double a = p.alpha;
  const double b = p.beta;
  const double g = p.gamma;
  const double dl = b - g;
  const double oal = 1.0 - a * L;

  Eigen::Matrix2d A;
  A << 1.0 + b, -b, 1.0, 0.0;
  const Eigen::Vector2d B(-a, 0.0);

  Eigen::Matrix3d X1;
  X1 << -L * dl * dl, L * dl * dl, -oal * dl,
        L * dl * dl, -L * dl * dl, oal * dl,
        -oal * dl, oal * dl, a * (2.0 - a * L);
  Eigen::Matrix3d X2;
  X2 << g * g * mu, -g * g * mu, -g,
        -g * g * mu, g * g * mu, g,
        -g, g, 0.0;
  Eigen::Matrix3d X3;
  X3 << (1.0 + g) * (1.0 + g) * mu, -g * (1.0 + g) * mu, -(1.0 + g),
        -g * (1.0 + g) * mu, g * g * mu, g,
        -(1.0 + g), g, 0.0;
  const Eigen::Matrix3d X = 0.5 * (X1 + rho2 * X2 + (1.0 - rho2) * X3);

  Eigen::Matrix3d M;
  M.topLeftCorner<2, 2>() = A.transpose() * p_tilde * A - rho2 * p_tilde;
  M.topRightCorner<2, 1>() = A.transpose() * p_tilde * B;
  M.bottomLeftCorner<1, 2>() = B.transpose() * p_tilde * A;
  M(2, 2) = B.dot(p_tilde * B);
  M -= X;
  M = 0.5 * (M + M.transpose()).eval();

  MiCertificate c;
  c.params = p;
  c.rho2 = rho2;
  c.p_tilde = p_tilde;
  c.lhs = M;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M, Eigen::EigenvaluesOnly);
  c.max_eig_lhs = es.eigenvalues().maxCoeff();
  c.certified = c.max_eig_lhs <= kMiTol;
  return c;
}

std::vector<double> SmoothGrid::alphas_s0(double L) const {
  std::vector<double> out(static_cast<size_t>(n_alpha_s0));
  const double hi = 1.0 / L;
  const double lo = alpha_s0_min_ratio * hi;
  for (int i = 0; i < n_alpha_s0; ++i) {
    out[static_cast<size_t>(i)] =
        n_alpha_s0 == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (n_alpha_s0 - 1));
  }
  if (!out.empty()) out.back() = hi;
  return out;
}

nlohmann::json SmoothGrid::to_json() const {
  return {{"n_vartheta", n_vartheta},   {"n_psi", n_psi},
          {"vartheta_max", vartheta_max}, {"psi_max", psi_max},
          {"n_alpha_s0", n_alpha_s0},   {"alpha_s0_min_ratio", alpha_s0_min_ratio}};
}

void SmoothDesignSpec::validate() const {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  check_phi_zeta(phi, zeta);
  if (grid.n_alpha_s0 < 1) throw std::invalid_argument("S_0 alpha grid must be nonempty");
  if (!agd_only && (grid.n_vartheta < 1 || grid.n_psi < 1))
    throw std::invalid_argument("(vartheta, psi) grid must be nonempty");
  if (!(grid.alpha_s0_min_ratio > 0.0 && grid.alpha_s0_min_ratio <= 1.0))
    throw std::invalid_argument("alpha_s0_min_ratio must lie in (0, 1]");
}

namespace {

SmoothCandidate make_candidate(const SmoothParams& sp, const SmoothDesignSpec& spec) {
  SmoothCandidate c{sp, 0.0, 0.0, {}};
  c.rate_benchmark = spec.global_benchmark ? 1.0 - std::sqrt(sp.mu / sp.L)
                                           : 1.0 - std::sqrt(sp.base.alpha * sp.mu);
  c.rate_rel = sp.rate2 / c.rate_benchmark;
  c.evar = evar_bound_gaussian(sp, spec.d, spec.sigma2, spec.zeta, spec.phi, 0.0);
  return c;
}

std::vector<double> lattice(double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = n == 1 ? 0.0 : hi * i / (n - 1);
  return v;
}

}  // namespace

std::vector<SmoothCandidate> smooth_sweep(double mu, double L, const SmoothDesignSpec& spec) {
  spec.validate();
  check_mu_l(mu, L);
  std::vector<SmoothCandidate> out;
  for (double a : spec.grid.alphas_s0(L)) {
    out.push_back(make_candidate(smooth_params({1.0, 1.0}, mu, L, a), spec));
  }
  if (spec.agd_only) return out;

  const std::vector<double> ths = lattice(spec.grid.vartheta_max, spec.grid.n_vartheta);
  const std::vector<double> pss = lattice(spec.grid.psi_max, spec.grid.n_psi);
  std::vector<std::vector<SmoothCandidate>> rows(ths.size());
  parallel_for(ths.size(), [&](std::size_t i) {
    for (double ps : pss) {
      const ThetaPsi tp{ths[i], ps};
      const SetMembership m = classify_theta_psi(tp, mu, L);
      if (!m.in_Sc) continue;
      rows[i].push_back(make_candidate(smooth_params(tp, mu, L), spec));
    }
  });
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

SmoothDesignResult design_ra_gmm_smooth(double mu, double L, const SmoothDesignSpec& spec) {
  const std::vector<SmoothCandidate> all = smooth_sweep(mu, L, spec);
  SmoothDesignResult res;
  res.candidates = static_cast<long>(all.size());
  const SmoothCandidate* best = nullptr;
  auto key = [](const SmoothCandidate& c) {
    return std::make_tuple(c.params.rate2, c.params.base.alpha, c.params.base.beta,
                           c.params.base.gamma);
  };
  double best_val = kInf;
  for (const auto& c : all) {
    if (c.rate_rel > 1.0 + spec.epsilon || !std::isfinite(c.evar.asymptotic_bound)) continue;
    ++res.feasible;
    best_val = std::min(best_val, c.evar.asymptotic_bound);
  }
  if (res.feasible == 0) throw InfeasibleError("no (vartheta, psi) candidate satisfies the rate constraint");
  for (const auto& c : all) {
    if (c.rate_rel > 1.0 + spec.epsilon || !(c.evar.asymptotic_bound <= best_val + kTieTol))
      continue;
    if (!best || key(c) < key(*best)) best = &c;
  }
  res.best = *best;
  return res;
}

nlohmann::json to_json(const SmoothParams& sp) {
  return {{"alpha", sp.base.alpha},          {"beta", sp.base.beta},
          {"gamma", sp.base.gamma},          {"vartheta", sp.source.vartheta},
          {"psi", sp.source.psi},            {"rate2", sp.rate2},
          {"lyap_lambda", sp.lyap_lambda},   {"mu", sp.mu},
          {"L", sp.L}};
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RiskBoundReport& r) {
  return {{"noise", to_string(r.noise)},
          {"theta", r.theta},
          {"theta_upper", r.theta_upper},
          {"v", r.v},
          {"rho_bar2", finite_or_null(r.rho_bar2)},
          {"stationary_bound", finite_or_null(r.stationary_bound)},
          {"bias0", r.bias0},
          {"feasible", r.feasible}};
}

nlohmann::json to_json(const EvarBoundReport& r) {
  return {{"noise", to_string(r.noise)},
          {"phi", r.phi},
          {"zeta", r.zeta},
          {"theta_phi", r.theta_phi},
          {"rho_barbar", r.rho_barbar},
          {"condition_holds", r.condition_holds},
          {"branch1", finite_or_null(r.branch1)},
          {"branch2", finite_or_null(r.branch2)},
          {"asymptotic_bound", finite_or_null(r.asymptotic_bound)},
          {"bias0", r.bias0}};
}

nlohmann::json to_json(const MiCertificate& c) {
  return {{"params", to_json(c.params)},
          {"rho2", c.rho2},
          {"p_tilde", {{c.p_tilde(0, 0), c.p_tilde(0, 1)}, {c.p_tilde(1, 0), c.p_tilde(1, 1)}}},
          {"max_eig_lhs", c.max_eig_lhs},
          {"certified", c.certified}};
}

}  // namespace riskgmm
