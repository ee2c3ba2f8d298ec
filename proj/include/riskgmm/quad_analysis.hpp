#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskgmm/objectives.hpp"

namespace riskgmm {

/// Raised when inputs are well-formed but outside the region where a result
/// exists (unstable parameters, empty design grid). The CLI maps it to exit 2.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Stepsize alpha, momentum beta and gradient extrapolation gamma.
struct GmmParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Throws std::invalid_argument unless alpha > 0, beta >= 0, gamma >= 0.
  void validate() const;

  static GmmParams gd(double alpha) { return {alpha, 0.0, 0.0}; }
  /// alpha = 1/L, beta = gamma = (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)).
  static GmmParams agd_standard(double mu, double L);
};

/// Per-eigenvalue quantities of the 2x2 block [[c, d], [1, 0]].
struct ModeAnalysis {
  double lambda;
  double c;
  double d;
  double rho;
  double u;  // -inf when d == 1
};

ModeAnalysis mode_analysis(const GmmParams& p, double lambda);
std::vector<ModeAnalysis> mode_table(const GmmParams& p, const QuadraticObjective& obj);

/// max_i rho_i.
double spectral_radius(const GmmParams& p, const QuadraticObjective& obj);

/// C_k rho(A_Q)^{k-1}; multiplied by ||z_0 - z_*|| it bounds ||E z_k - z_*||.
/// +inf when some mode has c^2 + 4d = 0 and rho_i = 0.
double mean_distance_bound(const GmmParams& p, const QuadraticObjective& obj, int k);

enum class SetStatus { inside, boundary, outside };

/// |c_i| < |1 - d_i| and u_i > 0 for all modes, with a 1e-12 margin.
SetStatus stable_set_status(const GmmParams& p, const QuadraticObjective& obj);
bool in_stable_set(const GmmParams& p, const QuadraticObjective& obj);

/// |c_i| < |1 - d_i| and theta < 2 u_i for all modes.
bool in_feasible_set(const GmmParams& p, const QuadraticObjective& obj, double theta);

struct QuadRiskReport {
  double entropic_risk = kInf;
  double theta = 0.0;
  bool feasible = false;
  std::vector<double> per_mode_variance;  // sigma^2 / (2 u_i)

  /// Stationary mean suboptimality, the theta -> 0 limit of the risk.
  double mean() const;
};

/// Exact infinite-horizon entropic risk under isotropic Gaussian noise.
QuadRiskReport entropic_risk_exact(const GmmParams& p, const QuadraticObjective& obj,
                                   double sigma2, double theta);

enum class EvarKind { exact, bound };

struct EvarResult {
  double value = kInf;
  double theta_star = 0.0;
  EvarKind kind = EvarKind::exact;
  double zeta = 0.0;
};

/// Minimizes risk(theta) + (2 sigma^2 / theta) log(1/zeta) over (0, 2 min u).
EvarResult evar_exact(const GmmParams& p, const QuadraticObjective& obj, double sigma2,
                      double zeta);

/// theta_0 = (log(1/zeta)/d) [sqrt(1 + 2d/log(1/zeta)) - 1].
double evar_theta0(double zeta, int d);

/// Closed-form upper bound on the stationary EV@R.
EvarResult evar_bound(const GmmParams& p, const QuadraticObjective& obj, double sigma2,
                      double zeta);

struct QuadGrid {
  int n_alpha = 60;
  int n_beta = 60;
  int n_gamma = 60;
  double alpha_max_factor = 1.2;  // alpha_max = factor * 2 / L
  double alpha_min_ratio = 1e-3;  // alpha_min = ratio * alpha_max
  double beta_max = 1.2;
  double gamma_max = 1.2;

  std::vector<double> alphas(double L) const;
  std::vector<double> betas() const;
  std::vector<double> gammas() const;
  nlohmann::json to_json() const;
};

struct QuadDesignSpec {
  double zeta = 0.95;
  double epsilon = 0.25;
  double sigma2 = 1.0;
  QuadGrid grid;
  bool agd_constraint = false;

  void validate() const;
};

struct QuadDesignResult {
  GmmParams params;
  EvarResult bound;
  EvarResult exact;
  double rate = 0.0;            // rho(A_Q)
  double rate_benchmark = 0.0;  // rho_{q,*}^2 = (1 - 2/sqrt(3 kappa + 1))^2
  long grid_points = 0;
  long stable_points = 0;
  long feasible_points = 0;
};

/// (1 - 2 / sqrt(3 kappa + 1))^2.
double quad_rate_benchmark(double kappa);

/// Grid search for the RA-GMM (or RA-AGD with agd_constraint) parameters.
QuadDesignResult design_ra_gmm_quad(const QuadraticObjective& obj, const QuadDesignSpec& spec);

struct QuadSweepRow {
  GmmParams params;
  double rho;
  bool stable;
  std::vector<double> risk;  // one entry per requested theta
  double evar_exact;
  double evar_bound;
};

/// Every grid point (stable or not) with rate, risk at each theta and EV@R.
std::vector<QuadSweepRow> quad_sweep(const QuadraticObjective& obj, const QuadDesignSpec& spec,
                                     const std::vector<double>& thetas);

nlohmann::json to_json(const GmmParams& p);
nlohmann::json to_json(const EvarResult& e);

}  // namespace riskgmm
