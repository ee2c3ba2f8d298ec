#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace riskgmm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A mu-strongly convex, L-smooth objective with a known (or estimated)
/// minimizer. Evaluations are const and thread-safe.
class Objective {
public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual double eval(const Vec& x) const = 0;
  virtual void grad(const Vec& x, Vec& out) const = 0;
  Vec grad(const Vec& x) const {
    Vec g(dim());
    grad(x, g);
    return g;
  }

  virtual double mu() const = 0;
  virtual double lsmooth() const = 0;
  virtual double fstar() const = 0;
  virtual const Vec& xstar() const = 0;

  /// f(x) - f*. Subclasses may override with a cancellation-free form.
  virtual double subopt(const Vec& x) const { return eval(x) - fstar(); }

  /// Reproducible descriptor; objective_from_json rebuilds an equal object.
  virtual nlohmann::json descriptor() const = 0;

  double kappa() const { return lsmooth() / mu(); }
};

/// f(x) = 1/2 x^T Q x + p^T x + r with Q = R diag(lambda) R^T.
/// The spectrum is kept explicitly; the rotation is only used when evaluating.
class QuadraticObjective final : public Objective {
public:
  QuadraticObjective(Vec eigenvalues, Vec linear_term, double constant = 0.0,
                     std::optional<Mat> rotation = std::nullopt,
                     std::string name = "custom");

  int dim() const override { return static_cast<int>(lambda_.size()); }
  double eval(const Vec& x) const override;
  void grad(const Vec& x, Vec& out) const override;
  using Objective::grad;
  double mu() const override { return lambda_(0); }
  double lsmooth() const override { return lambda_(lambda_.size() - 1); }
  double fstar() const override { return fstar_; }
  const Vec& xstar() const override { return xstar_; }
  double subopt(const Vec& x) const override;
  nlohmann::json descriptor() const override;

  /// Ascending Hessian spectrum.
  const Vec& eigenvalues() const { return lambda_; }
  const Vec& linear_term() const { return p_; }
  double constant() const { return r_; }
  bool is_diagonal() const { return !rotation_.has_value(); }
  Mat rotation() const;
  Mat hessian() const;

private:
  Vec lambda_;
  Vec p_;
  double r_;
  std::optional<Mat> rotation_;
  std::string name_;
  Vec xstar_;
  double fstar_;
};

/// Diagnostics of the deterministic gradient-descent run that estimates f*.
struct FstarEstimate {
  double fstar = 0.0;
  double grad_norm = 0.0;
  long iterations = 0;
  double tolerance = 1e-10;
  long max_iterations = 1000000;
};

/// f(x) = (1/N) sum log(1 + exp(-y_i X_i^T x)) + (reg/2) ||x||^2.
class LogisticObjective final : public Objective {
public:
  LogisticObjective(Mat features, Vec labels, double reg,
                    nlohmann::json provenance = nullptr);

  int dim() const override { return static_cast<int>(X_.cols()); }
  double eval(const Vec& x) const override;
  void grad(const Vec& x, Vec& out) const override;
  using Objective::grad;
  double mu() const override { return reg_; }
  double lsmooth() const override { return lsmooth_; }
  double fstar() const override { return fstar_.fstar; }
  const Vec& xstar() const override { return xstar_; }
  nlohmann::json descriptor() const override;

  const Mat& features() const { return X_; }
  const Vec& labels() const { return y_; }
  double reg() const { return reg_; }
  const FstarEstimate& fstar_info() const { return fstar_; }

  /// Largest Hessian eigenvalue at x, by power iteration.
  double hessian_norm(const Vec& x, double rtol = 1e-10) const;

  /// Rerun the f* estimate with a different iteration budget.
  FstarEstimate estimate_fstar(long max_iterations, double tol) const;

private:
  FstarEstimate run_gd(long max_iterations, double tol, Vec& x) const;

  Mat X_;
  Vec y_;
  double reg_;
  double lsmooth_;
  Vec xstar_;
  FstarEstimate fstar_;
  nlohmann::json provenance_;
};

/// d = 10, spectrum {i^2 + 5}, linear term ones/sqrt(10).
QuadraticObjective make_paper_quadratic();

/// x1^2 + 0.1 x2^2: spectrum {0.2, 2}, minimizer at the origin.
QuadraticObjective make_figure1_quadratic();

/// Synthetic regularized logistic regression with Gaussian features and
/// labels from a hidden Gaussian weight vector.
LogisticObjective make_synthetic_logreg(int d, int n, double reg,
                                        double feature_std, std::uint64_t seed);

/// Rebuild an objective from its descriptor.
std::unique_ptr<Objective> objective_from_json(const nlohmann::json& j);

/// Largest eigenvalue of a symmetric PSD operator given as a matvec.
template <class MatVec>
double power_iteration(MatVec&& apply, int n, double rtol, int max_iter = 100000);

}  // namespace riskgmm

#include "riskgmm/detail/power_iteration.ipp"
