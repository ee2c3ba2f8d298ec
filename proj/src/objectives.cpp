#include "riskgmm/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "riskgmm/rng.hpp"

namespace riskgmm {

namespace {

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + exp(-t)).
double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------- quadratic

QuadraticObjective::QuadraticObjective(Vec eigenvalues, Vec linear_term, double constant,
                                       std::optional<Mat> rotation, std::string name)
    : p_(std::move(linear_term)), r_(constant), name_(std::move(name)) {
  const auto n = eigenvalues.size();
  if (n == 0) throw std::invalid_argument("quadratic objective needs at least one eigenvalue");
  if (p_.size() != n) throw std::invalid_argument("linear term length does not match spectrum");
  if ((eigenvalues.array() <= 0.0).any())
    throw std::invalid_argument("quadratic objective eigenvalues must be positive");

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return eigenvalues(a) < eigenvalues(b); });
  lambda_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda_(i) = eigenvalues(order[static_cast<size_t>(i)]);

  if (rotation) {
    if (rotation->rows() != n || rotation->cols() != n)
      throw std::invalid_argument("rotation must be d x d");
    const double orth = ((*rotation).transpose() * (*rotation) - Mat::Identity(n, n)).norm();
    if (orth > 1e-10) throw std::invalid_argument("rotation is not orthogonal");
    Mat R(n, n);
    for (Eigen::Index i = 0; i < n; ++i) R.col(i) = rotation->col(order[static_cast<size_t>(i)]);
    rotation_ = std::move(R);
  } else if (!std::is_sorted(eigenvalues.data(), eigenvalues.data() + n)) {
    // Diagonal Q given in unsorted order: keep it as a permutation rotation.
    Mat R = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) R(order[static_cast<size_t>(i)], i) = 1.0;
    rotation_ = std::move(R);
  }
  if (lambda_(0) == lambda_(n - 1) && n > 1)
    throw std::invalid_argument("quadratic objective requires mu != L");

  // x* = -Q^{-1} p, f* = r - 1/2 p^T Q^{-1} p, computed in the eigenbasis.
  const Vec pt = rotation_ ? Vec(rotation_->transpose() * p_) : p_;
  const Vec zt = -(pt.array() / lambda_.array()).matrix();
  xstar_ = rotation_ ? Vec(*rotation_ * zt) : zt;
  fstar_ = r_ + 0.5 * pt.dot(zt);
}

double QuadraticObjective::eval(const Vec& x) const {
  const Vec xt = rotation_ ? Vec(rotation_->transpose() * x) : x;
  return 0.5 * (lambda_.array() * xt.array().square()).sum() + p_.dot(x) + r_;
}

void QuadraticObjective::grad(const Vec& x, Vec& out) const {
  if (rotation_) {
    out.noalias() = rotation_->transpose() * x;
    out.array() *= lambda_.array();
    out = *rotation_ * out + p_;
  } else {
    out.array() = lambda_.array() * x.array() + p_.array();
  }
}

double QuadraticObjective::subopt(const Vec& x) const {
  const Vec e = x - xstar_;
  const Vec et = rotation_ ? Vec(rotation_->transpose() * e) : e;
  return 0.5 * (lambda_.array() * et.array().square()).sum();
}

Mat QuadraticObjective::rotation() const {
  return rotation_ ? *rotation_ : Mat::Identity(dim(), dim());
}

Mat QuadraticObjective::hessian() const {
  const Mat R = rotation();
  return R * lambda_.asDiagonal() * R.transpose();
}

nlohmann::json QuadraticObjective::descriptor() const {
  nlohmann::json j{{"kind", "quadratic"},
                   {"name", name_},
                   {"dimension", dim()},
                   {"eigenvalues", to_std(lambda_)},
                   {"linear_term", to_std(p_)},
                   {"constant", r_},
                   {"mu", mu()},
                   {"L", lsmooth()}};
  if (rotation_) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < rotation_->rows(); ++i) rows.push_back(to_std(rotation_->row(i)));
    j["rotation"] = rows;
  }
  return j;
}

QuadraticObjective make_paper_quadratic() {
  constexpr int d = 10;
  constexpr double reg = 5.0;
  Vec lam(d);
  for (int i = 0; i < d; ++i) lam(i) = double((i + 1) * (i + 1)) + reg;
  const Vec b = Vec::Ones(d) / std::sqrt(double(d));
  return QuadraticObjective(lam, b, 0.0, std::nullopt, "paper");
}

QuadraticObjective make_figure1_quadratic() {
  Vec lam(2);
  lam << 0.2, 2.0;
  return QuadraticObjective(lam, Vec::Zero(2), 0.0, std::nullopt, "figure1");
}

// ----------------------------------------------------------------- logistic

LogisticObjective::LogisticObjective(Mat features, Vec labels, double reg,
                                     nlohmann::json provenance)
    : X_(std::move(features)), y_(std::move(labels)), reg_(reg),
      provenance_(std::move(provenance)) {
  if (X_.rows() < 1 || X_.cols() < 1) throw std::invalid_argument("empty feature matrix");
  if (y_.size() != X_.rows()) throw std::invalid_argument("label count does not match rows");
  if (!(reg_ > 0.0)) throw std::invalid_argument("regularization must be positive");
  if ((y_.array().abs() != 1.0).any()) throw std::invalid_argument("labels must be +-1");

  const double n = double(X_.rows());
  const Mat gram = X_.transpose() * X_ / (4.0 * n);
  const double top = power_iteration([&](const Vec& v, Vec& w) { w.noalias() = gram * v; },
                                     dim(), 1e-10);
  lsmooth_ = reg_ + top;
  fstar_ = run_gd(1000000, 1e-10, xstar_);
}

double LogisticObjective::eval(const Vec& x) const {
  const Vec m = y_.cwiseProduct(X_ * x);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += softplus(-m(i));
  return s / double(X_.rows()) + 0.5 * reg_ * x.squaredNorm();
}

void LogisticObjective::grad(const Vec& x, Vec& out) const {
  Vec m = X_ * x;
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = -y_(i) * sigmoid(-y_(i) * m(i));
  out.noalias() = X_.transpose() * m;
  out /= double(X_.rows());
  out.noalias() += reg_ * x;
}

double LogisticObjective::hessian_norm(const Vec& x, double rtol) const {
  Vec w = X_ * x;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double s = sigmoid(w(i));
    w(i) = s * (1.0 - s) / double(X_.rows());
  }
  return power_iteration(
      [&](const Vec& v, Vec& out) {
        out.noalias() = X_.transpose() * (w.asDiagonal() * (X_ * v));
        out.noalias() += reg_ * v;
      },
      dim(), rtol);
}

FstarEstimate LogisticObjective::estimate_fstar(long max_iterations, double tol) const {
  Vec x;
  return run_gd(max_iterations, tol, x);
}

FstarEstimate LogisticObjective::run_gd(long max_iterations, double tol, Vec& x) const {
  FstarEstimate est;
  est.tolerance = tol;
  est.max_iterations = max_iterations;
  const double step = 1.0 / lsmooth_;
  x = Vec::Zero(dim());
  Vec g(dim());
  grad(x, g);
  long it = 0;
  while (it < max_iterations && g.norm() > tol) {
    x.noalias() -= step * g;
    grad(x, g);
    ++it;
  }
  est.fstar = eval(x);
  est.grad_norm = g.norm();
  est.iterations = it;
  return est;
}

nlohmann::json LogisticObjective::descriptor() const {
  nlohmann::json j = provenance_.is_object() ? provenance_ : nlohmann::json::object();
  j["kind"] = "logistic";
  j["dimension"] = dim();
  j["samples"] = X_.rows();
  j["reg"] = reg_;
  j["mu"] = mu();
  j["L"] = lsmooth_;
  j["fstar_estimate"] = fstar_.fstar;
  j["fstar_grad_norm"] = fstar_.grad_norm;
  j["fstar_iterations"] = fstar_.iterations;
  j["fstar_tolerance"] = fstar_.tolerance;
  return j;
}

LogisticObjective make_synthetic_logreg(int d, int n, double reg, double feature_std,
                                        std::uint64_t seed) {
  if (d < 1 || n < 1) throw std::invalid_argument("logistic data needs d >= 1 and n >= 1");
  if (!(reg > 0.0)) throw std::invalid_argument("regularization must be positive");
  if (!(feature_std > 0.0)) throw std::invalid_argument("feature_std must be positive");

  boost::random::normal_distribution<double> normal(0.0, feature_std);
  Philox4x32 gen(seed, kDataStreamBase + 0);
  Mat X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = normal(gen);
  gen.reset(kDataStreamBase + 1, 0);
  Vec w(d);
  for (int j = 0; j < d; ++j) w(j) = normal(gen);
  const Vec score = X * w;
  Vec y(n);
  for (int i = 0; i < n; ++i) y(i) = score(i) >= 0.0 ? 1.0 : -1.0;

  nlohmann::json prov{{"generator", "synthetic"},
                      {"feature_std", feature_std},
                      {"seed", seed},
                      {"rng", "philox4x32-10"}};
  return LogisticObjective(std::move(X), std::move(y), reg, std::move(prov));
}

std::unique_ptr<Objective> objective_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") {
    const std::string name = j.value("name", "custom");
    if (name == "paper") return std::make_unique<QuadraticObjective>(make_paper_quadratic());
    if (name == "figure1") return std::make_unique<QuadraticObjective>(make_figure1_quadratic());
    const Vec lam = from_std(j.at("eigenvalues").get<std::vector<double>>());
    const Vec p = j.contains("linear_term")
                      ? from_std(j.at("linear_term").get<std::vector<double>>())
                      : Vec(Vec::Zero(lam.size()));
    std::optional<Mat> rot;
    if (j.contains("rotation")) {
      const auto rows = j.at("rotation").get<std::vector<std::vector<double>>>();
      Mat R(lam.size(), lam.size());
      for (Eigen::Index i = 0; i < R.rows(); ++i)
        for (Eigen::Index k = 0; k < R.cols(); ++k)
          R(i, k) = rows.at(static_cast<size_t>(i)).at(static_cast<size_t>(k));
      rot = std::move(R);
    }
    return std::make_unique<QuadraticObjective>(lam, p, j.value("constant", 0.0), rot, name);
  }
  if (kind == "logistic") {
    if (j.value("generator", std::string("synthetic")) != "synthetic")
      throw std::invalid_argument("only synthetic logistic descriptors are supported");
    return std::make_unique<LogisticObjective>(make_synthetic_logreg(
        j.at("dimension").get<int>(), j.at("samples").get<int>(), j.at("reg").get<double>(),
        j.at("feature_std").get<double>(), j.at("seed").get<std::uint64_t>()));
  }
  throw std::invalid_argument("unknown objective kind: " + kind);
}

}  // namespace riskgmm
