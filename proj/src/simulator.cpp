#include "riskgmm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_on_sphere.hpp>

#include "riskgmm/parallel.hpp"
#include "riskgmm/rng.hpp"

namespace riskgmm {

namespace {

constexpr double kDivergenceNorm = 1e100;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kind_name(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::gaussian_isotropic: return "gaussian_isotropic";
    case NoiseModel::Kind::uniform_ball: return "uniform_ball";
    case NoiseModel::Kind::none: break;
  }
  return "none";
}

void draw_noise(const NoiseModel& noise, Philox4x32& eng, Vec& w) {
  const auto d = w.size();
  switch (noise.kind) {
    case NoiseModel::Kind::none:
      w.setZero();
      return;
    case NoiseModel::Kind::gaussian_isotropic: {
      boost::random::normal_distribution<double> n(0.0, std::sqrt(noise.sigma2));
      for (Eigen::Index i = 0; i < d; ++i) w(i) = n(eng);
      return;
    }
    case NoiseModel::Kind::uniform_ball: {
      boost::random::uniform_on_sphere<double> sphere(static_cast<int>(d));
      const std::vector<double> dir = sphere(eng);
      boost::random::uniform_01<double> u;
      const double r = noise.radius * std::pow(u(eng), 1.0 / static_cast<double>(d));
      for (Eigen::Index i = 0; i < d; ++i) w(i) = r * dir[static_cast<size_t>(i)];
      return;
    }
  }
}

}  // namespace

NoiseModel NoiseModel::gaussian(double sigma2) {
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be nonnegative");
  return {Kind::gaussian_isotropic, sigma2, 0.0};
}

NoiseModel NoiseModel::uniform_ball(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  return {Kind::uniform_ball, 0.0, radius};
}

double NoiseModel::variance_proxy() const {
  switch (kind) {
    case Kind::gaussian_isotropic: return sigma2;
    // ||w|| <= R gives P(||w|| >= t) <= 2 exp(-t^2 / (2 s)) for s = R^2 / (2 ln 2).
    case Kind::uniform_ball: return radius * radius / (2.0 * std::log(2.0));
    case Kind::none: break;
  }
  return 0.0;
}

nlohmann::json NoiseModel::to_json() const {
  nlohmann::json j{{"kind", kind_name(kind)}};
  if (kind == Kind::gaussian_isotropic) j["sigma2"] = sigma2;
  if (kind == Kind::uniform_ball) {
    j["radius"] = radius;
    j["variance_proxy"] = variance_proxy();
  }
  return j;
}

void RunConfig::validate(int dim) const {
  params.validate();
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
  if (x0.size() != dim) throw std::invalid_argument("x0 dimension does not match objective");
  for (int k : record_steps)
    if (k < 0 || k > k_max) throw std::invalid_argument("record step outside [0, k_max]");
}

std::vector<int> RunConfig::steps() const {
  std::vector<int> s;
  if (record_steps.empty()) {
    for (int k = 0; k <= k_max; k += record_every) s.push_back(k);
  } else {
    s = record_steps;
  }
  s.push_back(0);
  s.push_back(k_max);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

nlohmann::json RunConfig::to_json() const {
  return {{"params", riskgmm::to_json(params)},
          {"k_max", k_max},
          {"n_paths", n_paths},
          {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
          {"seed", seed},
          {"record_every", record_every},
          {"record_steps", record_steps},
          {"rng", "philox4x32-10(key=seed, counter=(block, step, path))"}};
}

int Ensemble::index_of(int k) const {
  const auto it = std::lower_bound(steps.begin(), steps.end(), k);
  if (it == steps.end() || *it != k) throw std::invalid_argument("step was not recorded");
  return static_cast<int>(it - steps.begin());
}

std::vector<double> Ensemble::samples(int k) const {
  const int j = index_of(k);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_alive()));
  for (Eigen::Index i = 0; i < subopt.rows(); ++i)
    if (!diverged[static_cast<size_t>(i)]) out.push_back(subopt(i, j));
  return out;
}

double Ensemble::mean(int k) const {
  const auto s = samples(k);
  if (s.empty()) return kNaN;
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double Ensemble::stddev(int k) const {
  const auto s = samples(k);
  if (s.size() < 2) return 0.0;
  const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  double acc = 0.0;
  for (double v : s) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(s.size() - 1));
}

double Ensemble::rms(int k) const {
  const auto s = samples(k);
  if (s.empty()) return kNaN;
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc / static_cast<double>(s.size()));
}

Ensemble run_gmm(const Objective& obj, const RunConfig& cfg, const NoiseModel& noise) {
  const int d = obj.dim();
  cfg.validate(d);
  Ensemble ens;
  ens.steps = cfg.steps();
  const auto n = static_cast<Eigen::Index>(cfg.n_paths);
  const auto m = static_cast<Eigen::Index>(ens.steps.size());
  ens.subopt = Mat::Constant(n, m, kNaN);
  ens.final_x = Mat::Constant(n, d, kNaN);
  ens.final_x_prev = Mat::Constant(n, d, kNaN);
  ens.diverged.assign(static_cast<size_t>(n), 0);

  const double a = cfg.params.alpha;
  const double b = cfg.params.beta;
  const double g = cfg.params.gamma;

  parallel_for(static_cast<size_t>(n), [&](size_t path) {
    const auto row = static_cast<Eigen::Index>(path);
    Philox4x32 eng(cfg.seed, path, 0);
    Vec x = cfg.x0;
    Vec x_prev = cfg.x0;
    Vec y(d), grad(d), w(d), x_next(d);
    size_t next = 0;
    for (int k = 0;; ++k) {
      if (next < ens.steps.size() && ens.steps[next] == k) {
        ens.subopt(row, static_cast<Eigen::Index>(next)) = obj.subopt(x);
        ++next;
      }
      if (k == cfg.k_max) break;
      y = (1.0 + g) * x - g * x_prev;
      obj.grad(y, grad);
      eng.reset(path, static_cast<std::uint32_t>(k));
      draw_noise(noise, eng, w);
      x_next = (1.0 + b) * x - b * x_prev - a * (grad + w);
      x_prev.swap(x);
      x.swap(x_next);
      const double nrm = x.norm();
      if (!std::isfinite(nrm) || nrm > kDivergenceNorm) {
        ens.diverged[path] = 1;
        return;
      }
    }
    ens.final_x.row(row) = x.transpose();
    ens.final_x_prev.row(row) = x_prev.transpose();
  });

  ens.n_diverged = static_cast<int>(std::count(ens.diverged.begin(), ens.diverged.end(), 1));
  ens.meta = {{"config", cfg.to_json()},
              {"noise", noise.to_json()},
              {"objective", obj.descriptor()},
              {"n_diverged", ens.n_diverged}};
  return ens;
}

double empirical_entropic_risk(const Ensemble& ens, double sigma2, double theta, int k) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  const auto s = ens.samples(k);
  if (s.empty()) return kInf;
  const double scale = theta / (2.0 * sigma2);
  const double n = static_cast<double>(s.size());
  // Centre at the sample mean so that small theta does not cancel in log(1 + tiny).
  const double m = std::accumulate(s.begin(), s.end(), 0.0) / n;
  double top = -kInf;
  for (double v : s) top = std::max(top, scale * (v - m));
  if (!std::isfinite(top)) return kInf;
  if (top < 700.0) {
    double acc = 0.0;
    for (double v : s) acc += std::expm1(scale * (v - m));
    return m + std::log1p(acc / n) / scale;
  }
  double acc = 0.0;
  for (double v : s) acc += std::exp(scale * (v - m) - top);
  return m + (top + std::log(acc / n)) / scale;
}

double Ecdf::operator()(double t) const {
  const auto it = std::upper_bound(values.begin(), values.end(), t);
  const auto i = it - values.begin();
  return i == 0 ? 0.0 : fractions[static_cast<size_t>(i - 1)];
}

Ecdf ecdf(std::vector<double> samples) {
  Ecdf e;
  std::sort(samples.begin(), samples.end());
  e.values = std::move(samples);
  const auto n = static_cast<double>(e.values.size());
  e.fractions.resize(e.values.size());
  for (size_t i = 0; i < e.values.size(); ++i) e.fractions[i] = static_cast<double>(i + 1) / n;
  return e;
}

Ecdf ecdf_final(const Ensemble& ens) { return ecdf(ens.final_samples()); }

double ks_distance(const Ecdf& a, const Ecdf& b) {
  double best = 0.0;
  for (const auto* e : {&a, &b})
    for (double t : e->values) best = std::max(best, std::abs(a(t) - b(t)));
  return best;
}

double dominance_report(const Ensemble& a, const Ensemble& b,
                        const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw std::invalid_argument("thresholds must be nonempty");
  const auto sa = a.final_samples();
  const auto sb = b.final_samples();
  auto tail = [](const std::vector<double>& s, double t) {
    const auto c = std::count_if(s.begin(), s.end(), [t](double v) { return v >= t; });
    return static_cast<double>(c) / static_cast<double>(s.size());
  };
  int ok = 0;
  for (double t : thresholds) ok += tail(sa, t) <= tail(sb, t) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(thresholds.size());
}

std::vector<double> lyapunov_fixpoint_oracle(const GmmParams& p, const QuadraticObjective& obj,
                                             double sigma2, double tol) {
  std::vector<double> out;
  for (const auto& m : mode_table(p, obj)) {
    Eigen::Matrix2d M;
    M << m.c, m.d, 1.0, 0.0;
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
    Q(0, 0) = sigma2 * p.alpha * p.alpha;
    Eigen::Matrix2d X = Eigen::Matrix2d::Zero();
    bool done = false;
    for (long it = 0; it < 1000000; ++it) {
      const Eigen::Matrix2d next = M * X * M.transpose() + Q;
      const double delta = (next - X).cwiseAbs().maxCoeff();
      X = next;
      // Relative stop: Xi scales with alpha^2, so an absolute floor would stop far too early.
      if (delta <= tol * X.cwiseAbs().maxCoeff()) {
        done = true;
        break;
      }
    }
    if (!done) throw std::runtime_error("Lyapunov fixpoint iteration did not converge");
    out.push_back(0.5 * m.lambda * X(0, 0));
  }
  return out;
}

double companion_radius_numeric(double c, double d) {
  Eigen::Matrix2d M;
  M << c, d, 1.0, 0.0;
  return Eigen::EigenSolver<Eigen::Matrix2d>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

Mat aq_matrix(const GmmParams& p, const QuadraticObjective& obj) {
  const int d = obj.dim();
  const Mat Q = obj.hessian();
  const Mat I = Mat::Identity(d, d);
  Mat A = Mat::Zero(2 * d, 2 * d);
  A.topLeftCorner(d, d) = (1.0 + p.beta) * I - p.alpha * (1.0 + p.gamma) * Q;
  A.topRightCorner(d, d) = -(p.beta * I - p.alpha * p.gamma * Q);
  A.bottomLeftCorner(d, d) = I;
  return A;
}

double spectral_radius_numeric(const GmmParams& p, const QuadraticObjective& obj) {
  return Eigen::EigenSolver<Mat>(aq_matrix(p, obj), false).eigenvalues().cwiseAbs().maxCoeff();
}

McEvar mc_evar_oracle(const Ensemble& ens, double sigma2, double zeta,
                      const std::vector<double>& theta_grid, int k) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  McEvar best;
  const double lz = std::log(1.0 / zeta);
  for (double th : theta_grid) {
    const double v = empirical_entropic_risk(ens, sigma2, th, k) + 2.0 * sigma2 * lz / th;
    if (v < best.value) best = {v, th};
  }
  return best;
}

}  // namespace riskgmm
