// Python bindings for the analysis, design, simulation and verification layers.
// Structured results cross the boundary as plain dicts (via the JSON views).

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "riskgmm/experiments.hpp"
#include "riskgmm/verify.hpp"

namespace py = pybind11;
using namespace riskgmm;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(to_py(v));
      return l;
    }
    case json::value_t::object: {
      py::dict d;
      for (auto it = j.begin(); it != j.end(); ++it) d[py::str(it.key())] = to_py(it.value());
      return d;
    }
    default: break;
  }
  return py::none();
}

const QuadraticObjective& as_quadratic(const Objective& obj) {
  const auto* q = dynamic_cast<const QuadraticObjective*>(&obj);
  if (!q) throw std::invalid_argument("a quadratic objective is required");
  return *q;
}

py::dict ensemble_dict(const Ensemble& e) {
  py::dict d;
  d["steps"] = e.steps;
  d["subopt"] = e.subopt;
  d["final_x"] = e.final_x;
  d["n_diverged"] = e.n_diverged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_riskgmm, m) {
  m.doc() = "Risk-averse generalized momentum methods: analysis, design and simulation.";

  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);

  py::class_<GmmParams>(m, "GmmParams")
      .def(py::init([](double a, double b, double g) { return GmmParams{a, b, g}; }),
           py::arg("alpha"), py::arg("beta") = 0.0, py::arg("gamma") = 0.0)
      .def_readwrite("alpha", &GmmParams::alpha)
      .def_readwrite("beta", &GmmParams::beta)
      .def_readwrite("gamma", &GmmParams::gamma)
      .def_static("gd", &GmmParams::gd, py::arg("alpha"))
      .def_static("agd_standard", &GmmParams::agd_standard, py::arg("mu"), py::arg("L"))
      .def("__repr__", [](const GmmParams& p) {
        return "GmmParams(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
               ", gamma=" + std::to_string(p.gamma) + ")";
      });

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("dim", &Objective::dim)
      .def_property_readonly("mu", &Objective::mu)
      .def_property_readonly("L", &Objective::lsmooth)
      .def_property_readonly("fstar", &Objective::fstar)
      .def_property_readonly("xstar", &Objective::xstar)
      .def("eval", [](const Objective& o, const Vec& x) { return o.eval(x); })
      .def("grad", [](const Objective& o, const Vec& x) { return o.grad(x); })
      .def("subopt", [](const Objective& o, const Vec& x) { return o.subopt(x); })
      .def("descriptor", [](const Objective& o) { return to_py(o.descriptor()); });
  py::class_<QuadraticObjective, Objective>(m, "QuadraticObjective")
      .def_property_readonly("eigenvalues", &QuadraticObjective::eigenvalues);
  py::class_<LogisticObjective, Objective>(m, "LogisticObjective");

  m.def("paper_quadratic", &make_paper_quadratic);
  m.def("figure1_quadratic", &make_figure1_quadratic);
  m.def("synthetic_logreg", &make_synthetic_logreg, py::arg("d") = 20, py::arg("n") = 200,
        py::arg("reg") = 1.0, py::arg("feature_std") = 5.0, py::arg("seed") = 7);
  m.def("objective_from_json", [](const std::string& s) { return objective_from_json(json::parse(s)); });

  // Quadratic analysis.
  m.def("mode_table", [](const GmmParams& p, const Objective& o) {
    py::list out;
    for (const auto& md : mode_table(p, as_quadratic(o))) {
      py::dict d;
      d["lambda"] = md.lambda;
      d["c"] = md.c;
      d["d"] = md.d;
      d["rho"] = md.rho;
      d["u"] = md.u;
      out.append(d);
    }
    return out;
  });
  m.def("spectral_radius", [](const GmmParams& p, const Objective& o) {
    return spectral_radius(p, as_quadratic(o));
  });
  m.def("in_stable_set", [](const GmmParams& p, const Objective& o) {
    return in_stable_set(p, as_quadratic(o));
  });
  m.def("in_feasible_set", [](const GmmParams& p, const Objective& o, double theta) {
    return in_feasible_set(p, as_quadratic(o), theta);
  });
  m.def("entropic_risk_exact", [](const GmmParams& p, const Objective& o, double sigma2, double theta) {
    return entropic_risk_exact(p, as_quadratic(o), sigma2, theta).entropic_risk;
  }, py::arg("params"), py::arg("objective"), py::arg("sigma2"), py::arg("theta"));
  m.def("evar_exact", [](const GmmParams& p, const Objective& o, double sigma2, double zeta) {
    return to_py(to_json(evar_exact(p, as_quadratic(o), sigma2, zeta)));
  }, py::arg("params"), py::arg("objective"), py::arg("sigma2"), py::arg("zeta"));
  m.def("evar_bound", [](const GmmParams& p, const Objective& o, double sigma2, double zeta) {
    return to_py(to_json(evar_bound(p, as_quadratic(o), sigma2, zeta)));
  }, py::arg("params"), py::arg("objective"), py::arg("sigma2"), py::arg("zeta"));
  m.def("design_quad", [](const Objective& o, double zeta, double epsilon, double sigma2, bool agd, int n) {
    QuadDesignSpec spec;
    spec.zeta = zeta;
    spec.epsilon = epsilon;
    spec.sigma2 = sigma2;
    spec.agd_constraint = agd;
    spec.grid.n_alpha = spec.grid.n_beta = spec.grid.n_gamma = n;
    const auto r = design_ra_gmm_quad(as_quadratic(o), spec);
    return py::make_tuple(r.params, to_py(to_json(r.bound)), r.rate);
  }, py::arg("objective"), py::arg("zeta") = 0.95, py::arg("epsilon") = 0.25, py::arg("sigma2") = 1.0,
     py::arg("agd") = false, py::arg("grid") = 60);

  // Smooth strongly convex analysis.
  m.def("classify_theta_psi", [](double vt, double ps, double mu, double L) {
    const auto s = classify_theta_psi({vt, ps}, mu, L);
    py::dict d;
    d["S0"] = s.in_S0;
    d["Splus"] = s.in_Splus;
    d["Sminus"] = s.in_Sminus;
    d["S1"] = s.in_S1;
    d["Sc"] = s.in_Sc;
    return d;
  });
  m.def("smooth_params", [](double vt, double ps, double mu, double L, std::optional<double> a) {
    return to_py(to_json(smooth_params({vt, ps}, mu, L, a)));
  }, py::arg("vartheta"), py::arg("psi"), py::arg("mu"), py::arg("L"), py::arg("alpha") = py::none());
  m.def("evar_bound_gaussian", [](double vt, double ps, double mu, double L, int d, double sigma2,
                                  double zeta, double phi, std::optional<double> a) {
    return to_py(to_json(evar_bound_gaussian(smooth_params({vt, ps}, mu, L, a), d, sigma2, zeta, phi, 0.0)));
  }, py::arg("vartheta"), py::arg("psi"), py::arg("mu"), py::arg("L"), py::arg("d"),
     py::arg("sigma2") = 1.0, py::arg("zeta") = 0.95, py::arg("phi") = 0.99, py::arg("alpha") = py::none());
  m.def("mi_certify", [](double vt, double ps, double mu, double L, std::optional<double> a) {
    const auto sp = smooth_params({vt, ps}, mu, L, a);
    return to_py(to_json(mi_certify(sp.base, sp.rate2, lyapunov_matrix(sp), mu, L)));
  }, py::arg("vartheta"), py::arg("psi"), py::arg("mu"), py::arg("L"), py::arg("alpha") = py::none());
  m.def("design_smooth", [](double mu, double L, int d, double epsilon, bool agd, bool global, int n) {
    SmoothDesignSpec spec;
    spec.d = d;
    spec.epsilon = epsilon;
    spec.agd_only = agd;
    spec.global_benchmark = global;
    spec.grid.n_vartheta = spec.grid.n_psi = n;
    const auto r = design_ra_gmm_smooth(mu, L, spec);
    return py::make_tuple(r.best.params.base, to_py(to_json(r.best.evar)), r.best.params.rate2);
  }, py::arg("mu"), py::arg("L"), py::arg("d"), py::arg("epsilon") = 0.05, py::arg("agd") = false,
     py::arg("global_benchmark") = false, py::arg("grid") = 200);

  // Simulation. The GIL is released while paths run.
  m.def("run_gmm", [](const Objective& o, const GmmParams& p, int k_max, int n_paths,
                      std::uint64_t seed, double sigma2, std::optional<Vec> x0) {
    RunConfig rc;
    rc.params = p;
    rc.k_max = k_max;
    rc.n_paths = n_paths;
    rc.seed = seed;
    rc.x0 = x0 ? *x0 : Vec(Vec::Ones(o.dim()));
    Ensemble e;
    {
      py::gil_scoped_release release;
      e = run_gmm(o, rc, sigma2 > 0 ? NoiseModel::gaussian(sigma2) : NoiseModel{});
    }
    return ensemble_dict(e);
  }, py::arg("objective"), py::arg("params"), py::arg("k_max") = 300, py::arg("n_paths") = 50,
     py::arg("seed") = 1, py::arg("sigma2") = 1.0, py::arg("x0") = py::none());
  m.def("empirical_entropic_risk", [](const std::vector<double>& samples, double sigma2, double theta) {
    Ensemble e;
    e.steps = {0};
    e.subopt = Eigen::Map<const Vec>(samples.data(), static_cast<Eigen::Index>(samples.size()));
    e.diverged.assign(samples.size(), 0);
    return empirical_entropic_risk(e, sigma2, theta, 0);
  }, py::arg("samples"), py::arg("sigma2"), py::arg("theta"));

  m.def("verify_oracles", [](std::uint64_t seed) {
    py::list out;
    std::vector<CheckResult> rs{check_companion_radius(2000, seed), check_aq_radius(200, seed + 1),
                                check_stationary_variance(200, seed + 2)};
    for (const auto& r : rs) out.append(to_py(r.to_json()));
    return out;
  }, py::arg("seed") = 2024);
}
