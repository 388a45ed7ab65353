#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualcop/copulas.hpp"
#include "dualcop/dual.hpp"
#include "dualcop/empirical.hpp"
#include "dualcop/inference.hpp"
#include "dualcop/simharness.hpp"

namespace py = pybind11;
using namespace dualcop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point2> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2)
    throw py::value_error("data must have shape (n, 2)");
  std::vector<Point2> out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {r(i, 0), r(i, 1)};
  return out;
}

Array from_points(const std::vector<Point2>& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i][0];
    w(i, 1) = pts[i][1];
  }
  return a;
}

DualCriterion criterion_for(const std::string& family, const CriterionOptions& opts) {
  return DualCriterion(CopulaModel::from_id(family), opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual chi-square divergence estimation and independence tests for bivariate copulas";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);

  py::enum_<Engine>(m, "Engine").value("quadrature", Engine::quadrature).value("mc", Engine::mc);
  py::enum_<DomainCheck>(m, "DomainCheck")
      .value("admissible", DomainCheck::admissible)
      .value("density_floor", DomainCheck::density_floor);
  py::enum_<PowerForm>(m, "PowerForm").value("sd", PowerForm::sd).value("variance", PowerForm::variance);
  py::enum_<SimMode>(m, "SimMode")
      .value("null", SimMode::null)
      .value("power", SimMode::power)
      .value("estimator", SimMode::estimator);

  py::class_<CriterionOptions>(m, "CriterionOptions")
      .def(py::init<>())
      .def_readwrite("engine", &CriterionOptions::engine)
      .def_readwrite("quad_order", &CriterionOptions::quad_order)
      .def_readwrite("mc_points", &CriterionOptions::mc_points)
      .def_readwrite("mc_seed", &CriterionOptions::mc_seed)
      .def_readwrite("epsilon_c", &CriterionOptions::epsilon_c)
      .def_readwrite("domain", &CriterionOptions::domain);

  py::class_<EstimateOptions>(m, "EstimateOptions")
      .def(py::init<>())
      .def_property(
          "grad_tol", [](const EstimateOptions& o) { return o.maximize.grad_tol; },
          [](EstimateOptions& o, double v) { o.maximize.grad_tol = v; })
      .def_property(
          "max_iter", [](const EstimateOptions& o) { return o.maximize.max_iter; },
          [](EstimateOptions& o, int v) { o.maximize.max_iter = v; });

  py::class_<InferenceOptions>(m, "InferenceOptions")
      .def(py::init<>())
      .def_readwrite("w_order", &InferenceOptions::w_order)
      .def_readwrite("segment_points", &InferenceOptions::segment_points)
      .def_readwrite("population_order", &InferenceOptions::population_order)
      .def_readwrite("power_form", &InferenceOptions::power_form);

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_readonly("theta_hat", &EstimationResult::theta_hat)
      .def_readonly("criterion_value", &EstimationResult::criterion_value)
      .def_readonly("iterations", &EstimationResult::iterations)
      .def_readonly("converged", &EstimationResult::converged)
      .def_readonly("gradient_norm", &EstimationResult::gradient_norm)
      .def_readonly("boundary_flag", &EstimationResult::boundary_flag)
      .def_readonly("method", &EstimationResult::method);

  py::class_<VarianceEstimates>(m, "VarianceEstimates")
      .def_readonly("p", &VarianceEstimates::p)
      .def_readonly("xi_hat", &VarianceEstimates::xi_hat)
      .def_readonly("xi_hessian_hat", &VarianceEstimates::xi_hessian_hat)
      .def_readonly("sigma2_hat", &VarianceEstimates::sigma2_hat)
      .def_readonly("sigma2_chi2_hat", &VarianceEstimates::sigma2_chi2_hat);

  py::class_<TestReport>(m, "TestReport")
      .def_readonly("family", &TestReport::family)
      .def_readonly("n", &TestReport::n)
      .def_readonly("t_n", &TestReport::t_n)
      .def_readonly("dof", &TestReport::dof)
      .def_readonly("alpha", &TestReport::alpha)
      .def_readonly("critical_value", &TestReport::critical_value)
      .def_readonly("p_value", &TestReport::p_value)
      .def_readonly("reject", &TestReport::reject)
      .def_readonly("theta_hat", &TestReport::theta_hat)
      .def_readonly("theta0", &TestReport::theta0)
      .def_readonly("estimation", &TestReport::estimation)
      .def_readonly("variances", &TestReport::variances)
      .def_readonly("warnings", &TestReport::warnings);

  py::class_<PowerPlan>(m, "PowerPlan")
      .def_readonly("family", &PowerPlan::family)
      .def_readonly("theta_alt", &PowerPlan::theta_alt)
      .def_readonly("alpha", &PowerPlan::alpha)
      .def_readonly("beta_target", &PowerPlan::beta_target)
      .def_readonly("power_form", &PowerPlan::power_form)
      .def_readonly("chi2_div", &PowerPlan::chi2_div)
      .def_readonly("sigma2_chi2", &PowerPlan::sigma2_chi2)
      .def_readonly("q", &PowerPlan::q)
      .def_readonly("z", &PowerPlan::z)
      .def_readonly("a", &PowerPlan::a)
      .def_readonly("b", &PowerPlan::b)
      .def_readonly("n0_closed", &PowerPlan::n0_closed)
      .def_readonly("n0_numeric", &PowerPlan::n0_numeric)
      .def_readonly("n0", &PowerPlan::n0)
      .def_readonly("discrepancy", &PowerPlan::discrepancy)
      .def_readonly("n_star", &PowerPlan::n_star)
      .def_readonly("power_at_n_star", &PowerPlan::power_at_n_star);

  py::class_<PseudoLikelihoodResult>(m, "PseudoLikelihoodResult")
      .def_readonly("theta_tilde", &PseudoLikelihoodResult::theta_tilde)
      .def_readonly("loglik", &PseudoLikelihoodResult::loglik)
      .def_readonly("s_n", &PseudoLikelihoodResult::s_n)
      .def_readonly("converged", &PseudoLikelihoodResult::converged)
      .def_readonly("boundary_flag", &PseudoLikelihoodResult::boundary_flag)
      .def_readonly("iterations", &PseudoLikelihoodResult::iterations)
      .def_readonly("method", &PseudoLikelihoodResult::method);

  py::class_<EstimatorSummary>(m, "EstimatorSummary")
      .def_readonly("mean", &EstimatorSummary::mean)
      .def_readonly("bias", &EstimatorSummary::bias)
      .def_readonly("sd", &EstimatorSummary::sd)
      .def_readonly("sd_root_n", &EstimatorSummary::sd_root_n)
      .def_readonly("coverage", &EstimatorSummary::coverage)
      .def_readonly("studentized_ks", &EstimatorSummary::studentized_ks)
      .def_readonly("studentized_ks_pvalue", &EstimatorSummary::studentized_ks_pvalue)
      .def_readonly("theta_hat", &EstimatorSummary::theta_hat)
      .def_readonly("studentized", &EstimatorSummary::studentized);

  py::class_<SimulationSummary>(m, "SimulationSummary")
      .def_readonly("mode", &SimulationSummary::mode)
      .def_readonly("family", &SimulationSummary::family)
      .def_readonly("theta_true", &SimulationSummary::theta_true)
      .def_readonly("n", &SimulationSummary::n)
      .def_readonly("replications", &SimulationSummary::replications)
      .def_readonly("seed", &SimulationSummary::seed)
      .def_readonly("dof", &SimulationSummary::dof)
      .def_readonly("statistics", &SimulationSummary::statistics)
      .def_readonly("ks_distance", &SimulationSummary::ks_distance)
      .def_property_readonly("ecdf",
                             [](const SimulationSummary& s) {
                               std::vector<std::array<double, 3>> rows;
                               for (const auto& r : s.ecdf) rows.push_back({r.t, r.ecdf, r.reference_cdf});
                               return rows;
                             })
      .def_property_readonly("rejection_rates",
                             [](const SimulationSummary& s) {
                               py::dict d;
                               for (const auto& r : s.rejection_rates) d[py::float_(r.alpha)] = r.rate;
                               return d;
                             })
      .def_property_readonly("failures",
                             [](const SimulationSummary& s) {
                               py::list l;
                               for (const auto& f : s.failures)
                                 l.append(py::make_tuple(f.index, f.subseed, f.reason));
                               return l;
                             })
      .def_readonly("power_approx", &SimulationSummary::power_approx)
      .def_readonly("estimator", &SimulationSummary::estimator)
      .def_readonly("warnings", &SimulationSummary::warnings);

  m.def("families", [] {
    std::vector<std::string> ids;
    for (auto id : CopulaModel::ids()) ids.emplace_back(id);
    return ids;
  }, "Identifiers of the implemented copula families.");

  m.def("theta0", [](const std::string& family) { return CopulaModel::from_id(family).theta0(); },
        py::arg("family"));

  m.def("density",
        [](const std::string& family, const ParamVec& theta, double u1, double u2) {
          return density(CopulaModel::from_id(family), theta, u1, u2);
        },
        py::arg("family"), py::arg("theta"), py::arg("u1"), py::arg("u2"));

  m.def("cdf",
        [](const std::string& family, const ParamVec& theta, double u1, double u2) {
          return cdf(CopulaModel::from_id(family), theta, u1, u2);
        },
        py::arg("family"), py::arg("theta"), py::arg("u1"), py::arg("u2"));

  m.def("sample",
        [](const std::string& family, const ParamVec& theta, std::size_t n, std::uint64_t seed) {
          std::vector<Point2> pts;
          {
            py::gil_scoped_release release;
            pts = sample(CopulaModel::from_id(family), theta, n, seed);
          }
          return from_points(pts);
        },
        py::arg("family"), py::arg("theta"), py::arg("n"), py::arg("seed"),
        "Draw n pairs from the copula as an (n, 2) array.");

  m.def("m_eval",
        [](const std::string& family, const ParamVec& theta, double u1, double u2,
           const CriterionOptions& opts) { return m_eval(criterion_for(family, opts), theta, u1, u2); },
        py::arg("family"), py::arg("theta"), py::arg("u1"), py::arg("u2"),
        py::arg("options") = CriterionOptions{});

  m.def("chi2_divergence",
        [](const std::string& family, const ParamVec& theta, const CriterionOptions& opts) {
          return chi2_divergence(criterion_for(family, opts), theta);
        },
        py::arg("family"), py::arg("theta"), py::arg("options") = CriterionOptions{});

  m.def("empirical_criterion",
        [](const Array& data, const std::string& family, const ParamVec& theta,
           const CriterionOptions& opts) {
          return empirical_criterion(criterion_for(family, opts), make_pseudo(to_points(data)), theta);
        },
        py::arg("data"), py::arg("family"), py::arg("theta"), py::arg("options") = CriterionOptions{});

  m.def("estimate",
        [](const Array& data, const std::string& family, const CriterionOptions& copts,
           const EstimateOptions& eopts) {
          const auto pts = to_points(data);
          py::gil_scoped_release release;
          return estimate(criterion_for(family, copts), make_pseudo(pts), eopts);
        },
        py::arg("data"), py::arg("family"), py::arg("options") = CriterionOptions{},
        py::arg("estimate_options") = EstimateOptions{},
        "Dual chi-square estimate of the copula parameter.");

  m.def("independence_test",
        [](const Array& data, const std::string& family, double alpha, const CriterionOptions& copts,
           const EstimateOptions& eopts, const InferenceOptions& iopts, bool variances) {
          const auto pts = to_points(data);
          TestOptions t;
          t.estimate = eopts;
          t.inference = iopts;
          t.variances = variances;
          py::gil_scoped_release release;
          return independence_test(pts, CopulaModel::from_id(family), alpha, copts, t);
        },
        py::arg("data"), py::arg("family"), py::arg("alpha") = 0.05,
        py::arg("options") = CriterionOptions{}, py::arg("estimate_options") = EstimateOptions{},
        py::arg("inference_options") = InferenceOptions{}, py::arg("variances") = true);

  m.def("pseudo_mle",
        [](const Array& data, const std::string& family, const EstimateOptions& eopts) {
          const auto pts = to_points(data);
          py::gil_scoped_release release;
          return pseudo_mle_and_Sn(CopulaModel::from_id(family), make_pseudo(pts), eopts);
        },
        py::arg("data"), py::arg("family"), py::arg("estimate_options") = EstimateOptions{},
        "Pseudo-maximum-likelihood estimate and its likelihood-ratio statistic S_n.");

  m.def("power_approx",
        [](const std::string& family, const ParamVec& theta_alt, double n, double alpha,
           const CriterionOptions& copts, const InferenceOptions& iopts) {
          return power_approx(criterion_for(family, copts), theta_alt, n, alpha, iopts);
        },
        py::arg("family"), py::arg("theta_alt"), py::arg("n"), py::arg("alpha") = 0.05,
        py::arg("options") = CriterionOptions{}, py::arg("inference_options") = InferenceOptions{});

  m.def("sample_size",
        [](const std::string& family, const ParamVec& theta_alt, double alpha, double beta,
           const CriterionOptions& copts, const InferenceOptions& iopts) {
          return sample_size(criterion_for(family, copts), theta_alt, alpha, beta, iopts);
        },
        py::arg("family"), py::arg("theta_alt"), py::arg("alpha") = 0.05, py::arg("beta") = 0.9,
        py::arg("options") = CriterionOptions{}, py::arg("inference_options") = InferenceOptions{});

  m.def("simulate",
        [](SimMode mode, const std::string& family, const ParamVec& theta, std::size_t n,
           std::size_t replications, std::uint64_t seed, const std::vector<double>& alphas,
           unsigned threads, const CriterionOptions& copts, const EstimateOptions& eopts,
           const InferenceOptions& iopts) {
          SimConfig c;
          c.family = family;
          c.theta = theta;
          c.n = n;
          c.replications = replications;
          c.seed = seed;
          c.alphas = alphas;
          c.threads = threads;
          c.criterion = copts;
          c.estimate = eopts;
          c.inference = iopts;
          py::gil_scoped_release release;
          return simulate(mode, c);
        },
        py::arg("mode"), py::arg("family"), py::arg("theta") = ParamVec{}, py::arg("n") = 100,
        py::arg("replications") = 500, py::arg("seed") = 1,
        py::arg("alphas") = std::vector<double>{0.05}, py::arg("threads") = 1,
        py::arg("options") = CriterionOptions{}, py::arg("estimate_options") = EstimateOptions{},
        py::arg("inference_options") = InferenceOptions{});
}
