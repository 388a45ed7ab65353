#include "json_io.hpp"

#include <cstdio>

namespace dualcop::io {
namespace {

// p×p row-major as a scalar for p = 1, nested rows otherwise.
json matrix(const std::vector<double>& m, int p) {
  if (p == 1) return m.at(0);
  json rows = json::array();
  for (int i = 0; i < p; ++i) {
    json row = json::array();
    for (int j = 0; j < p; ++j) row.push_back(m.at(i * p + j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string to_string(Engine e) { return e == Engine::quadrature ? "quadrature" : "mc"; }
std::string to_string(DomainCheck d) {
  return d == DomainCheck::admissible ? "admissible" : "density-floor";
}
std::string to_string(PowerForm f) { return f == PowerForm::sd ? "sd" : "variance"; }
std::string to_string(SimMode m) {
  switch (m) {
    case SimMode::null: return "null";
    case SimMode::power: return "power";
    case SimMode::estimator: return "estimator";
  }
  return "";
}

json to_json(const EstimationResult& r) {
  return {{"theta_hat", r.theta_hat},     {"criterion_value", r.criterion_value},
          {"converged", r.converged},     {"iterations", r.iterations},
          {"gradient_norm", r.gradient_norm}, {"boundary_flag", r.boundary_flag},
          {"method", r.method}};
}

json to_json(const PseudoLikelihoodResult& r) {
  return {{"theta_tilde", r.theta_tilde}, {"loglik", r.loglik},
          {"s_n", r.s_n},                 {"converged", r.converged},
          {"boundary_flag", r.boundary_flag}, {"iterations", r.iterations},
          {"method", r.method}};
}

json to_json(const VarianceEstimates& v) {
  return {{"xi_hat", matrix(v.xi_hat, v.p)},
          {"xi_hessian_hat", matrix(v.xi_hessian_hat, v.p)},
          {"sigma2_hat", matrix(v.sigma2_hat, v.p)},
          {"sigma2_chi2_hat", v.sigma2_chi2_hat}};
}

json to_json(const TestReport& r) {
  json j;
  j["family"] = r.family;
  j["n"] = r.n;
  j["t_n"] = r.t_n;
  j["dof"] = r.dof;
  j["alpha"] = r.alpha;
  j["critical_value"] = r.critical_value;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject ? json(*r.reject) : json(nullptr);
  j["theta_hat"] = r.theta_hat;
  j["theta0"] = r.theta0;
  j["estimation"] = to_json(r.estimation);
  j["variances"] = r.variances ? to_json(*r.variances) : json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const PowerPlan& p) {
  return {{"family", p.family},
          {"theta_alt", p.theta_alt},
          {"alpha", p.alpha},
          {"beta_target", p.beta_target},
          {"power_form", to_string(p.power_form)},
          {"chi2_div", p.chi2_div},
          {"sigma2_chi2", p.sigma2_chi2},
          {"q", p.q},
          {"z", p.z},
          {"a", p.a},
          {"b", p.b},
          {"n0_closed", p.n0_closed},
          {"n0_numeric", p.n0_numeric},
          {"n0", p.n0},
          {"discrepancy", p.discrepancy},
          {"n_star", p.n_star},
          {"power_at_n_star", p.power_at_n_star}};
}

json to_json(const SimulationSummary& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["family_id"] = s.family;
  j["theta_true"] = s.theta_true;
  j["n"] = s.n;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["dof"] = s.dof;
  j["succeeded"] = s.statistics.size();
  j["failed"] = s.failures.size();
  j["ks_distance"] = s.ks_distance;
  json rates = json::array();
  for (const auto& r : s.rejection_rates) rates.push_back({{"alpha", r.alpha}, {"rate", r.rate}});
  j["rejection_rates"] = rates;
  j["power_approx"] = s.power_approx ? json(*s.power_approx) : json(nullptr);
  if (s.estimator) {
    const auto& e = *s.estimator;
    j["estimator"] = {{"mean", e.mean},
                      {"bias", e.bias},
                      {"sd", e.sd},
                      {"sd_root_n", e.sd_root_n},
                      {"coverage", e.coverage},
                      {"studentized_ks", e.studentized_ks},
                      {"studentized_ks_pvalue", e.studentized_ks_pvalue},
                      {"theta_hat", e.theta_hat},
                      {"studentized", e.studentized}};
  } else {
    j["estimator"] = nullptr;
  }
  json fails = json::array();
  for (const auto& f : s.failures)
    fails.push_back({{"index", f.index}, {"subseed", f.subseed}, {"reason", f.reason}});
  j["failures"] = fails;
  j["statistics"] = s.statistics;
  json rows = json::array();
  for (const auto& r : s.ecdf) rows.push_back({r.t, r.ecdf, r.reference_cdf});
  j["ecdf"] = rows;
  j["warnings"] = s.warnings;
  return j;
}

void write_ecdf_csv(std::ostream& out, const SimulationSummary& s) {
  out << "t,ecdf,chi2_cdf\n";
  char buf[96];
  for (const auto& r : s.ecdf) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.t, r.ecdf, r.reference_cdf);
    out << buf;
  }
}

}  // namespace dualcop::io
