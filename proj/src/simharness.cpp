#include "dualcop/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "dualcop/random.hpp"
#include "dualcop/special.hpp"

namespace dualcop {
namespace {

struct Replication {
  bool ok = false;
  std::string reason;
  double t_n = 0.0;
  ParamVec theta_hat;
  ParamVec se;  // estimator mode only
};

std::vector<Point2> uniform_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> d(n);
  for (auto& p : d) p = {rng.uniform(), rng.uniform()};
  return d;
}

// Sandwich standard errors from H⁻¹ Σ H⁻¹ / n, with H = −∂²M_n.
ParamVec sandwich_se(const VarianceEstimates& v, std::size_t n) {
  const int p = v.p;
  const auto& h = v.xi_hessian_hat;
  const auto& s = v.sigma2_hat;
  ParamVec se(p);
  if (p == 1) {
    se[0] = std::sqrt(s[0] / (h[0] * h[0]) / n);
    return se;
  }
  const double det = h[0] * h[3] - h[1] * h[2];
  const double inv[4] = {h[3] / det, -h[1] / det, -h[2] / det, h[0] / det};
  double tmp[4], cov[4];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tmp[i * 2 + j] = inv[i * 2] * s[j] + inv[i * 2 + 1] * s[2 + j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) cov[i * 2 + j] = tmp[i * 2] * inv[j] + tmp[i * 2 + 1] * inv[2 + j];
  for (int i = 0; i < 2; ++i) se[i] = std::sqrt(cov[i * 3] / n);
  return se;
}

Replication run_one(SimMode mode, const SimConfig& cfg, const DualCriterion& dc,
                    std::uint64_t seed) {
  const CopulaModel& m = dc.model();
  Replication r;
  const bool independent = mode == SimMode::null || cfg.theta == m.theta0();
  const std::vector<Point2> data =
      independent ? uniform_pairs(cfg.n, seed) : sample(m, cfg.theta, cfg.n, seed);
  const PseudoSample ps = make_pseudo(data);
  const EstimationResult est = estimate(dc, ps, cfg.estimate);
  if (!est.converged) {
    r.reason = "estimate did not converge (" + est.method + ")";
    return r;
  }
  r.t_n = statistic_Tn(est, ps.n);
  r.theta_hat = est.theta_hat;
  if (mode == SimMode::estimator) {
    const VarianceEstimates v = variance_estimates(dc, ps, est.theta_hat, cfg.inference);
    r.se = sandwich_se(v, ps.n);
    for (double s : r.se)
      if (!(s > 0.0) || !std::isfinite(s)) {
        r.reason = "standard error not positive";
        return r;
      }
  }
  r.ok = true;
  return r;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace

std::vector<EcdfRow> ecdf_rows(const std::vector<double>& sorted,
                               const std::function<double(double)>& cdf) {
  std::vector<EcdfRow> rows;
  const double m = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) continue;
    rows.push_back({sorted[k], (k + 1) / m, cdf(sorted[k])});
  }
  return rows;
}

SimulationSummary simulate(SimMode mode, const SimConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (cfg.n < 2) throw std::invalid_argument("n must be at least 2");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  const CopulaModel model = CopulaModel::from_id(cfg.family);
  ParamVec theta = mode == SimMode::null ? model.theta0() : cfg.theta;
  if (mode != SimMode::null) {
    if (static_cast<int>(theta.size()) != model.dim())
      throw ParameterError("theta has the wrong dimension for " + cfg.family);
    if (!model.in_admissible(theta)) throw ParameterError("theta outside the admissible set");
  }
  SimConfig run = cfg;
  run.theta = theta;
  const DualCriterion dc(model, cfg.criterion);

  std::vector<Replication> reps(cfg.replications);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < reps.size();) {
      try {
        reps[i] = run_one(mode, run, dc, subseed(cfg.seed, i));
      } catch (const std::exception& ex) {
        reps[i] = Replication{};
        reps[i].reason = ex.what();
      }
    }
  };
  const unsigned nt = std::min<std::size_t>(cfg.threads, cfg.replications);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SimulationSummary s;
  s.mode = mode;
  s.family = cfg.family;
  s.theta_true = theta;
  s.n = cfg.n;
  s.replications = cfg.replications;
  s.seed = cfg.seed;
  s.dof = model.dim();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].ok)
      s.statistics.push_back(reps[i].t_n);
    else
      s.failures.push_back({i, subseed(cfg.seed, i), reps[i].reason});
  }
  std::sort(s.statistics.begin(), s.statistics.end());
  const int dof = s.dof;
  const auto ref = [dof](double t) { return chi2_cdf(t, dof); };
  if (!s.statistics.empty()) {
    s.ecdf = ecdf_rows(s.statistics, ref);
    s.ks_distance = ks_distance(s.statistics, ref);
  } else {
    s.warnings.push_back("every replication failed");
  }
  for (double a : cfg.alphas) {
    const double q = chi2_quantile(1.0 - a, dof);
    std::size_t k = 0;
    for (double t : s.statistics) k += t > q;
    s.rejection_rates.push_back(
        {a, s.statistics.empty() ? 0.0 : double(k) / double(s.statistics.size())});
  }

  if (mode == SimMode::power && theta != model.theta0()) {
    try {
      s.power_approx = power_approx(dc, theta, double(cfg.n), cfg.alphas.front(), cfg.inference);
    } catch (const std::exception& ex) {
      s.warnings.push_back(std::string("power approximation unavailable: ") + ex.what());
    }
  }

  if (mode == SimMode::estimator && !s.statistics.empty()) {
    const int p = model.dim();
    EstimatorSummary e;
    const double z = normal_quantile(0.975);
    const double rn = std::sqrt(double(cfg.n));
    for (int j = 0; j < p; ++j) {
      std::vector<double> th;
      std::size_t covered = 0;
      for (const auto& r : reps) {
        if (!r.ok) continue;
        th.push_back(r.theta_hat[j]);
        covered += std::abs(r.theta_hat[j] - theta[j]) <= z * r.se[j];
        if (j == 0) e.studentized.push_back((r.theta_hat[0] - theta[0]) / r.se[0]);
      }
      const double mu = mean_of(th), sd = sd_of(th);
      e.mean.push_back(mu);
      e.bias.push_back(mu - theta[j]);
      e.sd.push_back(sd);
      e.sd_root_n.push_back(sd * rn);
      e.coverage.push_back(double(covered) / double(th.size()));
      if (j == 0) e.theta_hat = th;
    }
    e.studentized_ks = ks_distance(e.studentized, [](double x) { return normal_cdf(x); });
    e.studentized_ks_pvalue = ks_pvalue(e.studentized_ks, e.studentized.size());
    s.estimator = std::move(e);
  }
  return s;
}

SimulationSummary simulate_null(const SimConfig& config) { return simulate(SimMode::null, config); }
SimulationSummary simulate_power(const SimConfig& config) { return simulate(SimMode::power, config); }
SimulationSummary simulate_estimator(const SimConfig& config) {
  return simulate(SimMode::estimator, config);
}

}  // namespace dualcop
