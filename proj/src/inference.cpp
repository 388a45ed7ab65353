#include "dualcop/inference.hpp"

#include <algorithm>
#include <cmath>

#include "dualcop/quadrature.hpp"
#include "dualcop/special.hpp"

namespace dualcop {
namespace {

// Integrands of W_i, its second form and Y_i at one point.
struct PointTerms {
  std::array<double, 2> w{};
  std::array<double, 2> w_alt{};
  double y = 0.0;
};

PointTerms point_terms(const CopulaModel& m, const ParamVec& theta, const std::array<double, 2>& a_grad,
                       double u1, double u2, int margin) {
  const int p = m.dim();
  const DensityDerivs d = density_derivs(m, theta, u1, u2, 1);
  const double cu = density_du(m, theta, u1, u2, margin);
  const std::array<double, 2> ctu = density_dtheta_du(m, theta, u1, u2, margin);
  const double ic = 1.0 / d.value, ic2 = ic * ic, ic3 = ic2 * ic;
  PointTerms t;
  t.y = cu * ic2;
  for (int j = 0; j < p; ++j) {
    t.w[j] = ctu[j] * ic2 - 3.0 * d.grad[j] * cu * ic3;
    t.w_alt[j] = -(a_grad[j] + d.grad[j] * ic3) * cu * ic2;
  }
  return t;
}

std::array<double, 2> score_of_a(const DualCriterion& dc, const ParamVec& theta) {
  const CriterionEval a = bias_integral_derivs(dc, theta, 1);
  if (!a.accepted) throw ParameterError("theta outside the enlarged parameter set");
  return a.grad;
}

void check_margin(int margin) {
  if (margin != 0 && margin != 1) throw std::invalid_argument("margin must be 0 or 1");
}

// Graded Gauss-Legendre rule on [a, b]; the integrands here are singular at
// the edges of the square for most families.
Rule1D graded_on(int order, double a, double b) {
  Rule1D r = graded(gauss_legendre(order, 0.0, 1.0), Grading::smooth);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    r.x[i] = a + (b - a) * r.x[i];
    r.w[i] *= b - a;
  }
  return r;
}

// q×q graded Gauss-Legendre over {u_i ≥ x_i} × [0,1].
PointTerms region_terms(const DualCriterion& dc, const ParamVec& theta, Point2 x, int margin,
                        int order) {
  check_margin(margin);
  if (order < 2) throw std::invalid_argument("quadrature order must be at least 2");
  if (!(x[margin] >= 0.0 && x[margin] <= 1.0)) throw DomainError("threshold outside [0,1]");
  const auto a_grad = score_of_a(dc, theta);
  PointTerms acc;
  if (x[margin] >= 1.0) return acc;
  const Rule1D outer = graded_on(order, x[margin], 1.0);
  const Rule1D inner = graded_on(order, 0.0, 1.0);
  const int p = dc.model().dim();
  for (std::size_t i = 0; i < outer.x.size(); ++i)
    for (std::size_t j = 0; j < inner.x.size(); ++j) {
      const double s = outer.x[i], t = inner.x[j];
      const PointTerms pt = margin == 0 ? point_terms(dc.model(), theta, a_grad, s, t, 0)
                                        : point_terms(dc.model(), theta, a_grad, t, s, 1);
      const double wt = outer.w[i] * inner.w[j];
      for (int k = 0; k < p; ++k) {
        acc.w[k] += wt * pt.w[k];
        acc.w_alt[k] += wt * pt.w_alt[k];
      }
      acc.y += wt * pt.y;
    }
  return acc;
}

Box admissible_box(const CopulaModel& m) {
  Box b;
  for (int k = 0; k < m.dim(); ++k) {
    const Interval& a = m.admissible()[k];
    const Interval& e = m.extended()[k];
    double lo = std::max(a.lo, e.lo), hi = std::min(a.hi, e.hi);
    const bool lo_open = lo == e.lo ? !e.lo_closed : !a.lo_closed;
    const bool hi_open = hi == e.hi ? !e.hi_closed : !a.hi_closed;
    if (lo_open) lo += 1e-9 * std::max(1.0, std::abs(lo));
    if (hi_open) hi -= 1e-9 * std::max(1.0, std::abs(hi));
    b.lo.push_back(lo);
    b.hi.push_back(hi);
  }
  return b;
}

std::vector<double> to_vector(const std::array<double, 2>& a, int p) {
  return std::vector<double>(a.begin(), a.begin() + p);
}

}  // namespace

std::vector<double> w_term(const DualCriterion& dc, const ParamVec& theta, Point2 x, int margin,
                           int order) {
  return to_vector(region_terms(dc, theta, x, margin, order).w, dc.model().dim());
}

std::vector<double> w_term_alt(const DualCriterion& dc, const ParamVec& theta, Point2 x,
                               int margin, int order) {
  return to_vector(region_terms(dc, theta, x, margin, order).w_alt, dc.model().dim());
}

double y_term(const DualCriterion& dc, const ParamVec& theta, Point2 x, int margin, int order) {
  return region_terms(dc, theta, x, margin, order).y;
}

MarginTerms margin_terms(const DualCriterion& dc, const ParamVec& theta, int margin,
                         const std::vector<double>& x, const InferenceOptions& opts) {
  check_margin(margin);
  if (opts.w_order < 2 || opts.segment_points < 1)
    throw std::invalid_argument("invalid quadrature order for margin terms");
  for (double xi : x)
    if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("threshold outside [0,1]");
  const auto a_grad = score_of_a(dc, theta);
  const int p = dc.model().dim();

  std::vector<double> knots(x);
  knots.push_back(0.0);
  knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const Rule1D inner = graded_on(opts.w_order, 0.0, 1.0);
  const Rule1D seg = gauss_legendre(opts.segment_points, 0.0, 1.0);
  // tail[j] holds the integral over [knots[j], 1].
  std::vector<PointTerms> tail(knots.size());
  for (std::size_t j = knots.size() - 1; j-- > 0;) {
    const double a = knots[j], h = knots[j + 1] - a;
    PointTerms acc = tail[j + 1];
    for (std::size_t r = 0; r < seg.x.size(); ++r) {
      const double s = a + h * seg.x[r];
      for (std::size_t q = 0; q < inner.x.size(); ++q) {
        const double t = inner.x[q];
        const PointTerms pt = margin == 0 ? point_terms(dc.model(), theta, a_grad, s, t, 0)
                                          : point_terms(dc.model(), theta, a_grad, t, s, 1);
        const double wt = h * seg.w[r] * inner.w[q];
        for (int k = 0; k < p; ++k) {
          acc.w[k] += wt * pt.w[k];
          acc.w_alt[k] += wt * pt.w_alt[k];
        }
        acc.y += wt * pt.y;
      }
    }
    tail[j] = acc;
  }

  MarginTerms out;
  out.x = x;
  out.w.reserve(x.size());
  out.w_alt.reserve(x.size());
  out.y.reserve(x.size());
  for (double xi : x) {
    const auto j = static_cast<std::size_t>(std::lower_bound(knots.begin(), knots.end(), xi) -
                                            knots.begin());
    out.w.push_back(tail[j].w);
    out.w_alt.push_back(tail[j].w_alt);
    out.y.push_back(tail[j].y);
  }
  return out;
}

VarianceEstimates variance_estimates(const DualCriterion& dc, const PseudoSample& ps,
                                     const ParamVec& theta_hat, const InferenceOptions& opts) {
  const CopulaModel& m = dc.model();
  const int p = m.dim();
  if (ps.n < 2) throw std::invalid_argument("variance estimates need at least 2 observations");
  const CriterionEval a = bias_integral_derivs(dc, theta_hat, 1);
  if (!a.accepted) throw ParameterError("variance_estimates: theta outside the enlarged parameter set");

  std::vector<double> x0(ps.n), x1(ps.n);
  for (std::size_t k = 0; k < ps.n; ++k) {
    x0[k] = ps.pseudo_u[k][0];
    x1[k] = ps.pseudo_u[k][1];
  }
  const MarginTerms t0 = margin_terms(dc, theta_hat, 0, x0, opts);
  const MarginTerms t1 = margin_terms(dc, theta_hat, 1, x1, opts);

  const double n = static_cast<double>(ps.n);
  std::vector<std::array<double, 2>> g(ps.n);
  std::vector<double> h(ps.n);
  VarianceEstimates v;
  v.p = p;
  v.xi_hat.assign(p * p, 0.0);
  for (std::size_t k = 0; k < ps.n; ++k) {
    const Point2 q = clamp_pseudo(ps.pseudo_u[k], ps.n);
    const DensityDerivs d = density_derivs(m, theta_hat, q[0], q[1], 1);
    const double ic = 1.0 / d.value;
    std::array<double, 2> score{};
    for (int i = 0; i < p; ++i) score[i] = a.grad[i] + d.grad[i] * ic * ic * ic;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) v.xi_hat[i * p + j] += score[i] * score[j] / n;
    for (int i = 0; i < p; ++i) g[k][i] = score[i] + t0.w[k][i] + t1.w[k][i];
    h[k] = a.value - 0.5 * ic * ic + 0.5 + t0.y[k] + t1.y[k];
  }

  std::array<double, 2> gbar{};
  double hbar = 0.0;
  for (std::size_t k = 0; k < ps.n; ++k) {
    for (int i = 0; i < p; ++i) gbar[i] += g[k][i] / n;
    hbar += h[k] / n;
  }
  v.sigma2_hat.assign(p * p, 0.0);
  for (std::size_t k = 0; k < ps.n; ++k) {
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        v.sigma2_hat[i * p + j] += (g[k][i] - gbar[i]) * (g[k][j] - gbar[j]) / (n - 1.0);
    v.sigma2_chi2_hat += (h[k] - hbar) * (h[k] - hbar) / (n - 1.0);
  }

  const CriterionEval e = empirical_criterion_derivs(dc, ps, theta_hat, 2);
  v.xi_hessian_hat.assign(p * p, 0.0);
  for (int i = 0; i < p * p; ++i) v.xi_hessian_hat[i] = -e.hess[i];
  return v;
}

TestReport independence_test(const DualCriterion& dc, const PseudoSample& ps, double alpha,
                             const TestOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  const CopulaModel& m = dc.model();
  TestReport r;
  r.family = std::string(m.id());
  r.n = ps.n;
  r.dof = m.dim();
  r.alpha = alpha;
  r.theta0 = m.theta0();
  if (ps.n < 20) r.warnings.push_back("sample size below 20; the chi-square calibration is unreliable");
  if (ps.ties) r.warnings.push_back("ties in the data were broken by input order");

  r.estimation = estimate(dc, ps, opts.estimate);
  r.theta_hat = r.estimation.theta_hat;
  r.t_n = statistic_Tn(r.estimation, ps.n);
  r.critical_value = chi2_quantile(1.0 - alpha, r.dof);
  r.p_value = r.t_n > 0.0 ? chi2_sf(r.t_n, r.dof) : 1.0;
  if (r.estimation.converged) {
    r.reject = r.t_n > r.critical_value;
  } else {
    r.warnings.push_back("estimate did not converge (" + r.estimation.method +
                         "); decision left undetermined");
  }
  if (opts.variances && r.estimation.converged) {
    try {
      r.variances = variance_estimates(dc, ps, r.theta_hat, opts.inference);
    } catch (const std::exception& ex) {
      r.warnings.push_back(std::string("variance estimates unavailable: ") + ex.what());
    }
  }
  return r;
}

TestReport independence_test(const std::vector<Point2>& data, const CopulaModel& model,
                             double alpha, const CriterionOptions& criterion,
                             const TestOptions& opts) {
  const DualCriterion dc(model, criterion);
  return independence_test(dc, make_pseudo(data), alpha, opts);
}

double population_sigma2_chi2(const DualCriterion& dc, const ParamVec& theta,
                              const InferenceOptions& opts) {
  const CopulaModel& m = dc.model();
  const double a = bias_integral(dc, theta);
  if (a == kRejected) throw ParameterError("population_sigma2_chi2: theta outside the enlarged parameter set");
  const Rule1D r = gauss_legendre(opts.population_order, 0.0, 1.0);
  const MarginTerms y0 = margin_terms(dc, theta, 0, r.x, opts);
  const MarginTerms y1 = margin_terms(dc, theta, 1, r.x, opts);
  const std::size_t q = r.x.size();
  double mass = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const double c = density(m, theta, r.x[i], r.x[j]);
      const double f = a - 0.5 / (c * c) + 0.5 + y0.y[i] + y1.y[j];
      const double wt = r.w[i] * r.w[j] * c;
      mass += wt;
      s1 += wt * f;
      s2 += wt * f * f;
    }
  const double mean = s1 / mass;
  return std::max(0.0, s2 / mass - mean * mean);
}

double power_formula(double chi2_div, double sigma2_chi2, double n, double alpha, int dof,
                     PowerForm form) {
  if (!(sigma2_chi2 > 0.0)) throw std::domain_error("sigma2_chi2 must be positive");
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  const double s = form == PowerForm::sd ? std::sqrt(sigma2_chi2) : sigma2_chi2;
  const double q = chi2_quantile(1.0 - alpha, dof);
  const double arg = std::sqrt(n) / s * (q / (2.0 * n) - chi2_div);
  return normal_cdf(-arg);
}

namespace {

struct Population {
  double chi2 = 0.0;
  double sigma2 = 0.0;
};

Population population(const DualCriterion& dc, const ParamVec& theta_alt,
                      const InferenceOptions& opts) {
  const CopulaModel& m = dc.model();
  if (!m.in_admissible(theta_alt)) throw ParameterError("theta_alt outside the admissible set");
  if (theta_alt == m.theta0()) throw ParameterError("theta_alt equals the independence point");
  Population pop;
  pop.chi2 = chi2_divergence(dc, theta_alt);
  if (pop.chi2 == kRejected) throw ParameterError("theta_alt outside the enlarged parameter set");
  pop.sigma2 = population_sigma2_chi2(dc, theta_alt, opts);
  return pop;
}

}  // namespace

double power_approx(const DualCriterion& dc, const ParamVec& theta_alt, double n, double alpha,
                    const InferenceOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  const Population pop = population(dc, theta_alt, opts);
  return power_formula(pop.chi2, pop.sigma2, n, alpha, dc.model().dim(), opts.power_form);
}

PowerPlan sample_size(const DualCriterion& dc, const ParamVec& theta_alt, double alpha,
                      double beta_target, const InferenceOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(beta_target > alpha && beta_target < 1.0))
    throw std::invalid_argument("beta must lie in (alpha, 1)");
  const CopulaModel& m = dc.model();
  const int dof = m.dim();
  const Population pop = population(dc, theta_alt, opts);
  if (!(pop.chi2 > 0.0)) throw std::domain_error("chi-square divergence is zero at theta_alt");

  PowerPlan plan;
  plan.family = std::string(m.id());
  plan.theta_alt = theta_alt;
  plan.alpha = alpha;
  plan.beta_target = beta_target;
  plan.power_form = opts.power_form;
  plan.chi2_div = pop.chi2;
  plan.sigma2_chi2 = pop.sigma2;
  plan.q = chi2_quantile(1.0 - alpha, dof);
  plan.z = normal_quantile(1.0 - beta_target);
  const double s = opts.power_form == PowerForm::sd ? std::sqrt(pop.sigma2) : pop.sigma2;
  plan.a = s * s * plan.z * plan.z;
  plan.b = plan.q * pop.chi2;
  plan.n0_closed =
      ((plan.a + plan.b) - std::sqrt(plan.a * (plan.a + 2.0 * plan.b))) / (2.0 * pop.chi2);

  const auto power = [&](double n) {
    return power_formula(pop.chi2, pop.sigma2, n, alpha, dof, opts.power_form);
  };
  // Power increases in n, so the root is bracketed by doubling.
  double lo = 1e-9, hi = 1.0;
  while (power(hi) < beta_target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw std::domain_error("sample size exceeds 1e15");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (power(mid) < beta_target ? lo : hi) = mid;
  }
  plan.n0_numeric = hi;

  plan.discrepancy = !(std::abs(plan.n0_closed - plan.n0_numeric) <= 1.0);
  plan.n0 = plan.discrepancy ? plan.n0_numeric : plan.n0_closed;
  plan.n_star = static_cast<std::size_t>(std::floor(plan.n0)) + 1;
  if (power(static_cast<double>(plan.n_star)) < beta_target) {
    // Closed form within one unit of the root but on the wrong side of it.
    plan.discrepancy = true;
    plan.n0 = plan.n0_numeric;
    plan.n_star = static_cast<std::size_t>(std::floor(plan.n0)) + 1;
  }
  plan.power_at_n_star = power(static_cast<double>(plan.n_star));
  return plan;
}

PseudoLikelihoodResult pseudo_mle_and_Sn(const CopulaModel& model, const PseudoSample& ps,
                                         const EstimateOptions& opts) {
  const int p = model.dim();
  const Objective loglik = [&](const std::vector<double>& theta, int order) {
    ObjectiveEval e;
    if (!model.in_admissible(theta)) return e;
    double s = 0.0;
    for (const Point2& u : ps.pseudo_u_scaled) {
      const DensityDerivs d = density_derivs(model, theta, u[0], u[1], order);
      if (!(d.value > 0.0) || !std::isfinite(d.value)) return ObjectiveEval{};
      s += std::log(d.value);
      if (order >= 1) {
        const double ic = 1.0 / d.value;
        for (int i = 0; i < p; ++i) e.grad[i] += d.grad[i] * ic;
        if (order >= 2)
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
              e.hess[i * p + j] += d.hess[i * p + j] * ic - d.grad[i] * d.grad[j] * ic * ic;
      }
    }
    e.ok = true;
    e.value = s;
    return e;
  };

  const Box box = admissible_box(model);
  const MaximizeResult r = maximize(loglik, model.theta0(), box, opts.maximize);
  const ObjectiveEval at0 = loglik(model.theta0(), 0);

  PseudoLikelihoodResult res;
  res.theta_tilde = r.x;
  res.loglik = r.value;
  res.s_n = 2.0 * (r.value - at0.value);
  res.converged = r.converged;
  res.iterations = r.iterations;
  res.method = r.method;
  for (int k = 0; k < p; ++k)
    if (r.x[k] <= box.lo[k] || r.x[k] >= box.hi[k]) res.boundary_flag = true;
  return res;
}

}  // namespace dualcop
