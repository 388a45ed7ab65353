#include "dualcop/dual.hpp"

#include <algorithm>
#include <cmath>

#include "dualcop/random.hpp"

namespace dualcop {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pulls an open bound inward so the box is closed and strictly inside.
double inset(double b, double toward) {
  const double d = 1e-9 * std::max(1.0, std::abs(b));
  return b < toward ? b + d : b - d;
}

// A(θ) with its θ-derivatives, from the criterion's nodes.
struct NodeTerms {
  bool accepted = false;
  double a = 0.0;
  double se = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 4> hess{};
};

NodeTerms node_terms(const DualCriterion& dc, const ParamVec& theta, int order) {
  NodeTerms t;
  const CopulaModel& m = dc.model();
  if (!m.in_extended(theta)) return t;
  if (dc.options().domain == DomainCheck::admissible && !m.in_admissible(theta)) return t;
  const double floor = dc.options().epsilon_c;
  const int p = m.dim();
  const auto &u = dc.node_u(), &v = dc.node_v(), &w = dc.node_w();
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const DensityDerivs d = density_derivs(m, theta, u[k], v[k], order);
    const double c = d.value;
    if (!(c > floor) || !std::isfinite(c)) return NodeTerms{};
    const double ic = 1.0 / c;
    const double f = ic - 1.0;
    s += w[k] * f;
    s2 += w[k] * f * f;
    if (order >= 1) {
      for (int i = 0; i < p; ++i) t.grad[i] -= w[k] * d.grad[i] * ic * ic;
      if (order >= 2)
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < p; ++j)
            t.hess[i * p + j] +=
                w[k] * (2.0 * d.grad[i] * d.grad[j] * ic * ic * ic - d.hess[i * p + j] * ic * ic);
    }
  }
  t.accepted = true;
  t.a = s;
  if (dc.options().engine == Engine::mc) {
    const double n = static_cast<double>(w.size());
    t.se = std::sqrt(std::max(0.0, s2 - s * s) / (n - 1.0));
  }
  return t;
}

// Adds the −½/c² + ½ part of m at one point with weight wt.
bool add_point(CriterionEval& out, const DensityDerivs& d, double wt, int p, int order) {
  const double c = d.value;
  if (!(c != 0.0) || !std::isfinite(c)) return false;
  const double ic = 1.0 / c, ic2 = ic * ic, ic3 = ic2 * ic;
  out.value += wt * (0.5 - 0.5 * ic2);
  if (order >= 1) {
    for (int i = 0; i < p; ++i) out.grad[i] += wt * d.grad[i] * ic3;
    if (order >= 2)
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          out.hess[i * p + j] +=
              wt * (d.hess[i * p + j] * ic3 - 3.0 * d.grad[i] * d.grad[j] * ic3 * ic);
  }
  return true;
}

ObjectiveEval to_objective(const CriterionEval& e) {
  ObjectiveEval o;
  o.ok = e.accepted;
  o.value = e.value;
  o.grad = e.grad;
  o.hess = e.hess;
  return o;
}

EstimationResult run_estimate(const DualCriterion& dc, const Objective& obj,
                              const EstimateOptions& opts) {
  const CopulaModel& m = dc.model();
  const MaximizeResult r = maximize(obj, m.theta0(), dc.search_box(), opts.maximize);
  EstimationResult res;
  res.theta_hat = r.x;
  res.criterion_value = r.value;
  res.iterations = r.iterations;
  res.converged = r.converged;
  res.gradient_norm = r.gradient_norm;
  res.method = r.method;
  bool edge = !m.in_admissible(r.x);
  for (int k = 0; k < m.dim() && !edge; ++k) {
    const Interval& iv = m.admissible()[k];
    edge = r.x[k] == iv.lo || r.x[k] == iv.hi;
  }
  res.boundary_flag = edge;
  // Stopping on an edge of the search box that is not an edge of Θ means the
  // criterion kept increasing towards the artificial cap.
  const Box box = dc.search_box();
  for (int k = 0; k < m.dim(); ++k) {
    const Interval& iv = m.admissible()[k];
    const bool at_lo = r.x[k] <= box.lo[k] && !(iv.lo_closed && box.lo[k] == iv.lo);
    const bool at_hi = r.x[k] >= box.hi[k] && !(iv.hi_closed && box.hi[k] == iv.hi);
    if (at_lo || at_hi) res.converged = false;
  }
  return res;
}

}  // namespace

DualCriterion::DualCriterion(CopulaModel model, CriterionOptions opts)
    : model_(std::move(model)), opts_(opts) {
  if (opts_.engine == Engine::quadrature) {
    if (opts_.quad_order < 2) throw std::invalid_argument("quadrature order must be at least 2");
    const TensorRule q = tensor_rule(opts_.quad_order, opts_.grading);
    u_ = q.u;
    v_ = q.v;
    w_ = q.w;
  } else {
    if (opts_.mc_points < 2) throw std::invalid_argument("need at least 2 Monte Carlo points");
    Rng rng(opts_.mc_seed);
    u_.resize(opts_.mc_points);
    v_.resize(opts_.mc_points);
    w_.assign(opts_.mc_points, 1.0 / static_cast<double>(opts_.mc_points));
    for (std::size_t k = 0; k < opts_.mc_points; ++k) {
      u_[k] = rng.uniform();
      v_[k] = rng.uniform();
    }
  }
}

Box DualCriterion::search_box() const {
  Box b;
  for (int k = 0; k < model_.dim(); ++k) {
    const Interval& e = model_.extended()[k];
    double lo = inset(e.lo, e.hi), hi = inset(e.hi, e.lo);
    if (opts_.domain == DomainCheck::admissible) {
      const Interval& a = model_.admissible()[k];
      if (a.lo > lo) lo = a.lo_closed ? a.lo : inset(a.lo, a.hi);
      if (a.hi < hi) hi = a.hi_closed ? a.hi : inset(a.hi, a.lo);
    }
    b.lo.push_back(lo);
    b.hi.push_back(hi);
  }
  return b;
}

bool DualCriterion::accepts(const ParamVec& theta) const {
  if (!model_.in_extended(theta)) return false;
  if (opts_.domain == DomainCheck::admissible && !model_.in_admissible(theta)) return false;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const double c = density(model_, theta, u_[k], v_[k]);
    if (!(c > opts_.epsilon_c) || !std::isfinite(c)) return false;
  }
  return true;
}

BiasIntegral bias_integral_detail(const DualCriterion& dc, const ParamVec& theta) {
  const NodeTerms t = node_terms(dc, theta, 0);
  BiasIntegral b;
  if (!t.accepted) return b;
  b.value = t.a;
  b.std_error = t.se;
  b.accepted = true;
  return b;
}

CriterionEval bias_integral_derivs(const DualCriterion& dc, const ParamVec& theta, int order) {
  const NodeTerms t = node_terms(dc, theta, order);
  CriterionEval out;
  if (!t.accepted) return out;
  out.accepted = true;
  out.value = t.a;
  out.grad = t.grad;
  out.hess = t.hess;
  return out;
}

double bias_integral(const DualCriterion& dc, const ParamVec& theta) {
  return bias_integral_detail(dc, theta).value;
}

double m_eval(const DualCriterion& dc, const ParamVec& theta, double u1, double u2) {
  const double a = bias_integral(dc, theta);
  if (a == kRejected) throw ParameterError("m_eval: theta outside the enlarged parameter set");
  const double c = density(dc.model(), theta, u1, u2);
  return a - 0.5 / (c * c) + 0.5;
}

Point2 clamp_pseudo(Point2 u, std::size_t n) {
  const double lo = 0.5 / static_cast<double>(n), hi = 1.0 - lo;
  return {std::clamp(u[0], lo, hi), std::clamp(u[1], lo, hi)};
}

CriterionEval empirical_criterion_derivs(const DualCriterion& dc, const PseudoSample& ps,
                                         const ParamVec& theta, int order) {
  CriterionEval out;
  const NodeTerms t = node_terms(dc, theta, order);
  if (!t.accepted) return out;
  const CopulaModel& m = dc.model();
  const int p = m.dim();
  CriterionEval acc;
  acc.value = 0.0;
  const double wt = 1.0 / static_cast<double>(ps.n);
  for (const auto& pt : ps.pseudo_u) {
    const Point2 q = clamp_pseudo(pt, ps.n);
    if (!add_point(acc, density_derivs(m, theta, q[0], q[1], order), wt, p, order)) return out;
  }
  out.accepted = true;
  out.value = t.a + acc.value;
  for (int i = 0; i < p; ++i) out.grad[i] = t.grad[i] + acc.grad[i];
  for (int i = 0; i < p * p; ++i) out.hess[i] = t.hess[i] + acc.hess[i];
  return out;
}

double empirical_criterion(const DualCriterion& dc, const PseudoSample& ps, const ParamVec& theta) {
  return empirical_criterion_derivs(dc, ps, theta, 0).value;
}

CriterionEval population_criterion_derivs(const DualCriterion& dc, const ParamVec& theta_true,
                                          const ParamVec& theta, int order) {
  CriterionEval out;
  const NodeTerms t = node_terms(dc, theta, order);
  if (!t.accepted) return out;
  const CopulaModel& m = dc.model();
  const int p = m.dim();
  const auto &u = dc.node_u(), &v = dc.node_v(), &w = dc.node_w();
  // ∫ m dC_T with the constant ½ integrated exactly against the probability measure.
  CriterionEval acc;
  acc.value = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double ct = density(m, theta_true, u[k], v[k]);
    DensityDerivs d = density_derivs(m, theta, u[k], v[k], order);
    if (!add_point(acc, d, w[k] * ct, p, order)) return out;
    acc.value -= 0.5 * w[k] * ct;
  }
  out.accepted = true;
  out.value = t.a + 0.5 + acc.value;
  for (int i = 0; i < p; ++i) out.grad[i] = t.grad[i] + acc.grad[i];
  for (int i = 0; i < p * p; ++i) out.hess[i] = t.hess[i] + acc.hess[i];
  return out;
}

double population_criterion(const DualCriterion& dc, const ParamVec& theta_true,
                            const ParamVec& theta) {
  return population_criterion_derivs(dc, theta_true, theta, 0).value;
}

double chi2_divergence(const DualCriterion& dc, const ParamVec& theta) {
  const double a = bias_integral(dc, theta);
  return a == kRejected ? kRejected : 0.5 * a;
}

double chi2_divergence_direct(const DualCriterion& dc, const ParamVec& theta) {
  if (!dc.accepts(theta)) return kRejected;
  const auto &u = dc.node_u(), &v = dc.node_v(), &w = dc.node_w();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double c = density(dc.model(), theta, u[k], v[k]);
    const double r = 1.0 / c - 1.0;
    s += w[k] * r * r * c;
  }
  return 0.5 * s;
}

EstimationResult estimate(const DualCriterion& dc, const PseudoSample& ps,
                          const EstimateOptions& opts) {
  const Objective obj = [&](const std::vector<double>& x, int order) {
    return to_objective(empirical_criterion_derivs(dc, ps, x, order));
  };
  return run_estimate(dc, obj, opts);
}

EstimationResult estimate_population(const DualCriterion& dc, const ParamVec& theta_true,
                                     const EstimateOptions& opts) {
  const Objective obj = [&](const std::vector<double>& x, int order) {
    return to_objective(population_criterion_derivs(dc, theta_true, x, order));
  };
  return run_estimate(dc, obj, opts);
}

double statistic_Tn(const EstimationResult& est, std::size_t n) {
  return 2.0 * static_cast<double>(n) * std::max(est.criterion_value, 0.0);
}

double statistic_Tn(const DualCriterion& dc, const PseudoSample& ps, const EstimateOptions& opts) {
  return statistic_Tn(estimate(dc, ps, opts), ps.n);
}

}  // namespace dualcop
