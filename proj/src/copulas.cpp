#include "dualcop/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualcop/random.hpp"
#include "families.hpp"

namespace dualcop {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyInfo {
  Family family;
  std::string_view id;
  ParamVec theta0;
  std::vector<Interval> admissible;
  std::vector<Interval> extended;
};

Interval closed_from(double lo) { return {lo, kInf, true, false}; }
Interval open(double lo, double hi) { return {lo, hi, false, false}; }

const std::vector<FamilyInfo>& table() {
  static const std::vector<FamilyInfo> t = {
      {Family::gumbel, "gumbel", {1.0}, {closed_from(1.0)}, {open(0.5, 50.0)}},
      {Family::joe, "joe", {1.0}, {closed_from(1.0)}, {open(0.5, 50.0)}},
      {Family::galambos, "galambos", {0.0}, {closed_from(0.0)}, {open(-0.9, 50.0)}},
      {Family::husler_reiss, "husler-reiss", {0.0}, {closed_from(0.0)}, {open(-0.9, 50.0)}},
      {Family::gumbel_barnett, "gumbel-barnett", {1.0}, {{0.0, 1.0}}, {open(-1.0, 2.0)}},
      {Family::clayton, "clayton", {0.0}, {closed_from(0.0)}, {open(-0.9, 50.0)}},
      {Family::bb1,
       "bb1-like7",
       {0.0, 1.0},
       {closed_from(0.0), closed_from(1.0)},
       {open(-0.9, 50.0), open(0.5, 50.0)}},
      {Family::bb3,
       "bb-like8",
       {1.0, 0.0},
       {closed_from(1.0), closed_from(0.0)},
       {open(0.5, 50.0), open(-0.9, 50.0)}},
      {Family::fgm, "fgm", {0.0}, {{-1.0, 1.0}}, {open(-5.0, 5.0)}},
  };
  return t;
}

const FamilyInfo& info(Family f) {
  for (const auto& e : table())
    if (e.family == f) return e;
  throw ParameterError("unknown copula family");
}

std::string describe(const ParamVec& theta) {
  std::string s = "(";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(theta[i]);
  }
  return s + ")";
}

void require_dim(const CopulaModel& m, const ParamVec& theta) {
  if (static_cast<int>(theta.size()) != m.dim())
    throw ParameterError(std::string(m.id()) + ": expected " + std::to_string(m.dim()) +
                         " parameter(s), got " + std::to_string(theta.size()));
}

void require_extended(const CopulaModel& m, const ParamVec& theta) {
  require_dim(m, theta);
  if (!m.in_extended(theta))
    throw ParameterError(std::string(m.id()) + ": theta " + describe(theta) +
                         " outside the extended parameter box");
}

void require_admissible(const CopulaModel& m, const ParamVec& theta) {
  require_dim(m, theta);
  if (!m.in_admissible(theta))
    throw ParameterError(std::string(m.id()) + ": theta " + describe(theta) +
                         " outside the admissible set");
}

void require_interior(const CopulaModel& m, double u1, double u2) {
  const bool inside = u1 > 0 && u1 < 1 && u2 > 0 && u2 < 1;
  if (inside) return;
  const bool closed = u1 >= 0 && u1 <= 1 && u2 >= 0 && u2 <= 1;
  if (closed && !m.density_unbounded_at_edges()) return;
  throw DomainError(std::string(m.id()) + ": density undefined at (" + std::to_string(u1) +
                    ", " + std::to_string(u2) + ")");
}

double raw(const CopulaModel& m, const double* th, double u1, double u2) {
  return detail::density_raw(m.family(), th, u1, u2);
}

double theta_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }
double theta_step2(double t) { return 1e-4 * std::max(1.0, std::abs(t)); }

// A stencil must stay above the family's finite-difference floor and inside
// the extended box.
bool can_step_down(const CopulaModel& m, int k, double t, double reach) {
  const double lo = std::max(detail::fd_floor(m.family(), k), m.extended()[k].lo);
  return t - reach >= lo;
}

// First and second θ-derivatives by finite differences.
DensityDerivs fd_derivs(const CopulaModel& m, const ParamVec& theta, double u1, double u2,
                        int order) {
  DensityDerivs out;
  const int p = m.dim();
  double th[2] = {theta[0], p > 1 ? theta[1] : 0.0};
  const double c0 = raw(m, th, u1, u2);
  out.value = c0;
  if (order < 1) return out;

  auto at = [&](int k, double dk, int l = 0, double dl = 0.0) {
    double t[2] = {th[0], th[1]};
    t[k] += dk;
    if (dl != 0.0) t[l] += dl;
    return raw(m, t, u1, u2);
  };

  bool central[2] = {true, true};
  for (int k = 0; k < p; ++k) {
    const double h = theta_step(th[k]);
    central[k] = can_step_down(m, k, th[k], h);
    if (central[k]) {
      out.grad[k] = (at(k, h) - at(k, -h)) / (2 * h);
    } else {
      out.grad[k] = (-3 * c0 + 4 * at(k, h) - at(k, 2 * h)) / (2 * h);
    }
  }
  if (order < 2) return out;

  for (int k = 0; k < p; ++k) {
    const double h = theta_step2(th[k]);
    double d2;
    if (can_step_down(m, k, th[k], h)) {
      d2 = (at(k, h) - 2 * c0 + at(k, -h)) / (h * h);
    } else {
      d2 = (2 * c0 - 5 * at(k, h) + 4 * at(k, 2 * h) - at(k, 3 * h)) / (h * h);
    }
    out.hess[k * p + k] = d2;
  }
  if (p == 2) {
    const double h0 = theta_step2(th[0]), h1 = theta_step2(th[1]);
    const bool c0ok = can_step_down(m, 0, th[0], h0), c1ok = can_step_down(m, 1, th[1], h1);
    // Central where possible, forward on a floored coordinate.
    const double a0 = c0ok ? -h0 : 0.0, a1 = c1ok ? -h1 : 0.0;
    const double s0 = c0ok ? 2 * h0 : h0, s1 = c1ok ? 2 * h1 : h1;
    const double b0 = a0 + s0, b1 = a1 + s1;
    const double mixed =
        (at(0, b0, 1, b1) - at(0, b0, 1, a1) - at(0, a0, 1, b1) + at(0, a0, 1, a1)) / (s0 * s1);
    out.hess[1] = out.hess[2] = mixed;
  }
  return out;
}

}  // namespace

CopulaModel::CopulaModel(Family family) : family_(family) {
  const FamilyInfo& e = info(family);
  theta0_ = e.theta0;
  admissible_ = e.admissible;
  extended_ = e.extended;
}

CopulaModel CopulaModel::from_id(std::string_view id) {
  for (const auto& e : table())
    if (e.id == id) return CopulaModel(e.family);
  throw ParameterError("unknown copula family '" + std::string(id) + "'");
}

const std::vector<std::string_view>& CopulaModel::ids() {
  static const std::vector<std::string_view> v = [] {
    std::vector<std::string_view> r;
    for (const auto& e : table()) r.push_back(e.id);
    return r;
  }();
  return v;
}

std::string_view CopulaModel::id() const { return info(family_).id; }

bool CopulaModel::in_admissible(const ParamVec& theta) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (!std::isfinite(theta[k]) || !admissible_[k].contains(theta[k])) return false;
  return true;
}

bool CopulaModel::in_extended(const ParamVec& theta) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (!std::isfinite(theta[k]) || !extended_[k].contains(theta[k])) return false;
  return true;
}

bool CopulaModel::density_unbounded_at_edges() const { return family_ != Family::fgm; }

double density(const CopulaModel& model, const ParamVec& theta, double u1, double u2) {
  require_extended(model, theta);
  require_interior(model, u1, u2);
  if (theta == model.theta0()) return 1.0;
  return raw(model, theta.data(), u1, u2);
}

double cdf(const CopulaModel& model, const ParamVec& theta, double u1, double u2) {
  require_admissible(model, theta);
  if (!(u1 >= 0 && u1 <= 1 && u2 >= 0 && u2 <= 1))
    throw DomainError("cdf: point outside the unit square");
  if (theta == model.theta0()) return u1 * u2;
  return std::clamp(detail::cdf_raw(model.family(), theta.data(), u1, u2), 0.0, 1.0);
}

double conditional_cdf(const CopulaModel& model, const ParamVec& theta, double u1, double u2) {
  require_admissible(model, theta);
  if (!(u1 > 0 && u1 < 1 && u2 >= 0 && u2 <= 1))
    throw DomainError("conditional_cdf: point outside the unit square");
  if (theta == model.theta0()) return u2;
  return std::clamp(detail::hfunc_raw(model.family(), theta.data(), u1, u2), 0.0, 1.0);
}

DensityDerivs density_derivs(const CopulaModel& model, const ParamVec& theta, double u1,
                             double u2, int order) {
  require_extended(model, theta);
  require_interior(model, u1, u2);
  if (order < 0 || order > 2) throw std::invalid_argument("density_derivs: order must be 0, 1 or 2");
  DensityDerivs d = detail::has_analytic_derivs(model.family())
                       ? detail::analytic_derivs(model.family(), theta[0], u1, u2, order)
                       : fd_derivs(model, theta, u1, u2, order);
  if (theta == model.theta0()) d.value = 1.0;
  return d;
}

std::vector<double> dtheta_density(const CopulaModel& model, const ParamVec& theta, double u1,
                                   double u2, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("dtheta_density: order must be 1 or 2");
  const DensityDerivs d = density_derivs(model, theta, u1, u2, order);
  const int p = model.dim();
  if (order == 1) return std::vector<double>(d.grad.begin(), d.grad.begin() + p);
  return std::vector<double>(d.hess.begin(), d.hess.begin() + p * p);
}

double density_du(const CopulaModel& model, const ParamVec& theta, double u1, double u2,
                  int margin) {
  require_extended(model, theta);
  require_interior(model, u1, u2);
  if (detail::has_analytic_derivs(model.family()))
    return detail::analytic_du(model.family(), theta[0], u1, u2, margin);
  const double x = margin == 0 ? u1 : u2;
  const double h = 1e-5 * std::min(x, 1 - x);
  const double* th = theta.data();
  if (margin == 0) return (raw(model, th, u1 + h, u2) - raw(model, th, u1 - h, u2)) / (2 * h);
  return (raw(model, th, u1, u2 + h) - raw(model, th, u1, u2 - h)) / (2 * h);
}

std::array<double, 2> density_dtheta_du(const CopulaModel& model, const ParamVec& theta,
                                        double u1, double u2, int margin) {
  require_extended(model, theta);
  require_interior(model, u1, u2);
  std::array<double, 2> out{};
  if (detail::has_analytic_derivs(model.family())) {
    out[0] = detail::analytic_dtheta_du(model.family(), theta[0], u1, u2, margin);
    return out;
  }
  // Cross stencil in (θ_k, u_i); steps larger than for single derivatives
  // to keep cancellation error in check.
  const double x = margin == 0 ? u1 : u2;
  const double k = 1e-4 * std::min(x, 1 - x);
  auto c = [&](const double* t, double du) {
    return margin == 0 ? raw(model, t, u1 + du, u2) : raw(model, t, u1, u2 + du);
  };
  for (int j = 0; j < model.dim(); ++j) {
    double tp[2] = {theta[0], model.dim() > 1 ? theta[1] : 0.0};
    double tm[2] = {tp[0], tp[1]};
    const double h = theta_step2(tp[j]);
    double span;
    if (can_step_down(model, j, tp[j], h)) {
      tp[j] += h;
      tm[j] -= h;
      span = 2 * h;
    } else {
      tp[j] += h;
      span = h;
    }
    out[j] = (c(tp, k) - c(tp, -k) - c(tm, k) + c(tm, -k)) / (2 * k * span);
  }
  return out;
}

std::vector<Point2> sample(const CopulaModel& model, const ParamVec& theta, std::size_t n,
                           std::uint64_t seed) {
  require_admissible(model, theta);
  if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
  Rng rng(seed);
  std::vector<Point2> out(n);
  const bool indep = theta == model.theta0();
  const Family f = model.family();
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - 0x1.0p-53;
  for (auto& pt : out) {
    const double u = rng.uniform();
    const double p = rng.uniform();
    double v;
    if (indep) {
      v = p;
    } else if (detail::has_closed_inverse(f)) {
      v = detail::hinv_closed(f, theta[0], u, p);
    } else {
      double lo = 0.0, hi = 1.0;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (detail::hfunc_raw(f, theta.data(), u, mid) < p) lo = mid;
        else hi = mid;
      }
      v = 0.5 * (lo + hi);
    }
    pt = {u, std::clamp(v, kLo, kHi)};
  }
  return out;
}

}  // namespace dualcop
