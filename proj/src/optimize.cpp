#include "dualcop/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualcop {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.38196601125010515;  // 2 − φ

using Vec = std::vector<double>;

Vec project(Vec x, const Box& box) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], box.lo[k], box.hi[k]);
  return x;
}

// Gradient with components that point out of the box at an active bound removed.
Vec projected_gradient(const Vec& x, const std::array<double, 2>& g, const Box& box) {
  Vec pg(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const bool at_lo = x[k] <= box.lo[k] && g[k] < 0;
    const bool at_hi = x[k] >= box.hi[k] && g[k] > 0;
    pg[k] = (at_lo || at_hi) ? 0.0 : g[k];
  }
  return pg;
}

double norm(const Vec& v) {
  double s = 0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double value_at(const Objective& f, const Vec& x) {
  const ObjectiveEval e = f(x, 0);
  return e.ok && std::isfinite(e.value) ? e.value : kNegInf;
}

// Ascent direction on the free coordinates: Newton when −H is positive
// definite there, otherwise the projected gradient.
Vec direction(const ObjectiveEval& e, const Vec& pg, std::size_t p) {
  Vec d(p, 0.0);
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < p; ++k)
    if (pg[k] != 0.0) free.push_back(k);
  if (free.empty()) return d;
  if (free.size() == 1) {
    const std::size_t k = free[0];
    const double h = e.hess[k * p + k];
    d[k] = h < 0 ? -pg[k] / h : pg[k];
    return d;
  }
  const double a = e.hess[0], b = e.hess[1], c = e.hess[3];
  const double det = a * c - b * b;
  if (a < 0 && det > 0) {
    d[0] = -(c * pg[0] - b * pg[1]) / det;
    d[1] = -(a * pg[1] - b * pg[0]) / det;
  } else {
    d = pg;
  }
  return d;
}

// Second-order check at a stationary point: every coordinate is either held
// at a bound by a strictly outward gradient or belongs to a free set on which
// the Hessian is negative definite.
// Curvature below −kCurvTol counts as negative; flatter points are treated as
// inconclusive.
constexpr double kCurvTol = 1e-8;

bool certified_max(const Vec& x, const ObjectiveEval& e, const Box& box, double grad_tol) {
  const std::size_t p = x.size();
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < p; ++k) {
    const bool held = (x[k] <= box.lo[k] && e.grad[k] <= -grad_tol) ||
                      (x[k] >= box.hi[k] && e.grad[k] >= grad_tol);
    if (!held) free.push_back(k);
  }
  if (free.empty()) return true;
  if (free.size() == 1) return e.hess[free[0] * p + free[0]] < -kCurvTol;
  return e.hess[0] < -kCurvTol && e.hess[0] * e.hess[3] - e.hess[1] * e.hess[2] > kCurvTol * kCurvTol;
}

struct Golden {
  Vec x;
  double value;
  bool ok;
};

// One-dimensional bracket-and-section search started at `x0`.
Golden golden_search(const Objective& f, double x0, double f0, double slope, const Box& box,
                     double tol) {
  const double lo = box.lo[0], hi = box.hi[0];
  auto F = [&](double t) { return value_at(f, Vec{t}); };
  double best_x = x0, best_f = f0;

  for (double dir : {slope >= 0 ? 1.0 : -1.0, slope >= 0 ? -1.0 : 1.0}) {
    // Find a first step that improves on x0.
    double h = 0.1 * std::max(1.0, std::abs(x0));
    double a = x0, fa = f0, b = x0, fb = f0;
    // Halve after a decrease; double across a flat stretch, where the
    // objective is numerically constant near x0.
    bool found = false, expanding = false;
    for (int i = 0; i < 60; ++i) {
      b = std::clamp(x0 + dir * h, lo, hi);
      if (b == x0) break;
      fb = F(b);
      if (fb > fa) {
        found = true;
        break;
      }
      if (fb == fa && b != lo && b != hi && (expanding || i == 0)) {
        expanding = true;
        h *= 2.0;
      } else if (expanding) {
        break;
      } else {
        h *= 0.5;
      }
    }
    if (!found) continue;
    // Expand until the value drops or the bound is hit.
    double c = b, fc = fb;
    while (true) {
      c = std::clamp(b + 1.618033988749895 * (b - a), lo, hi);
      fc = c == b ? kNegInf : F(c);
      if (fc <= fb) break;
      a = b;
      fa = fb;
      b = c;
      fb = fc;
    }
    if (c == b) {  // increasing up to the bound
      if (fb > best_f) best_x = b, best_f = fb;
      continue;
    }
    // Golden section on [min(a,c), max(a,c)] around b.
    double l = std::min(a, c), r = std::max(a, c);
    double x1 = b, f1 = fb;
    for (int it = 0; it < 200 && r - l > tol * std::max(1.0, std::abs(x1)); ++it) {
      const bool right = (r - x1) > (x1 - l);
      const double t = right ? x1 + kGolden * (r - x1) : x1 - kGolden * (x1 - l);
      const double ft = F(t);
      if (ft > f1) {
        (right ? l : r) = x1;
        x1 = t;
        f1 = ft;
      } else {
        (right ? r : l) = t;
      }
    }
    if (f1 > best_f) best_x = x1, best_f = f1;
  }
  return {Vec{best_x}, best_f, std::isfinite(best_f)};
}

}  // namespace

MaximizeResult maximize(const Objective& f, const std::vector<double>& x0, const Box& box,
                        const MaximizeOptions& opts) {
  const std::size_t p = x0.size();
  if (p < 1 || p > 2 || box.lo.size() != p || box.hi.size() != p)
    throw std::invalid_argument("maximize: dimension must be 1 or 2 and match the box");

  MaximizeResult res;
  res.method = "newton";
  Vec x = project(x0, box);
  ObjectiveEval e = f(x, 2);
  if (!e.ok || !std::isfinite(e.value))
    throw std::invalid_argument("maximize: starting point is not feasible");

  Vec pg = projected_gradient(x, e.grad, box);
  res.gradient_norm = norm(pg);
  while (res.gradient_norm >= opts.grad_tol && res.iterations < opts.max_iter) {
    ++res.iterations;
    const Vec d = direction(e, pg, p);
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      Vec xn(p);
      for (std::size_t k = 0; k < p; ++k) xn[k] = x[k] + t * d[k];
      xn = project(xn, box);
      if (xn == x) break;
      const ObjectiveEval en = f(xn, 2);
      if (en.ok && std::isfinite(en.value) && en.value >= e.value) {
        x = xn;
        e = en;
        moved = true;
        break;
      }
    }
    pg = projected_gradient(x, e.grad, box);
    res.gradient_norm = norm(pg);
    if (!moved) break;
  }
  res.x = x;
  res.value = e.value;
  res.converged = res.gradient_norm < opts.grad_tol && certified_max(x, e, box, opts.grad_tol);

  if (!res.converged && p == 1) {
    const Golden g = golden_search(f, x[0], e.value, e.grad[0], box, opts.golden_tol);
    if (g.ok && g.value >= res.value) {
      const ObjectiveEval eg = f(g.x, 2);
      if (eg.ok) {
        res.method = "golden";
        res.x = g.x;
        res.value = eg.value;
        res.gradient_norm = norm(projected_gradient(g.x, eg.grad, box));
        // The section resolves x to ~1e-10, so a smooth maximum leaves a
        // gradient of order |H|·1e-10. A large one means the bracket closed on
        // the edge of the feasible set rather than on a stationary point.
        res.converged = res.gradient_norm <= 1e-6 * std::max(1.0, std::abs(eg.hess[0])) ||
                        certified_max(g.x, eg, box, opts.grad_tol);
      }
    }
  }
  return res;
}

}  // namespace dualcop
