#include "dualcop/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualcop {

Rule1D gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  const int n = order;
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = mid - half * z;
    r.x[n - 1 - i] = mid + half * z;
    r.w[i] = r.w[n - 1 - i] = half * w;
  }
  return r;
}

Rule1D graded(const Rule1D& rule, Grading grading) {
  if (grading == Grading::none) return rule;
  Rule1D r = rule;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double t = rule.x[i], s = 1.0 - t;
    r.x[i] = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    r.w[i] = rule.w[i] * 30.0 * t * t * s * s;
  }
  return r;
}

TensorRule tensor_rule(int order, Grading grading) {
  const Rule1D g = graded(gauss_legendre(order), grading);
  TensorRule t;
  t.order = order;
  t.u.reserve(order * order);
  t.v.reserve(order * order);
  t.w.reserve(order * order);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) {
      t.u.push_back(g.x[i]);
      t.v.push_back(g.x[j]);
      t.w.push_back(g.w[i] * g.w[j]);
    }
  return t;
}

}  // namespace dualcop
