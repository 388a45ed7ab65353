#pragma once

#include <cstddef>
#include <vector>

namespace dualcop {

/// Gauss-Legendre nodes and weights on an interval.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// `order`-point Gauss-Legendre rule on [a, b]; nodes ascending.
Rule1D gauss_legendre(int order, double a = 0.0, double b = 1.0);

/// Node placement on (0,1). `smooth` maps Gauss-Legendre nodes through
/// u = t³(10 − 15t + 6t²), which clusters them at both ends and restores fast
/// convergence for densities with corner singularities.
enum class Grading { none, smooth };

/// Maps a rule on (0,1) through the grading substitution.
Rule1D graded(const Rule1D& rule, Grading grading);

/// Tensor-product rule on (0,1)², weights summing to 1. Node k sits at
/// (u[k], v[k]) with k = i·order + j for the 1-D nodes i (u) and j (v).
struct TensorRule {
  int order = 0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
};

TensorRule tensor_rule(int order, Grading grading = Grading::none);

}  // namespace dualcop
