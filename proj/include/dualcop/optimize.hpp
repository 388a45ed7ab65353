#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace dualcop {

/// Value and derivatives of an objective at one point (p ≤ 2, Hessian row-major).
struct ObjectiveEval {
  bool ok = false;  // false: point rejected (outside the feasible set)
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 4> hess{};
};

/// `order` 0 requests the value only, 2 the value with gradient and Hessian.
using Objective = std::function<ObjectiveEval(const std::vector<double>& x, int order)>;

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct MaximizeOptions {
  double grad_tol = 1e-8;
  int max_iter = 100;
  int max_halvings = 50;
  double golden_tol = 1e-10;
};

struct MaximizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::string method;  // "newton" or "golden"
};

/// Maximizes `f` over a box from `x0` (which must be feasible) by projected
/// damped Newton with step halving. Coordinates pinned at a bound by an
/// outward gradient are frozen. Falls back to a gradient step when the
/// Hessian on the free set is not negative definite. Convergence requires a
/// small projected gradient and negative curvature on the free coordinates.
/// For p = 1 a bracketing golden-section search takes over when Newton fails.
MaximizeResult maximize(const Objective& f, const std::vector<double>& x0, const Box& box,
                        const MaximizeOptions& opts = {});

}  // namespace dualcop
