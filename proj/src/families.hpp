#pragma once

// Closed forms per family. No argument validation happens here; callers in
// copulas.cpp check the parameter box and the evaluation point first.

#include "dualcop/copulas.hpp"

namespace dualcop::detail {

double density_raw(Family f, const double* th, double u, double v);
double cdf_raw(Family f, const double* th, double u, double v);
/// ∂C/∂u.
double hfunc_raw(Family f, const double* th, double u, double v);

/// Lowest value at which coordinate `k` of θ may be fed to a finite-difference
/// stencil (one-sided differences are used below it).
double fd_floor(Family f, int k);

// Analytic θ- and u-derivatives, available for FGM and Clayton only.
bool has_analytic_derivs(Family f);
DensityDerivs analytic_derivs(Family f, double th, double u, double v, int order);
double analytic_du(Family f, double th, double u, double v, int margin);
double analytic_dtheta_du(Family f, double th, double u, double v, int margin);

/// Inverse of p ↦ ∂C/∂u at fixed u, closed form for FGM and Clayton.
bool has_closed_inverse(Family f);
double hinv_closed(Family f, double th, double u, double p);

}  // namespace dualcop::detail
