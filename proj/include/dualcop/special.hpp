#pragma once

#include <functional>
#include <vector>

namespace dualcop {

double normal_cdf(double x);
double normal_quantile(double p);

/// χ²_k distribution function, survival function and quantile.
double chi2_cdf(double x, double dof);
double chi2_sf(double x, double dof);
double chi2_quantile(double p, double dof);

/// sup_t |F_n(t) − F(t)| for the sample `values` (any order) against `cdf`.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf);

/// Asymptotic one-sample Kolmogorov-Smirnov p-value with Stephens' small-sample
/// correction.
double ks_pvalue(double d, std::size_t n);

}  // namespace dualcop
