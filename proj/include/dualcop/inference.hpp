#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dualcop/copulas.hpp"
#include "dualcop/dual.hpp"
#include "dualcop/empirical.hpp"

namespace dualcop {

/// Denominator used in the normal power approximation: the standard
/// deviation σ_χ² (`sd`) or the variance σ²_χ² (`variance`).
enum class PowerForm { sd, variance };

struct InferenceOptions {
  /// Order of the graded Gauss-Legendre inner integral in W_i and Y_i, and
  /// of the q×q rule used by the single-point terms.
  int w_order = 32;
  /// Gauss-Legendre points per segment of the cumulative margin integrals.
  int segment_points = 4;
  /// Tensor order for population quantities (σ²_χ² under C_θ).
  int population_order = 64;
  PowerForm power_form = PowerForm::sd;
};

/// W_i(θ, x) = ∫ 1{x_i ≤ u_i} ∂²m/∂θ∂u_i · c_θ du, length p. `margin` is 0 or 1.
///
/// Since ∂m/∂u_i · c = −∂(1/c)/∂u_i, Y_i(θ, x) = ∫ [1/c(x_i,·) − 1/c(1,·)], which
/// is infinite when the density vanishes on the edge u_i = 1 (every family
/// with upper tail dependence). There the rules return finite values that
/// grow with the order.
std::vector<double> w_term(const DualCriterion& dc, const ParamVec& theta, Point2 x, int margin,
                           int order = 32);
/// The same quantity written as −∫ 1{x_i ≤ u_i} ∂m/∂θ · ∂m/∂u_i · c_θ du.
std::vector<double> w_term_alt(const DualCriterion& dc, const ParamVec& theta, Point2 x,
                               int margin, int order = 32);
/// Y_i(θ, x) = ∫ 1{x_i ≤ u_i} ∂m/∂u_i · c_θ du.
double y_term(const DualCriterion& dc, const ParamVec& theta, Point2 x, int margin,
              int order = 32);

/// W_i, its second form and Y_i at many thresholds on one margin.
struct MarginTerms {
  std::vector<double> x;
  std::vector<std::array<double, 2>> w;
  std::vector<std::array<double, 2>> w_alt;
  std::vector<double> y;
};

/// Evaluates the margin terms at every threshold in `x` (any order, values in
/// [0,1]) by integrating the margin profile over the segments between sorted
/// thresholds and summing from the right.
MarginTerms margin_terms(const DualCriterion& dc, const ParamVec& theta, int margin,
                         const std::vector<double>& x, const InferenceOptions& opts = {});

/// Plug-in variance estimates; matrices are p×p row-major.
struct VarianceEstimates {
  int p = 1;
  /// Ξ̂: mean of the squared θ-score at the pseudo-observations.
  std::vector<double> xi_hat;
  /// −∂²M_n(θ̂), the curvature form of Ξ.
  std::vector<double> xi_hessian_hat;
  /// Σ̂²: sample covariance of score + W₁ + W₂.
  std::vector<double> sigma2_hat;
  /// σ̂²_χ²: sample variance of m + Y₁ + Y₂.
  double sigma2_chi2_hat = 0.0;
};

/// Throws ParameterError when θ̂ is rejected by the criterion.
VarianceEstimates variance_estimates(const DualCriterion& dc, const PseudoSample& ps,
                                     const ParamVec& theta_hat,
                                     const InferenceOptions& opts = {});

struct TestOptions {
  EstimateOptions estimate;
  InferenceOptions inference;
  bool variances = true;
};

struct TestReport {
  std::string family;
  std::size_t n = 0;
  double t_n = 0.0;
  int dof = 1;
  double alpha = 0.05;
  double critical_value = 0.0;
  double p_value = 1.0;
  /// Empty when the estimate did not converge.
  std::optional<bool> reject;
  ParamVec theta_hat;
  ParamVec theta0;
  EstimationResult estimation;
  std::optional<VarianceEstimates> variances;
  std::vector<std::string> warnings;
};

/// Ranks the data, estimates θ̂, and calibrates T_n against χ²_p.
TestReport independence_test(const DualCriterion& dc, const PseudoSample& ps, double alpha,
                             const TestOptions& opts = {});
TestReport independence_test(const std::vector<Point2>& data, const CopulaModel& model,
                             double alpha, const CriterionOptions& criterion = {},
                             const TestOptions& opts = {});

/// σ²_χ² = Var[m(θ,U) + Y₁(θ,U₁) + Y₂(θ,U₂)] for U ~ C_θ, by quadrature.
double population_sigma2_chi2(const DualCriterion& dc, const ParamVec& theta,
                              const InferenceOptions& opts = {});

/// 1 − Φ(√n/s · (q_{1−α}/(2n) − χ²)) with s = σ or σ² per `form`.
double power_formula(double chi2_div, double sigma2_chi2, double n, double alpha, int dof,
                     PowerForm form);

/// Approximate power of the level-α test at θ_alt from population quantities.
double power_approx(const DualCriterion& dc, const ParamVec& theta_alt, double n, double alpha,
                    const InferenceOptions& opts = {});

struct PowerPlan {
  std::string family;
  ParamVec theta_alt;
  double alpha = 0.05;
  double beta_target = 0.9;
  PowerForm power_form = PowerForm::sd;
  double chi2_div = 0.0;
  double sigma2_chi2 = 0.0;
  double q = 0.0;  // q_{1−α} of χ²_p
  double z = 0.0;  // Φ⁻¹(1−β)
  double a = 0.0;
  double b = 0.0;
  double n0_closed = 0.0;
  double n0_numeric = 0.0;
  double n0 = 0.0;
  /// Set when the closed form and the numeric root differ by more than 1.
  bool discrepancy = false;
  std::size_t n_star = 0;
  double power_at_n_star = 0.0;
};

/// Smallest n whose approximate power reaches beta_target.
PowerPlan sample_size(const DualCriterion& dc, const ParamVec& theta_alt, double alpha,
                      double beta_target, const InferenceOptions& opts = {});

struct PseudoLikelihoodResult {
  ParamVec theta_tilde;
  double loglik = 0.0;
  double s_n = 0.0;
  bool converged = false;
  bool boundary_flag = false;  // θ̃ on the boundary of Θ
  int iterations = 0;
  std::string method;
};

/// θ̃ = argmax over Θ of Σ log c_θ(R/(n+1)), started at θ₀, and
/// S_n = 2[ℓ(θ̃) − ℓ(θ₀)].
PseudoLikelihoodResult pseudo_mle_and_Sn(const CopulaModel& model, const PseudoSample& ps,
                                         const EstimateOptions& opts = {});

}  // namespace dualcop
