#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dualcop/copulas.hpp"
#include "dualcop/empirical.hpp"
#include "dualcop/optimize.hpp"
#include "dualcop/quadrature.hpp"

namespace dualcop {

/// φ(x) = ½(x−1)², the χ² divergence generator.
inline double phi(double x) { return 0.5 * (x - 1.0) * (x - 1.0); }
inline double phi_prime(double x) { return x - 1.0; }
/// Convex conjugate φ*(t) = t²/2 + t.
inline double phi_star(double t) { return 0.5 * t * t + t; }

enum class Engine { quadrature, mc };

/// How membership in the enlarged parameter set Θ_e is decided.
///
/// `admissible`: θ must lie in the admissible set Θ (clipped to the extended
/// box). Outside Θ every implemented density vanishes on a region or changes
/// sign, so ∫|1/c − 1| diverges there and Θ_e ⊂ Θ.
/// `density_floor`: any θ in the extended box.
/// Both also require c_θ > epsilon_c at every integration node.
enum class DomainCheck { admissible, density_floor };

struct CriterionOptions {
  Engine engine = Engine::quadrature;
  int quad_order = 64;
  Grading grading = Grading::none;
  std::size_t mc_points = 100000;
  std::uint64_t mc_seed = 20240601;
  double epsilon_c = 1e-8;
  DomainCheck domain = DomainCheck::admissible;
};

/// Returned by bias_integral for θ outside Θ_e.
inline constexpr double kRejected = std::numeric_limits<double>::infinity();

/// The dual χ² criterion m(θ,u,v) = A(θ) − ½/c_θ(u,v)² + ½ for one family,
/// together with the integration nodes used for A(θ).
class DualCriterion {
 public:
  explicit DualCriterion(CopulaModel model, CriterionOptions opts = {});

  const CopulaModel& model() const { return model_; }
  const CriterionOptions& options() const { return opts_; }

  /// Integration nodes on (0,1)²; weights sum to 1. With the MC engine the
  /// same seeded points serve every θ.
  const std::vector<double>& node_u() const { return u_; }
  const std::vector<double>& node_v() const { return v_; }
  const std::vector<double>& node_w() const { return w_; }

  /// Search box for the estimator (finite, inside the extended box).
  Box search_box() const;

  /// Θ_e membership, including the density floor at every node.
  bool accepts(const ParamVec& theta) const;

 private:
  CopulaModel model_;
  CriterionOptions opts_;
  std::vector<double> u_, v_, w_;
};

/// Value, gradient and Hessian in θ of a criterion (p ≤ 2, row-major).
struct CriterionEval {
  bool accepted = false;
  double value = -std::numeric_limits<double>::infinity();
  std::array<double, 2> grad{};
  std::array<double, 4> hess{};
};

struct BiasIntegral {
  double value = kRejected;
  double std_error = 0.0;  // Monte Carlo standard error; 0 for quadrature
  bool accepted = false;
};

/// A(θ) = ∫(1/c_θ − 1) over the unit square, or kRejected outside Θ_e.
double bias_integral(const DualCriterion& dc, const ParamVec& theta);
BiasIntegral bias_integral_detail(const DualCriterion& dc, const ParamVec& theta);

/// A(θ) with its θ-gradient and θ-Hessian; `accepted` is false outside Θ_e.
CriterionEval bias_integral_derivs(const DualCriterion& dc, const ParamVec& theta, int order);

/// m(θ,u1,u2). Throws ParameterError when θ is rejected.
double m_eval(const DualCriterion& dc, const ParamVec& theta, double u1, double u2);

/// M_n(θ) = ∫ m(θ,·) dC_n. Pseudo-observations are clamped to
/// [1/(2n), 1 − 1/(2n)] before the density is evaluated. Returns −∞ when θ is
/// rejected, so a maximizer backs off.
double empirical_criterion(const DualCriterion& dc, const PseudoSample& ps, const ParamVec& theta);
CriterionEval empirical_criterion_derivs(const DualCriterion& dc, const PseudoSample& ps,
                                         const ParamVec& theta, int order);

/// Clamp used for the density at pseudo-observations.
Point2 clamp_pseudo(Point2 u, std::size_t n);

/// θ ↦ ∫ m(θ,·) dC_{θ_T}, integrated on the criterion's nodes.
double population_criterion(const DualCriterion& dc, const ParamVec& theta_true,
                            const ParamVec& theta);
CriterionEval population_criterion_derivs(const DualCriterion& dc, const ParamVec& theta_true,
                                          const ParamVec& theta, int order);

/// χ²(θ₀,θ) = A(θ)/2.
double chi2_divergence(const DualCriterion& dc, const ParamVec& theta);
/// ½ ∫ (1/c_θ − 1)² c_θ evaluated directly on the nodes.
double chi2_divergence_direct(const DualCriterion& dc, const ParamVec& theta);

struct EstimateOptions {
  MaximizeOptions maximize;
};

struct EstimationResult {
  ParamVec theta_hat;
  double criterion_value = 0.0;  // χ̂²(θ₀,θ_T)
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  bool boundary_flag = false;  // θ̂ outside or on the boundary of Θ
  std::string method;
};

/// θ̂_n = argmax over Θ_e of M_n, started at θ₀.
EstimationResult estimate(const DualCriterion& dc, const PseudoSample& ps,
                          const EstimateOptions& opts = {});

/// Maximizer of the population criterion, started at θ₀.
EstimationResult estimate_population(const DualCriterion& dc, const ParamVec& theta_true,
                                     const EstimateOptions& opts = {});

/// T_n = 2n·max(M_n(θ̂_n), 0).
double statistic_Tn(const DualCriterion& dc, const PseudoSample& ps, const EstimateOptions& opts = {});
double statistic_Tn(const EstimationResult& est, std::size_t n);

}  // namespace dualcop
