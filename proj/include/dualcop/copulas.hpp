#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualcop {

/// Parameter vector of a copula family (dimension 1 or 2).
using ParamVec = std::vector<double>;

/// A point of the unit square.
using Point2 = std::array<double, 2>;

/// Raised when a parameter lies outside the region where an operation is defined.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an evaluation point lies where the family is undefined or unbounded.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Family {
  gumbel,
  joe,
  galambos,
  husler_reiss,
  gumbel_barnett,
  clayton,
  bb1,  // two-parameter Archimedean, independence at (0, 1)
  bb3,  // two-parameter Archimedean, independence at (1, 0)
  fgm,
};

struct Interval {
  double lo;
  double hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
};

/// A parametric bivariate copula family together with its parameter sets.
///
/// `admissible()` is the set Θ on which C_θ is a genuine copula.
/// `extended()` is the open box that bounds every search for the dual
/// estimator; densities may be evaluated (and may be signed) anywhere in it.
class CopulaModel {
 public:
  explicit CopulaModel(Family family);

  /// Looks a family up by its CLI id ("gumbel", "clayton", "fgm", ...).
  static CopulaModel from_id(std::string_view id);
  static const std::vector<std::string_view>& ids();

  Family family() const { return family_; }
  std::string_view id() const;
  int dim() const { return static_cast<int>(theta0_.size()); }
  const ParamVec& theta0() const { return theta0_; }
  const std::vector<Interval>& admissible() const { return admissible_; }
  const std::vector<Interval>& extended() const { return extended_; }

  bool in_admissible(const ParamVec& theta) const;
  bool in_extended(const ParamVec& theta) const;

  /// True for families whose density blows up at the edges of the unit square.
  bool density_unbounded_at_edges() const;

 private:
  Family family_;
  ParamVec theta0_;
  std::vector<Interval> admissible_;
  std::vector<Interval> extended_;
};

/// Closed-form copula density c_θ(u1, u2) = ∂²C_θ/∂u1∂u2.
///
/// Defined on the whole extended box, where it may be negative. Throws
/// ParameterError outside the extended box and DomainError for points on the
/// edge of the square when the family's density is unbounded there.
double density(const CopulaModel& model, const ParamVec& theta, double u1, double u2);

/// C_θ(u1, u2) on [0,1]²; θ must be admissible.
double cdf(const CopulaModel& model, const ParamVec& theta, double u1, double u2);

/// ∂C_θ/∂u1, the conditional distribution of U2 given U1 = u1.
double conditional_cdf(const CopulaModel& model, const ParamVec& theta, double u1, double u2);

/// θ-derivatives of the density: the gradient (order 1, length p) or the
/// Hessian (order 2, p×p row-major). Analytic for FGM and Clayton, central
/// differences with step 1e-5·max(1,|θ|) elsewhere.
std::vector<double> dtheta_density(const CopulaModel& model, const ParamVec& theta, double u1,
                                   double u2, int order);

/// Density with its θ-gradient and θ-Hessian in one call (p ≤ 2).
struct DensityDerivs {
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 4> hess{};  // row-major p×p
};

/// `order` 0, 1 or 2 selects how many θ-derivatives are filled.
DensityDerivs density_derivs(const CopulaModel& model, const ParamVec& theta, double u1,
                             double u2, int order);

/// ∂c/∂u_i (margin = 0 or 1).
double density_du(const CopulaModel& model, const ParamVec& theta, double u1, double u2,
                  int margin);

/// ∂²c/∂θ∂u_i, length p.
std::array<double, 2> density_dtheta_du(const CopulaModel& model, const ParamVec& theta,
                                        double u1, double u2, int margin);

/// n i.i.d. draws from C_θ by conditional inversion; same seed, same output.
std::vector<Point2> sample(const CopulaModel& model, const ParamVec& theta, std::size_t n,
                           std::uint64_t seed);

}  // namespace dualcop
