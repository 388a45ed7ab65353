#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualcop/copulas.hpp"
#include "dualcop/dual.hpp"
#include "dualcop/inference.hpp"

namespace dualcop {

enum class SimMode { null, power, estimator };

struct SimConfig {
  std::string family;
  /// True parameter; ignored by the null mode, which draws independent uniforms.
  ParamVec theta;
  std::size_t n = 100;
  std::size_t replications = 500;
  std::uint64_t seed = 1;
  std::vector<double> alphas{0.05};
  unsigned threads = 1;
  CriterionOptions criterion;
  EstimateOptions estimate;
  InferenceOptions inference;
};

struct EcdfRow {
  double t = 0.0;
  double ecdf = 0.0;
  double reference_cdf = 0.0;
};

struct ReplicationFailure {
  std::size_t index = 0;
  std::uint64_t subseed = 0;
  std::string reason;
};

struct RejectionRate {
  double alpha = 0.0;
  double rate = 0.0;
};

/// Sampling behaviour of θ̂ and of the Wald interval θ̂ ± z_{0.975}·se.
struct EstimatorSummary {
  ParamVec mean;
  ParamVec bias;
  ParamVec sd;
  /// sd·√n, comparable with the asymptotic Σ/Ξ.
  ParamVec sd_root_n;
  ParamVec coverage;
  /// KS distance and p-value of the studentized first coordinate against N(0,1).
  double studentized_ks = 0.0;
  double studentized_ks_pvalue = 0.0;
  std::vector<double> theta_hat;      // first coordinate per successful replication
  std::vector<double> studentized;    // √n(θ̂ − θ_T)/(Σ̂/Ξ̂), first coordinate
};

struct SimulationSummary {
  SimMode mode = SimMode::null;
  std::string family;
  ParamVec theta_true;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  int dof = 1;
  /// T_n of every successful replication, ascending.
  std::vector<double> statistics;
  /// One row per distinct statistic value; reference is the χ²_p CDF.
  std::vector<EcdfRow> ecdf;
  double ks_distance = 0.0;
  std::vector<RejectionRate> rejection_rates;
  std::vector<ReplicationFailure> failures;
  /// Power mode: the normal approximation at (θ_true, n, alphas[0]).
  std::optional<double> power_approx;
  std::optional<EstimatorSummary> estimator;
  std::vector<std::string> warnings;
};

/// Per-replication seeds are subseed(seed, index); results are collected by
/// index, so the summary does not depend on the thread count.
SimulationSummary simulate(SimMode mode, const SimConfig& config);

SimulationSummary simulate_null(const SimConfig& config);
SimulationSummary simulate_power(const SimConfig& config);
SimulationSummary simulate_estimator(const SimConfig& config);

/// ECDF rows for sorted `values` against `cdf`; ties collapse to one row.
std::vector<EcdfRow> ecdf_rows(const std::vector<double>& sorted,
                               const std::function<double(double)>& cdf);

}  // namespace dualcop
