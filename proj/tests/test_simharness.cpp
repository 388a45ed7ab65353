#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dualcop/random.hpp"
#include "dualcop/simharness.hpp"
#include "dualcop/special.hpp"

using namespace dualcop;

namespace {

SimConfig config(const char* family, std::size_t n, std::size_t reps, std::uint64_t seed) {
  SimConfig c;
  c.family = family;
  c.n = n;
  c.replications = reps;
  c.seed = seed;
  return c;
}

void check_same(const SimulationSummary& a, const SimulationSummary& b) {
  CHECK(a.statistics == b.statistics);
  CHECK(a.ks_distance == b.ks_distance);
  CHECK(a.ecdf.size() == b.ecdf.size());
  for (std::size_t i = 0; i < std::min(a.ecdf.size(), b.ecdf.size()); ++i) {
    CHECK(a.ecdf[i].t == b.ecdf[i].t);
    CHECK(a.ecdf[i].ecdf == b.ecdf[i].ecdf);
  }
  CHECK(a.failures.size() == b.failures.size());
  REQUIRE(a.rejection_rates.size() == b.rejection_rates.size());
  for (std::size_t i = 0; i < a.rejection_rates.size(); ++i)
    CHECK(a.rejection_rates[i].rate == b.rejection_rates[i].rate);
}

}  // namespace

TEST_CASE("sub-seeds follow the documented hash") {
  CHECK(subseed(1, 0) == mix64(mix64(1) ^ 1));
  CHECK(subseed(1, 0) != subseed(1, 1));
  CHECK(subseed(1, 0) != subseed(2, 0));
}

TEST_CASE("same seed gives the same summary for any thread count") {
  SimConfig c = config("fgm", 60, 40, 11);
  c.alphas = {0.01, 0.05, 0.1};
  const auto a = simulate_null(c);
  const auto b = simulate_null(c);
  c.threads = 4;
  const auto d = simulate_null(c);
  check_same(a, b);
  check_same(a, d);

  SimConfig e = config("fgm", 200, 12, 5);
  e.theta = {0.4};
  const auto e1 = simulate_estimator(e);
  e.threads = 3;
  const auto e4 = simulate_estimator(e);
  check_same(e1, e4);
  REQUIRE(e1.estimator.has_value());
  CHECK(e1.estimator->theta_hat == e4.estimator->theta_hat);
  CHECK(e1.estimator->studentized == e4.estimator->studentized);
}

TEST_CASE("ECDF rows") {
  const auto ref = [](double t) { return chi2_cdf(t, 1); };
  const auto rows = ecdf_rows({0.0, 0.0, 0.5, 1.0, 1.0, 3.0}, ref);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].ecdf == doctest::Approx(2.0 / 6));
  CHECK(rows[1].ecdf == doctest::Approx(3.0 / 6));
  CHECK(rows[2].ecdf == doctest::Approx(5.0 / 6));
  CHECK(rows[3].ecdf == 1.0);
  CHECK(rows[2].reference_cdf == doctest::Approx(chi2_cdf(1.0, 1)));

  const auto s = simulate_null(config("fgm", 50, 80, 3));
  double prev = 0.0, prev_t = -1.0;
  double gap = 0.0;
  for (const auto& r : s.ecdf) {
    CHECK(r.ecdf > prev);
    CHECK(r.t > prev_t);
    prev = r.ecdf;
    prev_t = r.t;
  }
  CHECK(prev == 1.0);
  // Two one-sided gaps at every sorted value.
  const double m = double(s.statistics.size());
  for (std::size_t k = 0; k < s.statistics.size(); ++k) {
    const double f = ref(s.statistics[k]);
    gap = std::max({gap, (k + 1) / m - f, f - k / m});
  }
  CHECK(s.ks_distance == gap);
  CHECK(std::is_sorted(s.statistics.begin(), s.statistics.end()));
}

TEST_CASE("a single replication is a single step") {
  const auto s = simulate_null(config("fgm", 40, 1, 9));
  REQUIRE(s.statistics.size() == 1);
  REQUIRE(s.ecdf.size() == 1);
  CHECK(s.ecdf[0].t == s.statistics[0]);
  CHECK(s.ecdf[0].ecdf == 1.0);
}

TEST_CASE("power mode at θ₀ reproduces the null runs") {
  SimConfig c = config("fgm", 80, 30, 21);
  c.theta = {0.0};
  const auto p = simulate_power(c);
  const auto z = simulate_null(c);
  check_same(p, z);
  CHECK_FALSE(p.power_approx.has_value());
}

TEST_CASE("failed replications are counted, not dropped") {
  // The Gumbel-Barnett criterion rises without bound towards the node floor.
  SimConfig c = config("gumbel-barnett", 500, 6, 0);
  c.theta = {0.8};
  c.criterion.quad_order = 32;
  const auto s = simulate_power(c);
  CHECK(s.statistics.size() + s.failures.size() == s.replications);
  REQUIRE_FALSE(s.failures.empty());
  for (const auto& f : s.failures) {
    CHECK(f.subseed == subseed(c.seed, f.index));
    CHECK_FALSE(f.reason.empty());
  }
}

TEST_CASE("population σ_χ² matches the spread of T_n/(2n)") {
  SimConfig c = config("fgm", 2000, 200, 4);
  c.theta = {0.5};
  const auto s = simulate_power(c);
  REQUIRE(s.statistics.size() == 200);
  std::vector<double> x;
  for (double t : s.statistics) x.push_back(t / (2.0 * c.n));
  double mu = 0.0, v = 0.0;
  for (double t : x) mu += t / x.size();
  for (double t : x) v += (t - mu) * (t - mu) / (x.size() - 1);
  const DualCriterion dc(CopulaModel::from_id("fgm"));
  const double sigma = std::sqrt(population_sigma2_chi2(dc, {0.5}));
  CHECK(std::sqrt(v * c.n) == doctest::Approx(sigma).epsilon(0.15));
  CHECK(mu == doctest::Approx(chi2_divergence(dc, {0.5})).epsilon(0.1));
}

TEST_CASE("estimator under independence") {
  SimConfig c = config("fgm", 1000, 150, 8);
  c.theta = {0.0};
  const auto s = simulate_estimator(c);
  REQUIRE(s.estimator.has_value());
  const auto& e = *s.estimator;
  CHECK(s.failures.empty());
  CHECK(std::abs(e.bias[0]) <= 0.01);
  CHECK(e.sd_root_n[0] == doctest::Approx(3.0).epsilon(0.15));
  CHECK(e.coverage[0] >= 0.88);
  CHECK(e.studentized.size() == e.theta_hat.size());
}

TEST_CASE("power increases with the distance from θ₀") {
  double prev = -1.0;
  for (double th : {0.2, 0.4, 0.6, 0.8}) {
    SimConfig c = config("fgm", 500, 100, 13);
    c.theta = {th};
    const double rate = simulate_power(c).rejection_rates[0].rate;
    CHECK(rate >= prev);
    prev = rate;
  }
}

TEST_CASE("argument validation") {
  SimConfig c = config("fgm", 50, 0, 1);
  CHECK_THROWS_AS(simulate_null(c), std::invalid_argument);
  c.replications = 5;
  c.theta = {1.5};
  CHECK_THROWS_AS(simulate_power(c), ParameterError);
  c.theta = {0.2};
  c.alphas = {1.2};
  CHECK_THROWS_AS(simulate_power(c), std::invalid_argument);
  c.alphas = {0.05};
  c.family = "nope";
  CHECK_THROWS(simulate_power(c));
}
