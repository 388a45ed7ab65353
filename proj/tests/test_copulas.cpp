#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dualcop/copulas.hpp"
#include "dualcop/quadrature.hpp"
#include "dualcop/special.hpp"
#include "test_util.hpp"

using namespace dualcop;

namespace {

struct Case {
  const char* id;
  ParamVec theta;
};

// Parameters inside Θ, away from θ₀, per family.
std::vector<Case> admissible_cases() {
  return {
      {"gumbel", {1.5}},       {"gumbel", {3.0}},        {"joe", {1.8}},
      {"galambos", {0.7}},     {"husler-reiss", {1.2}},  {"gumbel-barnett", {0.3}},
      {"gumbel-barnett", {0.8}}, {"clayton", {0.5}},     {"clayton", {2.0}},
      {"bb1-like7", {0.5, 1.5}}, {"bb-like8", {1.3, 0.6}}, {"fgm", {-0.7}},
      {"fgm", {0.5}},
  };
}

// Independent Clayton CDF for the mixed-partial oracle.
double clayton_cdf_oracle(double t, double u, double v) {
  return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t);
}

double quad_integral(const TensorRule& q, double a, double b,
                     const std::function<double(double, double)>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q.w[k] * f(a * q.u[k], b * q.v[k]);
  return a * b * s;
}

}  // namespace

TEST_CASE("density examples") {
  CHECK(density(CopulaModel::from_id("fgm"), {0.5}, 0.25, 0.25) == doctest::Approx(1.125).epsilon(1e-15));
  CHECK(density(CopulaModel::from_id("gumbel"), {1.0}, 0.3, 0.7) == 1.0);

  const double h = 1e-4;
  auto C = [](double u, double v) { return clayton_cdf_oracle(2.0, u, v); };
  const double oracle =
      (C(0.5 + h, 0.5 + h) - C(0.5 + h, 0.5 - h) - C(0.5 - h, 0.5 + h) + C(0.5 - h, 0.5 - h)) /
      (4 * h * h);
  const double c = density(CopulaModel::from_id("clayton"), {2.0}, 0.5, 0.5);
  CHECK(c == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(c == doctest::Approx(1.4810).epsilon(1e-4));
}

TEST_CASE("density equals one at the independence point") {
  for (auto id : CopulaModel::ids()) {
    const CopulaModel m = CopulaModel::from_id(id);
    for (double u : {0.01, 0.3, 0.77})
      for (double v : {0.02, 0.5, 0.99}) CHECK(density(m, m.theta0(), u, v) == 1.0);
  }
}

TEST_CASE("density is continuous through the independence point") {
  for (auto id : CopulaModel::ids()) {
    CAPTURE(std::string(id));
    const CopulaModel m = CopulaModel::from_id(id);
    for (int k = 0; k < m.dim(); ++k) {
      ParamVec t = m.theta0();
      t[k] += 1e-7;
      CHECK(density(m, t, 0.2, 0.7) == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("cdf examples") {
  for (auto id : CopulaModel::ids()) {
    const CopulaModel m = CopulaModel::from_id(id);
    CHECK(cdf(m, m.theta0(), 0.4, 0.5) == doctest::Approx(0.2).epsilon(1e-14));
  }
  CHECK(cdf(CopulaModel::from_id("fgm"), {1.0}, 0.5, 0.5) == doctest::Approx(0.3125).epsilon(1e-15));
  const double oracle = std::exp(-std::sqrt(2.0) * std::log(2.0));
  CHECK(oracle == doctest::Approx(0.375214).epsilon(1e-6));
  CHECK(cdf(CopulaModel::from_id("gumbel"), {2.0}, 0.5, 0.5) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("theta derivatives") {
  const CopulaModel fgm = CopulaModel::from_id("fgm");
  CHECK(dtheta_density(fgm, {0.5}, 0.25, 0.25, 1)[0] == doctest::Approx(0.25));
  for (double t : {-3.0, 0.0, 0.4})
    CHECK(dtheta_density(fgm, {t}, 0.1, 0.6, 2)[0] == 0.0);

  const CopulaModel cl = CopulaModel::from_id("clayton");
  const double h = 1e-6;
  const double fd = (density(cl, {2.0 + h}, 0.5, 0.5) - density(cl, {2.0 - h}, 0.5, 0.5)) / (2 * h);
  CHECK(dtheta_density(cl, {2.0}, 0.5, 0.5, 1)[0] == doctest::Approx(fd).epsilon(1e-6));

  // Clayton score at θ₀ is (1 + log u)(1 + log v).
  for (double u : {0.05, 0.4, 0.9})
    for (double v : {0.1, 0.6}) {
      const double want = (1 + std::log(u)) * (1 + std::log(v));
      CHECK(dtheta_density(cl, {0.0}, u, v, 1)[0] == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("Clayton series and direct branches agree") {
  const CopulaModel cl = CopulaModel::from_id("clayton");
  for (double u : {0.01, 0.3, 0.8})
    for (double v : {0.02, 0.6}) {
      const double dt = 2e-6;
      const auto lo = density_derivs(cl, {1e-3 - dt / 2}, u, v, 2);
      const auto hi = density_derivs(cl, {1e-3 + dt / 2}, u, v, 2);
      CHECK(hi.value == doctest::Approx(lo.value + dt * 0.5 * (lo.grad[0] + hi.grad[0])).epsilon(1e-11));
      CHECK(hi.grad[0] == doctest::Approx(lo.grad[0] + dt * 0.5 * (lo.hess[0] + hi.hess[0])).epsilon(1e-9));
      CHECK(lo.hess[0] == doctest::Approx(hi.hess[0]).epsilon(1e-4));
    }
}

TEST_CASE("analytic derivatives match finite differences") {
  for (const char* id : {"fgm", "clayton"}) {
    const CopulaModel m = CopulaModel::from_id(id);
    for (double t : {-0.5, 0.3, 1.7}) {
      CAPTURE(std::string(id));
      CAPTURE(t);
      const double u = 0.23, v = 0.61, h = 1e-5;
      const auto d = density_derivs(m, {t}, u, v, 2);
      const auto dp = density_derivs(m, {t + h}, u, v, 1);
      const auto dm = density_derivs(m, {t - h}, u, v, 1);
      CHECK(d.hess[0] == doctest::Approx((dp.grad[0] - dm.grad[0]) / (2 * h)).epsilon(1e-5));
      for (int i = 0; i < 2; ++i) {
        const double k = 1e-6;
        const double fdu = i == 0 ? (density(m, {t}, u + k, v) - density(m, {t}, u - k, v)) / (2 * k)
                                  : (density(m, {t}, u, v + k) - density(m, {t}, u, v - k)) / (2 * k);
        CHECK(density_du(m, {t}, u, v, i) == doctest::Approx(fdu).epsilon(1e-6));
        const double fdtu =
            (density_du(m, {t + h}, u, v, i) - density_du(m, {t - h}, u, v, i)) / (2 * h);
        CHECK(density_dtheta_du(m, {t}, u, v, i)[0] == doctest::Approx(fdtu).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("finite-difference derivatives are consistent across families") {
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    const double u = 0.35, v = 0.72;
    const auto d = density_derivs(m, c.theta, u, v, 2);
    for (int k = 0; k < m.dim(); ++k) {
      const double h = 1e-3;
      ParamVec tp = c.theta, tm = c.theta;
      tp[k] += h;
      tm[k] -= h;
      const double fd = (density(m, tp, u, v) - density(m, tm, u, v)) / (2 * h);
      CHECK(d.grad[k] == doctest::Approx(fd).epsilon(1e-5));
      const double fd2 = (density_derivs(m, tp, u, v, 1).grad[k] -
                          density_derivs(m, tm, u, v, 1).grad[k]) / (2 * h);
      CHECK(d.hess[k * m.dim() + k] == doctest::Approx(fd2).epsilon(1e-4).scale(1.0));
      for (int i = 0; i < 2; ++i) {
        const double fdtu = (density_du(m, tp, u, v, i) - density_du(m, tm, u, v, i)) / (2 * h);
        CHECK(density_dtheta_du(m, c.theta, u, v, i)[k] ==
              doctest::Approx(fdtu).epsilon(1e-4).scale(1.0));
      }
    }
  }
}

TEST_CASE("one-sided stencils at the independence point") {
  for (const char* id : {"galambos", "husler-reiss", "bb1-like7", "bb-like8"}) {
    CAPTURE(std::string(id));
    const CopulaModel m = CopulaModel::from_id(id);
    const auto d = density_derivs(m, m.theta0(), 0.3, 0.6, 2);
    CHECK(std::isfinite(d.grad[0]));
    CHECK(std::isfinite(d.hess[0]));
  }
}

TEST_CASE("uniform margins") {
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    double worst = 0.0;
    for (int i = 1; i <= 99; ++i) {
      const double u = i / 100.0;
      worst = std::max(worst, std::abs(cdf(m, c.theta, u, 1.0) - u));
      worst = std::max(worst, std::abs(cdf(m, c.theta, 1.0, u) - u));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("density integrates to the cdf") {
  const TensorRule q = tensor_rule(64, Grading::smooth);
  const std::vector<Case> cases = {{"gumbel", {1.5}}, {"gumbel-barnett", {0.3}},
                                   {"gumbel-barnett", {0.8}}, {"clayton", {0.5}},
                                   {"fgm", {0.5}}, {"fgm", {-1.0}}};
  for (const auto& c : cases) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    for (auto [a, b] : {std::pair{0.3, 0.6}, {0.8, 0.5}, {1.0, 1.0}}) {
      const double s = quad_integral(q, a, b, [&](double u, double v) { return density(m, c.theta, u, v); });
      CHECK(s == doctest::Approx(cdf(m, c.theta, a, b)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("unit mass over the square") {
  const TensorRule q = tensor_rule(128, Grading::smooth);
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    const double s = quad_integral(q, 1, 1, [&](double u, double v) { return density(m, c.theta, u, v); });
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("plain Gauss-Legendre mass error decays quadratically at a singular corner") {
  const CopulaModel m = CopulaModel::from_id("gumbel");
  auto err = [&](int order) {
    const TensorRule q = tensor_rule(order);
    return quad_integral(q, 1, 1, [&](double u, double v) { return density(m, {1.5}, u, v); }) - 1.0;
  };
  const double e64 = err(64), e128 = err(128);
  CHECK(e64 > 0.0);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("densities are nonnegative on the admissible set") {
  const TensorRule q = tensor_rule(32);
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    double lo = 1.0;
    for (std::size_t k = 0; k < q.size(); ++k) lo = std::min(lo, density(m, c.theta, q.u[k], q.v[k]));
    CHECK(lo >= 0.0);
  }
}

TEST_CASE("Gumbel below one is a signed density") {
  const CopulaModel m = CopulaModel::from_id("gumbel");
  const TensorRule q = tensor_rule(64);
  double lo = 1.0;
  for (std::size_t k = 0; k < q.size(); ++k) lo = std::min(lo, density(m, {0.8}, q.u[k], q.v[k]));
  CHECK(lo < 0.0);
}

TEST_CASE("argument validation") {
  const CopulaModel g = CopulaModel::from_id("gumbel");
  CHECK_THROWS_AS(density(g, {0.4}, 0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(density(g, {2.0}, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(density(g, {2.0}, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(density(g, {2.0, 1.0}, 0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(cdf(g, {0.9}, 0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(sample(g, {0.9}, 10, 1), ParameterError);
  CHECK_THROWS_AS(CopulaModel::from_id("normal"), ParameterError);
  const CopulaModel f = CopulaModel::from_id("fgm");
  CHECK(density(f, {4.0}, 0.0, 1.0) == doctest::Approx(-3.0));
  CHECK_THROWS_AS(density(f, {5.0}, 0.5, 0.5), ParameterError);
}

TEST_CASE("sampler reproduces Kendall's tau") {
  const std::size_t n = 100000;
  CHECK(std::abs(testutil::kendall_tau(sample(CopulaModel::from_id("clayton"), {0.0}, n, 11))) <= 0.01);
  CHECK(testutil::kendall_tau(sample(CopulaModel::from_id("clayton"), {2.0}, n, 12)) ==
        doctest::Approx(2.0 / 4.0).epsilon(0.02));
  CHECK(std::abs(testutil::kendall_tau(sample(CopulaModel::from_id("fgm"), {0.5}, n, 13)) - 1.0 / 9.0) <= 0.01);
  CHECK(std::abs(testutil::kendall_tau(sample(CopulaModel::from_id("gumbel"), {2.0}, n, 14)) - 0.5) <= 0.01);
}

TEST_CASE("sampler tau matches the quadrature tau of every family") {
  // τ = 4 ∫ C dC − 1, evaluated on a fine rule as the oracle.
  const TensorRule q = tensor_rule(96);
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k)
      s += q.w[k] * cdf(m, c.theta, q.u[k], q.v[k]) * density(m, c.theta, q.u[k], q.v[k]);
    const double tau_q = 4 * s - 1;
    const double tau_s = testutil::kendall_tau(sample(m, c.theta, 50000, 99));
    CHECK(std::abs(tau_s - tau_q) <= 0.015);
  }
}

TEST_CASE("sampler margins are uniform") {
  for (const auto& c : admissible_cases()) {
    CAPTURE(std::string(c.id));
    const CopulaModel m = CopulaModel::from_id(c.id);
    const auto xs = sample(m, c.theta, 10000, 7);
    for (int i = 0; i < 2; ++i) {
      std::vector<double> col;
      for (const auto& p : xs) col.push_back(p[i]);
      const double d = ks_distance(col, [](double t) { return t; });
      CHECK(ks_pvalue(d, col.size()) > 0.01);
    }
  }
}

TEST_CASE("sampler is deterministic") {
  const CopulaModel m = CopulaModel::from_id("joe");
  CHECK(sample(m, {2.0}, 50, 5) == sample(m, {2.0}, 50, 5));
  CHECK(sample(m, {2.0}, 50, 5) != sample(m, {2.0}, 50, 6));
  for (const auto& p : sample(m, {2.0}, 1000, 5)) {
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[1] > 0.0);
    CHECK(p[1] < 1.0);
  }
}
