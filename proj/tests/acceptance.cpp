// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance <path to dualcop CLI> [scratch directory]
#include <boost/math/tools/minima.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "dualcop/copulas.hpp"
#include "dualcop/dual.hpp"
#include "dualcop/empirical.hpp"
#include "dualcop/inference.hpp"
#include "dualcop/random.hpp"
#include "dualcop/simharness.hpp"

using namespace dualcop;

namespace {

constexpr std::uint64_t kSeed = 20240601;

int failures = 0;

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %2d %-4s %s: %s (%.1f s)\n", id, ok ? "PASS" : "FAIL", name, detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

SimConfig config(const char* family, std::size_t n, std::size_t reps) {
  SimConfig c;
  c.family = family;
  c.n = n;
  c.replications = reps;
  c.seed = kSeed;
  return c;
}

void null_calibration() {
  Timer t;
  const auto s100 = simulate_null(config("fgm", 100, 500));
  const auto s25 = simulate_null(config("fgm", 25, 500));
  const double secs = t.seconds();
  const bool ok = s100.ks_distance <= 0.10 && s25.ks_distance <= 0.15 &&
                  s100.ks_distance <= s25.ks_distance + 0.02 && secs <= 300.0 &&
                  s100.failures.empty() && s25.failures.empty();
  report(1, "null calibration", ok,
         fmt("FGM 500 reps: ks(n=100)=%.4f (<= 0.10), ks(n=25)=%.4f (<= 0.15), "
             "ordering %s, failures %zu/%zu",
             s100.ks_distance, s25.ks_distance,
             s100.ks_distance <= s25.ks_distance + 0.02 ? "holds" : "violated",
             s100.failures.size(), s25.failures.size()),
         secs);
}

void size() {
  Timer t;
  std::string detail;
  bool ok = true;
  for (const char* fam : {"fgm", "clayton"}) {
    const auto s = simulate_null(config(fam, 100, 500));
    const double rate = s.rejection_rates.at(0).rate;
    const bool pass = rate >= 0.03 && rate <= 0.08 && s.failures.empty();
    ok = ok && pass;
    std::size_t zeros = 0;
    for (double v : s.statistics) zeros += v == 0.0;
    detail += fmt("%s%s rate=%.3f over %zu converged runs (%zu failed, %zu with T_n=0)",
                  detail.empty() ? "" : "; ", fam, rate, s.statistics.size(), s.failures.size(), zeros);
  }
  report(2, "size at alpha=0.05, n=100", ok, detail + "; band [0.03, 0.08]", t.seconds());
}

void estimator_clt() {
  Timer t;
  SimConfig c = config("fgm", 2000, 500);
  c.theta = {0.0};
  const auto s = simulate_estimator(c);
  bool ok = s.estimator.has_value() && s.failures.empty();
  std::string detail = fmt("failures %zu", s.failures.size());
  if (s.estimator) {
    const auto& e = *s.estimator;
    ok = ok && e.sd_root_n[0] >= 2.7 && e.sd_root_n[0] <= 3.3 && e.studentized_ks_pvalue >= 0.01;
    detail = fmt("sd(sqrt(n) theta_hat)=%.4f in [2.7, 3.3], studentized KS=%.4f p=%.3f (>= 0.01), %s",
                 e.sd_root_n[0], e.studentized_ks, e.studentized_ks_pvalue, detail.c_str());
  }
  report(3, "estimator CLT", ok, detail, t.seconds());
}

void dual_attainment() {
  Timer t;
  const DualCriterion dc(CopulaModel::from_id("fgm"));
  bool ok = true;
  std::string detail;
  for (double th : {0.2, 0.5, 0.8}) {
    double series = 0.0;
    for (int k = 1; k < 400; ++k) series += std::pow(th, 2 * k) / ((2.0 * k + 1) * (2.0 * k + 1));
    const auto neg = [&](double x) { return -population_criterion(dc, {th}, {x}); };
    const auto [arg, val] = boost::math::tools::brent_find_minima(neg, -1.0, 1.0, 40);
    const double max_err = std::abs(-val - series / 2);
    const double arg_err = std::abs(arg - th);
    ok = ok && max_err <= 1e-5 && arg_err <= 1e-3;
    detail += fmt("%stheta=%.1f |max-A/2|=%.1e |argmax-theta|=%.1e", detail.empty() ? "" : "; ", th,
                  max_err, arg_err);
  }
  report(4, "dual attainment", ok, detail, t.seconds());
}

void divergence_identity() {
  Timer t;
  struct Case {
    const char* family;
    std::vector<ParamVec> thetas;
  };
  const std::vector<Case> cases = {
      {"gumbel", {{1.2}, {1.5}}},          {"joe", {{1.2}, {1.5}}},
      {"galambos", {{0.3}, {0.6}}},        {"husler-reiss", {{0.3}, {0.8}}},
      {"gumbel-barnett", {{0.9}, {0.95}}}, {"clayton", {{0.3}, {0.7}}},
      {"bb1-like7", {{0.3, 1.2}, {0.5, 1.1}}}, {"bb-like8", {{1.1, 0.1}, {1.2, 0.2}}},
      {"fgm", {{-0.5}, {0.8}}}};
  CriterionOptions graded;
  graded.grading = Grading::smooth;
  double worst = 0.0, worst_plain = 0.0;
  std::size_t checked = 0;
  std::string skipped;
  bool ok = true;
  for (const auto& c : cases) {
    const CopulaModel m = CopulaModel::from_id(c.family);
    const DualCriterion dc(m, graded), plain(m);
    std::size_t here = 0;
    for (const auto& th : c.thetas) {
      const double a = chi2_divergence(dc, th);
      if (a == kRejected) continue;
      worst = std::max(worst, std::abs(chi2_divergence_direct(dc, th) - a));
      const double ap = chi2_divergence(plain, th);
      if (ap != kRejected)
        worst_plain = std::max(worst_plain, std::abs(chi2_divergence_direct(plain, th) - ap));
      ++here;
    }
    if (here == 0) skipped += std::string(skipped.empty() ? "" : ", ") + c.family;
    checked += here;
  }
  ok = worst <= 1e-6 && checked > 0;
  report(5, "divergence identity", ok,
         fmt("%zu (family, theta) pairs on the graded 64-point rule, max |direct - A/2|=%.2e "
             "(<= 1e-6); plain 64-point rule max %.2e; no finite A(theta) among the candidates for: %s",
             checked, worst, worst_plain, skipped.empty() ? "none" : skipped.c_str()),
         t.seconds());
}

void empirical_bound() {
  Timer t;
  double worst_ratio = 0.0;
  std::size_t grid_mismatch = 0;
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (int d = 0; d < 50; ++d) {
      Rng rng(subseed(kSeed + n, d));
      const CopulaModel m = CopulaModel::from_id("clayton");
      std::vector<Point2> data = d % 2 ? sample(m, {1.5}, n, subseed(kSeed, 1000 * n + d))
                                       : std::vector<Point2>(n);
      if (d % 2 == 0)
        for (auto& p : data) p = {rng.uniform(), rng.uniform()};
      const PseudoSample ps = make_pseudo(data);
      const EmpiricalCopulaTable tab(ps);
      for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 200; ++j) {
          const double u = i / 199.0, v = j / 199.0;
          // Both copulas are multiples of 1/n; compare in counts.
          const double gap = std::round(std::abs(tab.deheuvels(u, v) - tab.cn(u, v)) * n);
          worst_ratio = std::max(worst_ratio, gap / 2.0);
        }
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
          const double u = double(i) / n, v = double(j) / n;
          grid_mismatch += tab.deheuvels(u, v) != tab.cn(u, v) || tab.cn(u, v) != tab.at(i, j);
        }
    }
  }
  report(6, "empirical copula bound", worst_ratio <= 1.0 && grid_mismatch == 0,
         fmt("max n*|Deheuvels - C_n|/2 = %.3f (<= 1) over 150 datasets, %zu lattice mismatches",
             worst_ratio, grid_mismatch),
         t.seconds());
}

void m_vanishing() {
  Timer t;
  std::size_t bad = 0, total = 0;
  Rng rng(kSeed);
  for (auto id : CopulaModel::ids()) {
    const CopulaModel m = CopulaModel::from_id(id);
    const DualCriterion dc(m);
    for (int k = 0; k < 10000; ++k) {
      bad += m_eval(dc, m.theta0(), rng.uniform(), rng.uniform()) != 0.0;
      ++total;
    }
  }
  report(7, "m vanishes at theta0", bad == 0,
         fmt("%zu nonzero values out of %zu points over %zu families", bad, total,
             CopulaModel::ids().size()),
         t.seconds());
}

void power_plan() {
  Timer t;
  const DualCriterion dc(CopulaModel::from_id("fgm"));
  SimConfig c = config("fgm", 500, 500);
  c.theta = {0.5};
  const auto s = simulate_power(c);
  const double emp = s.rejection_rates.at(0).rate;
  const double approx = s.power_approx.value_or(std::nan(""));
  const bool part1 = std::abs(emp - approx) <= 0.05;

  const PowerPlan plan = sample_size(dc, {0.5}, 0.05, 0.9);
  SimConfig c2 = c;
  c2.n = static_cast<std::size_t>(plan.n_star);
  const double emp_star = simulate_power(c2).rejection_rates.at(0).rate;
  const bool part2 = emp_star >= 0.85;
  const bool part3 = std::abs(plan.n0_closed - plan.n0_numeric) <= 1.0 || plan.discrepancy;

  report(8, "power and plan", part1 && part2 && part3,
         fmt("n=500: empirical %.3f vs approx %.3f, gap %.3f (<= 0.05) %s; n*=%zu empirical power "
             "%.3f (>= 0.85) %s; n0 closed %.3f vs numeric %.3f, flag %s",
             emp, approx, std::abs(emp - approx), part1 ? "ok" : "missed", plan.n_star, emp_star,
             part2 ? "ok" : "missed", plan.n0_closed, plan.n0_numeric,
             plan.discrepancy ? "set" : "clear"),
         t.seconds());
}

void gradient_check() {
  Timer t;
  Rng rng(kSeed);
  double worst = 0.0;
  for (const char* id : {"fgm", "clayton"}) {
    const CopulaModel m = CopulaModel::from_id(id);
    const DualCriterion dc(m);
    const bool fgm = m.family() == Family::fgm;
    const auto ps = make_pseudo(sample(m, fgm ? ParamVec{0.4} : ParamVec{1.0}, 200, kSeed));
    for (int i = 0; i < 20; ++i) {
      const double th = fgm ? -0.95 + 1.9 * rng.uniform() : 0.02 + 2.5 * rng.uniform();
      const auto e = empirical_criterion_derivs(dc, ps, {th}, 1);
      const double h = 1e-5;
      const double fd = (empirical_criterion(dc, ps, {th + h}) - empirical_criterion(dc, ps, {th - h})) / (2 * h);
      worst = std::max(worst, std::abs(e.grad[0] - fd) / std::max(std::abs(fd), 1e-4));
    }
  }
  report(9, "gradient check", worst <= 1e-5,
         fmt("max relative gap %.2e over 20 points each for fgm and clayton (<= 1e-5)", worst),
         t.seconds());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(const std::string& cli, const std::filesystem::path& dir) {
  Timer t;
  if (cli.empty()) {
    report(10, "determinism", false, "no CLI path given", t.seconds());
    return;
  }
  std::filesystem::create_directories(dir);
  const std::string base = "\"" + cli +
                           "\" simulate --family clayton --mode power --theta 0.5 --n 100 --reps 100"
                           " --seed 20240601 --alpha 0.01,0.05,0.1";
  bool ran = true;
  for (const auto& [tag, threads] : {std::pair{"a", 1}, {"b", 1}, {"c", 4}}) {
    const auto json = dir / (std::string(tag) + ".json");
    const auto csv = dir / (std::string(tag) + ".csv");
    const std::string cmd = base + " --threads " + std::to_string(threads) + " --out \"" +
                            json.string() + "\" --ecdf \"" + csv.string() + "\"";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  const bool same = ran && !slurp(dir / "a.json").empty() &&
                    slurp(dir / "a.json") == slurp(dir / "b.json") &&
                    slurp(dir / "a.json") == slurp(dir / "c.json") &&
                    slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                    slurp(dir / "a.csv") == slurp(dir / "c.csv");
  report(10, "determinism", same,
         ran ? fmt("two runs with 1 thread and one with 4: JSON and ECDF CSV %s",
                   same ? "byte-identical" : "differ")
             : std::string("CLI invocation failed"),
         t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::filesystem::path dir =
      argc > 2 ? std::filesystem::path(argv[2]) : std::filesystem::current_path() / "acceptance_work";
  null_calibration();
  size();
  estimator_clt();
  dual_attainment();
  divergence_identity();
  empirical_bound();
  m_vanishing();
  power_plan();
  gradient_check();
  determinism(cli, dir);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
