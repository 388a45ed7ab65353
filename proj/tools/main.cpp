#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualcop/copulas.hpp"
#include "dualcop/dual.hpp"
#include "dualcop/empirical.hpp"
#include "dualcop/inference.hpp"
#include "dualcop/simharness.hpp"
#include "json_io.hpp"

using namespace dualcop;
using dualcop::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string family;
  std::vector<double> theta;
  std::size_t n = 100;
  std::size_t reps = 500;
  std::vector<double> alpha{0.05};
  double beta = 0.9;
  std::uint64_t seed = 1;
  std::string mode = "null";
  std::string in;
  std::string out;
  std::string ecdf;
  unsigned threads = 1;
  CriterionOptions criterion;
  EstimateOptions estimate;
  InferenceOptions inference;
};

const std::map<std::string, Engine> kEngines{{"quadrature", Engine::quadrature}, {"mc", Engine::mc}};
const std::map<std::string, DomainCheck> kDomains{{"admissible", DomainCheck::admissible},
                                                  {"density-floor", DomainCheck::density_floor}};
const std::map<std::string, PowerForm> kForms{{"sd", PowerForm::sd}, {"variance", PowerForm::variance}};
const std::map<std::string, SimMode> kModes{
    {"null", SimMode::null}, {"power", SimMode::power}, {"estimator", SimMode::estimator}};

void add_engine_flags(CLI::App* app, Flags& f) {
  app->add_option("--engine", f.criterion.engine, "Criterion integration engine")
      ->transform(CLI::CheckedTransformer(kEngines, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--quad-order", f.criterion.quad_order, "Gauss-Legendre nodes per axis")
      ->check(CLI::Range(2, 4096))
      ->capture_default_str();
  app->add_option("--mc-points", f.criterion.mc_points, "Monte Carlo nodes for --engine mc")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  app->add_option("--mc-seed", f.criterion.mc_seed, "Seed of the Monte Carlo nodes")
      ->capture_default_str();
  app->add_option("--epsilon-c", f.criterion.epsilon_c, "Density floor at the nodes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--domain", f.criterion.domain, "Extended parameter domain rule")
      ->transform(CLI::CheckedTransformer(kDomains, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--grad-tol", f.estimate.maximize.grad_tol, "Newton gradient tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--max-iter", f.estimate.maximize.max_iter, "Newton iteration cap")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
}

void add_family(CLI::App* app, Flags& f) {
  app->add_option("--family", f.family, "Copula family id")->required();
}

void add_theta(CLI::App* app, Flags& f, bool required) {
  auto* o = app->add_option("--theta", f.theta, "Parameter, comma separated for two-parameter families")
                ->delimiter(',');
  if (required) o->required();
}

void add_out(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "Write JSON here instead of stdout");
}

void add_power_form(CLI::App* app, Flags& f) {
  app->add_option("--power-form", f.inference.power_form, "Scale in the power formula")
      ->transform(CLI::CheckedTransformer(kForms, CLI::ignore_case))
      ->capture_default_str();
}

void check_alpha(double a) {
  if (!(a > 0.0 && a < 1.0)) throw UsageError("--alpha must lie in (0,1)");
}

json engine_echo(const Flags& f) {
  return {{"engine", io::to_string(f.criterion.engine)},
          {"quad_order", f.criterion.quad_order},
          {"mc_points", f.criterion.mc_points},
          {"mc_seed", f.criterion.mc_seed},
          {"epsilon_c", f.criterion.epsilon_c},
          {"domain", io::to_string(f.criterion.domain)},
          {"grad_tol", f.estimate.maximize.grad_tol},
          {"max_iter", f.estimate.maximize.max_iter}};
}

json inference_echo(const Flags& f) {
  return {{"w_order", f.inference.w_order},
          {"segment_points", f.inference.segment_points},
          {"population_order", f.inference.population_order},
          {"power_form", io::to_string(f.inference.power_form)}};
}

void emit(const Flags& f, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (f.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream os(f.out, std::ios::binary);
  if (!os) throw UsageError("cannot write '" + f.out + "'");
  os << text;
}

ParamVec theta_for(const CopulaModel& m, const Flags& f) {
  if (static_cast<int>(f.theta.size()) != m.dim())
    throw UsageError("--theta needs " + std::to_string(m.dim()) + " value(s) for " + f.family);
  return f.theta;
}

int run_test(const Flags& f) {
  check_alpha(f.alpha.front());
  const CopulaModel model = CopulaModel::from_id(f.family);
  const auto data = read_csv_file(f.in);
  TestOptions opts;
  opts.estimate = f.estimate;
  opts.inference = f.inference;
  const TestReport r = independence_test(data, model, f.alpha.front(), f.criterion, opts);
  json j = io::to_json(r);
  j["config"] = {{"subcommand", "test"}, {"family", f.family}, {"alpha", f.alpha.front()},
                 {"in", f.in},           {"criterion", engine_echo(f)},
                 {"inference", inference_echo(f)}};
  emit(f, j);
  return r.reject.has_value() ? kOk : kNumeric;
}

int run_estimate(const Flags& f) {
  const CopulaModel model = CopulaModel::from_id(f.family);
  const auto data = read_csv_file(f.in);
  const PseudoSample ps = make_pseudo(data);
  const DualCriterion dc(model, f.criterion);
  const EstimationResult dual = estimate(dc, ps, f.estimate);
  const PseudoLikelihoodResult pl = pseudo_mle_and_Sn(model, ps, f.estimate);
  json j;
  j["family"] = f.family;
  j["n"] = ps.n;
  j["theta0"] = model.theta0();
  j["dual"] = io::to_json(dual);
  j["dual"]["t_n"] = statistic_Tn(dual, ps.n);
  j["pseudo_mle"] = io::to_json(pl);
  j["config"] = {{"subcommand", "estimate"}, {"family", f.family}, {"in", f.in},
                 {"criterion", engine_echo(f)}};
  emit(f, j);
  return dual.converged && pl.converged ? kOk : kNumeric;
}

int run_power(const Flags& f) {
  check_alpha(f.alpha.front());
  if (f.n < 2) throw UsageError("--n must be at least 2");
  const CopulaModel model = CopulaModel::from_id(f.family);
  const ParamVec theta = theta_for(model, f);
  const DualCriterion dc(model, f.criterion);
  const double chi2 = chi2_divergence(dc, theta);
  const double s2 = population_sigma2_chi2(dc, theta, f.inference);
  const double power = power_formula(chi2, s2, double(f.n), f.alpha.front(), model.dim(),
                                     f.inference.power_form);
  json j = {{"family", f.family},   {"theta_alt", theta},   {"n", f.n},
            {"alpha", f.alpha.front()}, {"power_form", io::to_string(f.inference.power_form)},
            {"chi2_div", chi2},     {"sigma2_chi2", s2},    {"power", power}};
  j["config"] = {{"subcommand", "power"},  {"family", f.family},         {"theta", f.theta},
                 {"n", f.n},               {"alpha", f.alpha.front()},   {"criterion", engine_echo(f)},
                 {"inference", inference_echo(f)}};
  emit(f, j);
  return kOk;
}

int run_samplesize(const Flags& f) {
  check_alpha(f.alpha.front());
  if (!(f.beta > 0.0 && f.beta < 1.0)) throw UsageError("--beta must lie in (0,1)");
  const CopulaModel model = CopulaModel::from_id(f.family);
  const ParamVec theta = theta_for(model, f);
  const DualCriterion dc(model, f.criterion);
  const PowerPlan plan = sample_size(dc, theta, f.alpha.front(), f.beta, f.inference);
  json j = io::to_json(plan);
  j["config"] = {{"subcommand", "samplesize"}, {"family", f.family},
                 {"theta", f.theta},           {"alpha", f.alpha.front()},
                 {"beta", f.beta},             {"criterion", engine_echo(f)},
                 {"inference", inference_echo(f)}};
  emit(f, j);
  return kOk;
}

int run_simulate(const Flags& f) {
  for (double a : f.alpha) check_alpha(a);
  const SimMode mode = kModes.at(f.mode);
  SimConfig c;
  c.family = f.family;
  c.n = f.n;
  c.replications = f.reps;
  c.seed = f.seed;
  c.alphas = f.alpha;
  c.threads = f.threads;
  c.criterion = f.criterion;
  c.estimate = f.estimate;
  c.inference = f.inference;
  if (mode != SimMode::null) {
    const CopulaModel model = CopulaModel::from_id(f.family);
    c.theta = theta_for(model, f);
  }
  const SimulationSummary s = simulate(mode, c);
  json j = io::to_json(s);
  // Thread count and output paths do not affect the results and are left out,
  // so reruns with different values stay byte-identical.
  j["config"] = {{"subcommand", "simulate"}, {"mode", f.mode},   {"family", f.family},
                 {"theta", c.theta},         {"n", f.n},         {"reps", f.reps},
                 {"alpha", f.alpha},         {"seed", f.seed},   {"criterion", engine_echo(f)},
                 {"inference", inference_echo(f)}};
  emit(f, j);
  if (!f.ecdf.empty()) {
    std::ofstream os(f.ecdf, std::ios::binary);
    if (!os) throw UsageError("cannot write '" + f.ecdf + "'");
    io::write_ecdf_csv(os, s);
  }
  return s.statistics.empty() ? kNumeric : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual chi-square divergence independence tests for bivariate copulas"};
  app.require_subcommand(1);
  Flags f;

  auto* test = app.add_subcommand("test", "Test independence on a two-column CSV sample");
  add_family(test, f);
  test->add_option("--in", f.in, "Input CSV")->required();
  test->add_option("--alpha", f.alpha, "Significance level")->expected(1)->capture_default_str();
  add_out(test, f);
  add_engine_flags(test, f);

  auto* est = app.add_subcommand("estimate", "Dual estimate and pseudo-likelihood estimate");
  add_family(est, f);
  est->add_option("--in", f.in, "Input CSV")->required();
  add_out(est, f);
  add_engine_flags(est, f);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study of T_n or of the estimator");
  add_family(sim, f);
  sim->add_option("--mode", f.mode, "null, power or estimator")
      ->check(CLI::IsMember({"null", "power", "estimator"}))
      ->capture_default_str();
  add_theta(sim, f, false);
  sim->add_option("--n", f.n, "Sample size")->capture_default_str();
  sim->add_option("--reps", f.reps, "Replications")->capture_default_str();
  sim->add_option("--alpha", f.alpha, "Levels for the rejection rates")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  sim->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  sim->add_option("--ecdf", f.ecdf, "Write the ECDF table as CSV");
  add_out(sim, f);
  add_power_form(sim, f);
  add_engine_flags(sim, f);

  auto* pow = app.add_subcommand("power", "Approximate power at a fixed alternative");
  add_family(pow, f);
  add_theta(pow, f, true);
  pow->add_option("--n", f.n, "Sample size")->required();
  pow->add_option("--alpha", f.alpha, "Significance level")->expected(1)->capture_default_str();
  add_power_form(pow, f);
  add_out(pow, f);
  add_engine_flags(pow, f);

  auto* ss = app.add_subcommand("samplesize", "Sample size reaching a target power");
  add_family(ss, f);
  add_theta(ss, f, true);
  ss->add_option("--alpha", f.alpha, "Significance level")->expected(1)->capture_default_str();
  ss->add_option("--beta", f.beta, "Target power")->capture_default_str();
  add_power_form(ss, f);
  add_out(ss, f);
  add_engine_flags(ss, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (test->parsed()) return run_test(f);
    if (est->parsed()) return run_estimate(f);
    if (sim->parsed()) return run_simulate(f);
    if (pow->parsed()) return run_power(f);
    if (ss->parsed()) return run_samplesize(f);
  } catch (const CsvError& e) {
    std::cerr << "error: " << f.in << ": " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
