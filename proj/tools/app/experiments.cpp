#include "app/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "app/builtin_models.hpp"
#include "ctmcfit/errors.hpp"
#include "ctmcfit/parallel.hpp"
#include "ctmcfit/prism/parser.hpp"
#include "ctmcfit/rng.hpp"

namespace ctmcfit::app {

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Json bindings_json(const prism::Bindings& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b) j[k] = v;
  return j;
}

Json estimator_json(const EstimatorConfig& c) {
  Json j;
  j["epsilon"] = c.epsilon;
  j["max_iters"] = c.max_iters;
  j["min_param"] = c.min_param;
  j["update_rule"] = c.rule == UpdateRule::Auto ? "auto" : "root";
  return j;
}

std::size_t best_restart(const std::vector<EstimationResult>& runs) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].loglik_trace.back() > runs[best].loglik_trace.back()) best = r;
  return best;
}

}  // namespace

std::string read_model_source(const std::string& path) {
  if (path.rfind(kBuiltinPrefix, 0) == 0) {
    const auto name = path.substr(kBuiltinPrefix.size());
    if (auto text = builtin_model(name)) return std::string(*text);
    throw IoError("unknown bundled model '" + name + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedModel load_model_source(std::string origin, std::string source, const prism::Bindings& bindings,
                              const std::vector<std::string>& promote, std::vector<std::string> observables) {
  LoadedModel m;
  m.origin = std::move(origin);
  m.source = std::move(source);
  m.hash = fnv1a_hex(m.source);
  m.ast = prism::parse(m.source);
  m.elaboration = prism::elaborate(m.ast, bindings, promote);
  if (observables.empty())
    for (const auto& mod : m.ast.modules)
      for (const auto& v : mod.variables) observables.push_back(v.name);
  m.observables = std::move(observables);
  return m;
}

LoadedModel load_model(const ModelSpec& spec) {
  return load_model_source(spec.path, read_model_source(spec.path), spec.bindings, spec.promote, spec.observables);
}

std::vector<EstimationResult> fit_restarts(const ParametricCtmc& chain, const Dataset& data,
                                           const EstimatorConfig& base, std::size_t restarts, std::uint64_t seed,
                                           double timeout_s, bool* timed_out) {
  const auto start = std::chrono::steady_clock::now();
  if (timed_out) *timed_out = false;
  std::vector<EstimationResult> runs;
  for (std::size_t r = 0; r < restarts; ++r) {
    EstimatorConfig config = base;
    config.init.seed = stream_seed(seed, r);
    runs.push_back(fit(chain, data, config));
    if (seconds_since(start) > timeout_s && r + 1 < restarts) {
      if (timed_out) *timed_out = true;
      break;
    }
  }
  return runs;
}

std::vector<std::string> tandem_parameters() { return {"mu1a", "mu1b", "mu2", "kappa"}; }

TandemOutcome run_tandem(const TandemExperiment& ex) {
  const auto start = std::chrono::steady_clock::now();
  ModelSpec spec;
  spec.path = "builtin:tandem";
  spec.bindings = {{"c", static_cast<double>(ex.capacity)}};
  spec.promote = tandem_parameters();
  spec.observables = {"sc", "ph"};
  const LoadedModel model = load_model(spec);
  const auto built = prism::build(model.ast, model.elaboration, model.observables);
  const Valuation truth_values = model.elaboration.valuation();
  std::map<std::string, double> truth;
  for (std::size_t i = 0; i < truth_values.size(); ++i) truth[built.chain.params().name(i)] = truth_values[i];

  const std::size_t workers = ex.estimator.workers ? ex.estimator.workers : default_worker_count();
  SimulationLimits limits;
  limits.max_steps = ex.length;
  auto sequences =
      ctmcfit::simulate_many(instantiate(built.chain, truth_values), ex.sequences, limits, ex.seed, workers);
  const Dataset timed(std::move(sequences), model.observables);
  const Dataset data = ex.mode == ObservationKind::Timed ? timed : timed.without_times();

  EstimatorConfig config = ex.estimator;
  config.init.values.reset();
  config.init.lo = ex.init_lo;
  config.init.hi = ex.init_hi;
  config.mode = ex.mode;
  bool timed_out = false;
  const std::uint64_t restart_seed = stream_seed(ex.seed, 0x7265737461727473ULL);
  const auto runs = fit_restarts(built.chain, data, config, ex.restarts, restart_seed, ex.timeout_s, &timed_out);

  TandemOutcome out;
  out.states = built.chain.state_count();
  out.transitions = built.chain.transition_count();
  out.skipped = timed_out;

  std::vector<ErrorMetrics> errors;
  for (const auto& r : runs) errors.push_back(relative_errors(built.chain.params(), r.valuation, truth, tandem_parameters()));
  out.stats = restart_stats(runs, errors);

  Json report;
  report["command"] = "tandem";
  report["model"] = {{"origin", model.origin}, {"hash", model.hash}, {"capacity", ex.capacity},
                     {"states", out.states}, {"transitions", out.transitions}};
  report["observables"] = model.observables;
  report["truth"] = bindings_json(truth);
  report["data"] = {{"kind", to_string(ex.mode)},
                    {"sequences", ex.sequences},
                    {"length", ex.length},
                    {"seed", ex.seed},
                    {"rng", Rng::kAlgorithm}};
  report["config"] = {{"estimator", estimator_json(config)},
                      {"init_range", {ex.init_lo, ex.init_hi}},
                      {"restarts", ex.restarts},
                      {"restart_seed", restart_seed}};
  const Json fits = restarts_json(built.chain.params(), runs, truth, ex.timings);
  report["restarts"] = fits["restarts"];
  report["aggregate"] = fits["aggregate"];
  report["skipped"] = out.skipped;
  out.seconds = seconds_since(start);
  if (ex.timings) report["total_wall_time_s"] = out.seconds;
  out.report = std::move(report);
  return out;
}

namespace {

struct SirDataset {
  Dataset data;
  std::int64_t min_infected = 0;
  std::int64_t max_infected = 0;
  double duration = 0.0;
};

SirDataset simulate_sir(const std::string& source, double beta, double gamma, double plock,
                        const SimulationLimits& limits, std::uint64_t seed) {
  const LoadedModel model =
      load_model_source("sir", source, {{"beta", beta}, {"gamma", gamma}, {"plock", plock}}, {}, {"i"});
  const prism::Explorer explorer(model.ast, model.elaboration, model.observables);
  auto seqs = prism::simulate_many(explorer, model.elaboration.valuation(), 1, limits, seed, 1);
  SirDataset out{Dataset(seqs, model.observables), 0, 0, 0.0};
  const auto& o = out.data.timed().front();
  out.min_infected = out.max_infected = o.labels.front().front();
  for (const auto& l : o.labels) {
    out.min_infected = std::min(out.min_infected, l.front());
    out.max_infected = std::max(out.max_infected, l.front());
  }
  for (double d : o.dwells) out.duration += d;
  return out;
}

Json sir_dataset_json(const SirDataset& d, double plock, std::uint64_t seed) {
  return {{"plock", plock},
          {"seed", seed},
          {"jumps", d.data.timed().front().steps()},
          {"observed_time", d.duration},
          {"min_infected", d.min_infected},
          {"max_infected", d.max_infected}};
}

}  // namespace

SirOutcome run_sir_case(const SirCase& c) {
  const auto start = std::chrono::steady_clock::now();
  const SirPopulation population = SirPopulation::scaled(c.scale);
  const std::string full = sir_source(population);
  const std::string approx = sir_approx_source(population);

  SimulationLimits limits;
  if (c.steps) {
    limits.max_steps = *c.steps;
  } else {
    if (!(c.days > 0.0)) throw ConfigError("observation window must be positive");
    limits.max_steps = std::numeric_limits<std::size_t>::max();
    limits.horizon = c.days;
  }
  const std::uint64_t seed1 = stream_seed(c.seed, 0), seed2 = stream_seed(c.seed, 1);
  const SirDataset free_run = simulate_sir(full, c.beta, c.gamma, 1.0, limits, seed1);
  const SirDataset lockdown = simulate_sir(full, c.beta, c.gamma, c.plock, limits, seed2);

  auto bounds = [](const SirDataset& d) {
    return prism::Bindings{{"lbound_i", static_cast<double>(std::max<std::int64_t>(0, d.min_infected - 1))},
                           {"ubound_i", static_cast<double>(d.max_infected + 1)}};
  };

  EstimatorConfig config = c.estimator;
  config.init.values.reset();
  config.init.lo = c.init_lo;
  config.init.hi = c.init_hi;
  config.mode = ObservationKind::Timed;

  // Step 1: beta and gamma with plock pinned to 1.
  auto b1 = bounds(free_run);
  b1["plock"] = 1.0;
  const LoadedModel m1 = load_model_source("sir_approx", approx, b1, {}, {"i"});
  const auto built1 = prism::build(m1.ast, m1.elaboration, m1.observables);
  const auto runs1 = fit_restarts(built1.chain, free_run.data, config, c.restarts, stream_seed(c.seed, 2));
  const auto& best1 = runs1[best_restart(runs1)];
  const auto& p1 = built1.chain.params();
  const double beta = best1.valuation[*p1.index_of("beta")];
  const double gamma = best1.valuation[*p1.index_of("gamma")];

  // Step 2: plock with beta and gamma pinned to the step-1 estimates.
  auto b2 = bounds(lockdown);
  b2["beta"] = beta;
  b2["gamma"] = gamma;
  const LoadedModel m2 = load_model_source("sir_approx", approx, b2, {}, {"i"});
  const auto built2 = prism::build(m2.ast, m2.elaboration, m2.observables);
  const auto runs2 = fit_restarts(built2.chain, lockdown.data, config, c.restarts, stream_seed(c.seed, 3));
  const auto& best2 = runs2[best_restart(runs2)];
  const double plock = best2.valuation[*built2.chain.params().index_of("plock")];

  SirOutcome out;
  out.beta = beta;
  out.gamma = gamma;
  out.plock = plock;

  Json report;
  report["command"] = "case-sir";
  report["population"] = {{"scale", c.scale},
                          {"SIZE", population.size},
                          {"s0", population.susceptible},
                          {"i0", population.infected},
                          {"r0", population.recovered}};
  report["models"] = {{"simulation", {{"origin", "builtin:sir"}, {"hash", fnv1a_hex(full)}}},
                      {"estimation", {{"origin", "builtin:sir_approx"}, {"hash", fnv1a_hex(approx)}}}};
  Json window;
  if (c.steps)
    window["steps"] = *c.steps;
  else
    window["days"] = c.days;
  report["observation_window"] = window;
  report["truth"] = {{"beta", c.beta}, {"gamma", c.gamma}, {"plock", c.plock}};
  report["config"] = {{"estimator", estimator_json(config)},
                      {"init_range", {c.init_lo, c.init_hi}},
                      {"restarts", c.restarts},
                      {"seed", c.seed},
                      {"rng", Rng::kAlgorithm}};

  Json step1;
  step1["dataset"] = sir_dataset_json(free_run, 1.0, seed1);
  step1["bindings"] = bindings_json(b1);
  step1["model"] = {{"states", built1.chain.state_count()}, {"transitions", built1.chain.transition_count()}};
  const Json fits1 = restarts_json(p1, runs1, {}, c.timings);
  step1["restarts"] = fits1["restarts"];
  step1["aggregate"] = fits1["aggregate"];
  report["step1"] = std::move(step1);

  Json step2;
  step2["dataset"] = sir_dataset_json(lockdown, c.plock, seed2);
  step2["bindings"] = bindings_json(b2);
  step2["model"] = {{"states", built2.chain.state_count()}, {"transitions", built2.chain.transition_count()}};
  const Json fits2 = restarts_json(built2.chain.params(), runs2, {}, c.timings);
  step2["restarts"] = fits2["restarts"];
  step2["aggregate"] = fits2["aggregate"];
  report["step2"] = std::move(step2);

  Json table = Json::array();
  auto row = [&](const char* name, double expected, double estimated) {
    table.push_back({{"parameter", name},
                     {"expected", expected},
                     {"estimated", estimated},
                     {"absolute_error", std::abs(estimated - expected)}});
  };
  row("beta", c.beta, beta);
  row("gamma", c.gamma, gamma);
  row("plock", c.plock, plock);
  report["estimates"] = std::move(table);
  if (c.timings) report["total_wall_time_s"] = seconds_since(start);
  out.report = std::move(report);
  return out;
}

}  // namespace ctmcfit::app
