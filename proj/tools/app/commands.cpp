#include "app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctmcfit/dataset_io.hpp"
#include "ctmcfit/errors.hpp"
#include "ctmcfit/parallel.hpp"
#include "ctmcfit/rng.hpp"

namespace ctmcfit::app {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json model_json(const LoadedModel& m) {
  Json j;
  j["origin"] = m.origin;
  j["hash"] = m.hash;
  return j;
}

std::map<std::string, double> read_truth(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw IoError("truth file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw IoError("truth file '" + path + "' must hold an object of name: value");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw IoError("truth value for '" + k + "' is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace

Json cmd_build(const ModelSpec& spec, bool explore, const prism::BuildLimits& limits) {
  const LoadedModel model = load_model(spec);
  const prism::Explorer explorer(model.ast, model.elaboration, model.observables);
  const auto& params = explorer.params();
  Json j;
  j["model"] = model_json(model);
  j["parameters"] = params.names();
  j["free_parameters"] = params.free_names();
  Json fixed = Json::object();
  for (const auto& [i, v] : params.fixed()) fixed[params.name(i)] = v;
  j["fixed_parameters"] = fixed;
  Json defaults = Json::object();
  for (const auto& [k, v] : model.elaboration.parameter_defaults) defaults[k] = v;
  j["parameter_defaults"] = defaults;
  Json constants = Json::object();
  for (const auto& [k, v] : model.elaboration.constants) constants[k] = v;
  j["constants"] = constants;
  Json vars = Json::array();
  for (const auto& v : explorer.variables())
    vars.push_back({{"name", v.name}, {"module", v.module}, {"low", v.low}, {"high", v.high}, {"init", v.init}});
  j["variables"] = vars;
  j["observables"] = model.observables;
  if (!explore) {
    j["summary"] = std::to_string(params.size()) + " parameters (state space not explored)";
    return j;
  }
  const auto built = prism::build(model.ast, model.elaboration, model.observables, limits);
  j["states"] = built.chain.state_count();
  j["transitions"] = built.chain.transition_count();
  j["summary"] = std::to_string(built.chain.state_count()) + " states, " +
                 std::to_string(built.chain.transition_count()) + " transitions";
  return j;
}

Json cmd_simulate(const SimulateOptions& o) {
  if (o.sequences == 0) throw ConfigError("--seqs must be at least 1");
  const LoadedModel model = load_model(o.model);
  const prism::Explorer explorer(model.ast, model.elaboration, model.observables);
  const Valuation values = model.elaboration.valuation();
  SimulationLimits limits;
  limits.max_steps = o.length;
  limits.horizon = o.horizon;
  const std::size_t workers = o.workers ? o.workers : default_worker_count();
  auto seqs = prism::simulate_many(explorer, values, o.sequences, limits, o.seed, workers);
  Dataset data(std::move(seqs), model.observables);
  if (o.kind == ObservationKind::Untimed) data = data.without_times();

  std::ostringstream text;
  write_dataset(text, data);
  const std::string bytes = text.str();
  if (o.output == "-") {
    std::cout << bytes;
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw IoError("cannot write '" + o.output + "'");
    out << bytes;
    if (!out) throw IoError("failed writing '" + o.output + "'");
  }
  std::size_t total_steps = 0;
  if (data.kind() == ObservationKind::Timed)
    for (const auto& s : data.timed()) total_steps += s.steps();
  else
    for (const auto& s : data.untimed()) total_steps += s.steps();
  Json j;
  j["model"] = model_json(model);
  j["output"] = o.output;
  j["kind"] = to_string(data.kind());
  j["sequences"] = data.size();
  j["total_steps"] = total_steps;
  j["seed"] = o.seed;
  j["rng"] = Rng::kAlgorithm;
  j["values"] = valuation_json(explorer.params(), values);
  j["dataset_hash"] = fnv1a_hex(bytes);
  return j;
}

Json cmd_fit(const FitOptions& o) {
  ModelSpec spec = o.model;
  LoadedModel model = load_model(spec);
  auto& params = model.elaboration.params;
  for (const auto& [name, value] : o.fix) {
    const auto index = params.index_of(name);
    if (!index) throw ConfigError("--fix names '" + name + "', which is not a parameter");
    params.fix(*index, value);
  }
  const auto built = prism::build(model.ast, model.elaboration, model.observables);
  const std::string dataset_bytes = read_file(o.dataset);
  std::istringstream in(dataset_bytes);
  const Dataset data = read_dataset(in);
  if (data.observables() != model.observables)
    throw ConfigError("dataset observables do not match the model's observables");

  std::map<std::string, double> truth;
  if (o.truth_path) {
    truth = read_truth(*o.truth_path);
  } else if (o.truth_from_model) {
    for (const auto& [k, v] : model.elaboration.parameter_defaults) truth[k] = v;
  }

  EstimatorConfig config = o.estimator;
  config.init.values.reset();
  config.init.lo = o.init_lo;
  config.init.hi = o.init_hi;
  const auto runs = fit_restarts(built.chain, data, config, o.restarts, o.seed);

  Json j;
  j["command"] = "fit";
  j["model"] = model_json(model);
  j["model"]["states"] = built.chain.state_count();
  j["model"]["transitions"] = built.chain.transition_count();
  j["dataset"] = {{"path", o.dataset}, {"hash", fnv1a_hex(dataset_bytes)}, {"kind", to_string(data.kind())},
                  {"sequences", data.size()}};
  Json bindings = Json::object();
  for (const auto& [k, v] : o.model.bindings) bindings[k] = v;
  Json fixed = Json::object();
  for (const auto& [i, v] : built.chain.params().fixed()) fixed[built.chain.params().name(i)] = v;
  j["config"] = {{"bindings", bindings},
                 {"estimate", o.model.promote},
                 {"fixed", fixed},
                 {"free_parameters", built.chain.params().free_names()},
                 {"observables", model.observables},
                 {"mode", to_string(config.mode.value_or(data.kind()))},
                 {"epsilon", config.epsilon},
                 {"max_iters", config.max_iters},
                 {"min_param", config.min_param},
                 {"update_rule", config.rule == UpdateRule::Auto ? "auto" : "root"},
                 {"init_range", {o.init_lo, o.init_hi}},
                 {"restarts", o.restarts},
                 {"seed", o.seed},
                 {"rng", Rng::kAlgorithm}};
  if (!truth.empty()) {
    Json t = Json::object();
    for (const auto& [k, v] : truth) t[k] = v;
    j["truth"] = t;
  }
  const Json fits = restarts_json(built.chain.params(), runs, truth, o.timings);
  j["restarts"] = fits["restarts"];
  j["aggregate"] = fits["aggregate"];
  return j;
}

Json cmd_bench_tandem(const BenchOptions& o) {
  if (o.step <= 0) throw ConfigError("--step must be positive");
  if (o.cmin < 1 || o.cmax < o.cmin) throw ConfigError("need 1 <= cmin <= cmax");
  Json rows = Json::array();
  for (int c = o.cmin; c <= o.cmax; c += o.step) {
    for (const auto mode : o.modes) {
      TandemExperiment ex;
      ex.capacity = c;
      ex.sequences = o.sequences;
      ex.length = o.length;
      ex.restarts = o.restarts;
      ex.seed = o.seed;
      ex.mode = mode;
      ex.estimator = o.estimator;
      ex.timeout_s = o.timeout_s;
      ex.timings = o.timings;
      const auto out = run_tandem(ex);
      const std::size_t runs = out.report["restarts"].size();
      rows.push_back({{"c", c},
                      {"mode", to_string(mode)},
                      {"states", out.states},
                      {"transitions", out.transitions},
                      {"runtime_s", runs ? out.seconds / static_cast<double>(runs) : 0.0},
                      {"l1", out.stats.mean_l1},
                      {"linf", out.stats.mean_linf},
                      {"median_l1", out.stats.median_l1},
                      {"median_linf", out.stats.median_linf},
                      {"completed_restarts", runs},
                      {"skipped", out.skipped}});
    }
  }
  Json j;
  j["command"] = "bench-tandem";
  j["config"] = {{"cmin", o.cmin},         {"cmax", o.cmax},       {"step", o.step},
                 {"timeout_s", o.timeout_s}, {"sequences", o.sequences}, {"length", o.length},
                 {"restarts", o.restarts}, {"seed", o.seed},       {"epsilon", o.estimator.epsilon}};
  j["rows"] = rows;
  return j;
}

std::string bench_csv(const Json& bench) {
  std::string out = "c,mode,states,transitions,runtime_s,l1,linf,skipped\n";
  for (const auto& r : bench["rows"]) {
    out += std::to_string(r["c"].get<int>()) + "," + r["mode"].get<std::string>() + "," +
           std::to_string(r["states"].get<std::size_t>()) + "," +
           std::to_string(r["transitions"].get<std::size_t>()) + "," + number(r["runtime_s"].get<double>()) + "," +
           number(r["l1"].get<double>()) + "," + number(r["linf"].get<double>()) + "," +
           (r["skipped"].get<bool>() ? "true" : "false") + "\n";
  }
  return out;
}

Json cmd_case_sir(const SirCase& config) { return run_sir_case(config).report; }

std::string case_sir_csv(const Json& report) {
  std::string out = "parameter,expected,estimated,absolute_error\n";
  for (const auto& r : report["estimates"])
    out += r["parameter"].get<std::string>() + "," + number(r["expected"].get<double>()) + "," +
           number(r["estimated"].get<double>()) + "," + number(r["absolute_error"].get<double>()) + "\n";
  return out;
}

}  // namespace ctmcfit::app
