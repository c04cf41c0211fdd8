#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "app/commands.hpp"
#include "ctmcfit/errors.hpp"

using namespace ctmcfit;
using namespace ctmcfit::app;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kParse = 3, kSemantic = 4, kIo = 5, kEstimation = 6 };

// Raw flag values; lists may be comma-separated or repeated.
struct ModelArgs {
  std::vector<std::string> consts;
  std::vector<std::string> params;
  std::vector<std::string> observables;
};

void add_model_options(CLI::App& cmd, ModelSpec& spec, ModelArgs& raw) {
  cmd.add_option("model", spec.path, "PRISM model file, or builtin:<tandem|sir|sir_modular|sir_approx>")->required();
  cmd.add_option("--const", raw.consts, "constant bindings name=value[,name=value...]")->allow_extra_args(false);
  cmd.add_option("--params", raw.params, "defined double constants to treat as parameters")->allow_extra_args(false);
  cmd.add_option("--observables", raw.observables, "observable variables (default: all)")->allow_extra_args(false);
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items)
    for (auto& part : CLI::detail::split(item, ','))
      if (!part.empty()) out.push_back(part);
  return out;
}

void finish_model(ModelSpec& spec, const ModelArgs& raw) {
  for (const auto& c : raw.consts)
    for (const auto& [k, v] : prism::parse_bindings(c)) spec.bindings[k] = v;
  spec.promote = split_list(raw.params);
  spec.observables = split_list(raw.observables);
}

void add_estimator_options(CLI::App& cmd, EstimatorConfig& e, std::string& rule) {
  cmd.add_option("--epsilon", e.epsilon, "stop when the log-likelihood gain is at most this")->capture_default_str();
  cmd.add_option("--max-iters", e.max_iters, "maximum number of MM updates")->capture_default_str();
  cmd.add_option("--min-param", e.min_param, "floor for parameter values")->capture_default_str();
  cmd.add_option("--update", rule, "parameter update: auto (closed form when possible) or root")
      ->check(CLI::IsMember({"auto", "root"}))
      ->capture_default_str();
  cmd.add_option("--workers", e.workers, "worker threads (0: CTMCFIT_WORKERS or hardware)");
}

void parse_range(const std::string& text, double& lo, double& hi) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("range '" + text + "' is not of the form lo:hi");
  try {
    lo = std::stod(text.substr(0, colon));
    hi = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("range '" + text + "' is not numeric");
  }
}

void emit(const Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  // PRISM spells the binding flag with a single dash.
  std::vector<std::string> args(argv, argv + argc);
  for (auto& a : args) {
    if (a == "-const") a = "--const";
    else if (a.rfind("-const=", 0) == 0) a = "-" + a;
  }
  std::vector<char*> argp;
  for (auto& a : args) argp.push_back(a.data());

  CLI::App app{"Parameter estimation for parametric CTMCs from timed and untimed observations"};
  app.require_subcommand(1);

  // build
  ModelSpec build_spec;
  ModelArgs build_args;
  std::string build_out;
  bool build_no_states = false;
  std::size_t build_max_states = prism::BuildLimits{}.max_states;
  auto* build = app.add_subcommand("build", "compile a model and print its size and parameters");
  add_model_options(*build, build_spec, build_args);
  build->add_option("-o,--output", build_out, "write the JSON summary here instead of stdout");
  build->add_flag("--no-states", build_no_states, "report constants and parameters without exploring states");
  build->add_option("--max-states", build_max_states, "abort exploration beyond this many states")
      ->capture_default_str();

  // simulate
  SimulateOptions sim;
  ModelArgs sim_args;
  bool sim_untimed = false;
  std::string sim_summary;
  auto* simulate = app.add_subcommand("simulate", "generate an observation dataset");
  add_model_options(*simulate, sim.model, sim_args);
  simulate->add_option("--seqs", sim.sequences, "number of sequences")->capture_default_str();
  simulate->add_option("--len", sim.length, "jumps per sequence")->capture_default_str();
  simulate->add_option("--horizon", sim.horizon, "stop each sequence before this time");
  simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  simulate->add_flag("--timed", "keep dwell times (default)");
  simulate->add_flag("--untimed", sim_untimed, "drop dwell times");
  simulate->add_option("-o,--output", sim.output, "dataset path, - for stdout")->required();
  simulate->add_option("--summary", sim_summary, "write a JSON summary here");
  simulate->add_option("--workers", sim.workers, "worker threads");

  // fit
  FitOptions fit;
  ModelArgs fit_args;
  std::vector<std::string> fit_fix;
  std::string fit_range = "0.1:5.0", fit_out, fit_rule = "auto", fit_mode;
  std::string fit_truth;
  auto* fitc = app.add_subcommand("fit", "estimate parameters from a dataset");
  add_model_options(*fitc, fit.model, fit_args);
  fitc->add_option("dataset", fit.dataset, "dataset file")->required();
  fitc->add_option("--fix", fit_fix, "pin parameters name=value[,...]")->allow_extra_args(false);
  add_estimator_options(*fitc, fit.estimator, fit_rule);
  fitc->add_option("--init-range", fit_range, "initial values drawn uniformly from lo:hi")->capture_default_str();
  fitc->add_option("--restarts", fit.restarts, "independent random restarts")->capture_default_str();
  fitc->add_option("--seed", fit.seed, "seed for initial values")->capture_default_str();
  fitc->add_option("--mode", fit_mode, "timed or untimed (default: dataset kind)")
      ->check(CLI::IsMember({"timed", "untimed"}));
  fitc->add_option("--truth", fit_truth, "JSON file {name: true value} for error metrics");
  fitc->add_flag("--truth-from-model", fit.truth_from_model, "use definitions of --params constants as true values");
  fitc->add_flag("--timings", fit.timings, "include wall-clock times in the report");
  fitc->add_option("-o,--output", fit_out, "report path (default stdout)");

  // bench-tandem
  BenchOptions bench;
  std::string bench_out, bench_csv_path, bench_rule = "auto", bench_modes = "timed,untimed";
  auto* benchc = app.add_subcommand("bench-tandem", "tandem queue benchmark over queue capacities");
  benchc->add_option("--cmin", bench.cmin)->capture_default_str();
  benchc->add_option("--cmax", bench.cmax)->capture_default_str();
  benchc->add_option("--step", bench.step)->capture_default_str();
  benchc->add_option("--timeout", bench.timeout_s, "seconds per row before remaining restarts are skipped")
      ->capture_default_str();
  benchc->add_option("--seqs", bench.sequences)->capture_default_str();
  benchc->add_option("--len", bench.length)->capture_default_str();
  benchc->add_option("--restarts", bench.restarts)->capture_default_str();
  benchc->add_option("--seed", bench.seed)->capture_default_str();
  benchc->add_option("--modes", bench_modes, "comma-separated subset of timed,untimed")->capture_default_str();
  add_estimator_options(*benchc, bench.estimator, bench_rule);
  benchc->add_option("-o,--output", bench_out, "JSON path (default stdout)");
  benchc->add_option("--csv", bench_csv_path, "also write the table as CSV");

  // case-sir
  SirCase sir;
  std::string sir_out, sir_csv_path, sir_rule = "auto", sir_range = "0.01:1.0";
  std::size_t sir_len = 0;
  auto* sirc = app.add_subcommand("case-sir", "two-step SIR estimation at reduced population");
  sirc->add_option("--scale", sir.scale, "population scale relative to 100000")->capture_default_str();
  sirc->add_option("--seed", sir.seed)->capture_default_str();
  sirc->add_option("--days", sir.days, "observation window")->capture_default_str();
  sirc->add_option("--len", sir_len, "observe this many jumps instead of a time window");
  sirc->add_option("--restarts", sir.restarts)->capture_default_str();
  sirc->add_option("--init-range", sir_range)->capture_default_str();
  sirc->add_flag("--timings", sir.timings, "include wall-clock times");
  add_estimator_options(*sirc, sir.estimator, sir_rule);
  sirc->add_option("-o,--output", sir_out, "report path (default stdout)");
  sirc->add_option("--csv", sir_csv_path, "also write the estimates table as CSV");

  try {
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto rule_of = [](const std::string& r) { return r == "root" ? UpdateRule::RootSolver : UpdateRule::Auto; };

  try {
    if (*build) {
      finish_model(build_spec, build_args);
      prism::BuildLimits limits;
      limits.max_states = build_max_states;
      const Json j = cmd_build(build_spec, !build_no_states, limits);
      emit(j, build_out);
      if (!build_out.empty()) std::cerr << j["summary"].get<std::string>() << "\n";
    } else if (*simulate) {
      finish_model(sim.model, sim_args);
      sim.kind = sim_untimed ? ObservationKind::Untimed : ObservationKind::Timed;
      const Json j = cmd_simulate(sim);
      if (!sim_summary.empty()) emit(j, sim_summary);
    } else if (*fitc) {
      finish_model(fit.model, fit_args);
      for (const auto& f : fit_fix)
        for (const auto& [k, v] : prism::parse_bindings(f)) fit.fix[k] = v;
      parse_range(fit_range, fit.init_lo, fit.init_hi);
      fit.estimator.rule = rule_of(fit_rule);
      if (!fit_mode.empty())
        fit.estimator.mode = fit_mode == "timed" ? ObservationKind::Timed : ObservationKind::Untimed;
      if (!fit_truth.empty()) fit.truth_path = fit_truth;
      const Json j = cmd_fit(fit);
      emit(j, fit_out);
      bool any = false;
      for (const auto& r : j["restarts"]) any = any || r["result"]["converged"].get<bool>();
      if (!any) {
        std::cerr << "error: no restart converged within " << fit.estimator.max_iters << " iterations\n";
        return kEstimation;
      }
    } else if (*benchc) {
      bench.estimator.rule = rule_of(bench_rule);
      bench.modes.clear();
      for (const auto& m : CLI::detail::split(bench_modes, ',')) {
        if (m == "timed") bench.modes.push_back(ObservationKind::Timed);
        else if (m == "untimed") bench.modes.push_back(ObservationKind::Untimed);
        else throw ConfigError("unknown mode '" + m + "'");
      }
      const Json j = cmd_bench_tandem(bench);
      emit(j, bench_out);
      write_text(bench_csv_path, bench_csv(j));
    } else if (*sirc) {
      sir.estimator.rule = rule_of(sir_rule);
      parse_range(sir_range, sir.init_lo, sir.init_hi);
      if (sir_len) sir.steps = sir_len;
      const Json j = cmd_case_sir(sir);
      emit(j, sir_out);
      write_text(sir_csv_path, case_sir_csv(j));
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const SemanticError& e) {
    std::cerr << "semantic error: " << e.what() << "\n";
    return kSemantic;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kSemantic;
  } catch (const DatasetFormatError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return kEstimation;
  } catch (const NoRootError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return kEstimation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kEstimation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemantic;
  }
  return kOk;
}
