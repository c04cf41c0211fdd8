#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "app/report.hpp"
#include "ctmcfit/estimation.hpp"
#include "ctmcfit/prism/builder.hpp"

namespace ctmcfit::app {

/// A model file path, or `builtin:<name>` for a bundled model.
struct ModelSpec {
  std::string path;
  prism::Bindings bindings;
  std::vector<std::string> promote;
  /// Empty means every variable is observable.
  std::vector<std::string> observables;
};

struct LoadedModel {
  std::string origin;
  std::string source;
  std::string hash;
  prism::ModelAst ast;
  prism::Elaboration elaboration;
  std::vector<std::string> observables;
};

std::string read_model_source(const std::string& path);
LoadedModel load_model(const ModelSpec& spec);
LoadedModel load_model_source(std::string origin, std::string source, const prism::Bindings& bindings,
                              const std::vector<std::string>& promote, std::vector<std::string> observables);

/// Restart r starts from init seed stream_seed(seed, r); runs are sequential,
/// each fit parallel over sequences.
std::vector<EstimationResult> fit_restarts(const ParametricCtmc& chain, const Dataset& data,
                                           const EstimatorConfig& base, std::size_t restarts, std::uint64_t seed,
                                           double timeout_s = std::numeric_limits<double>::infinity(),
                                           bool* timed_out = nullptr);

std::vector<std::string> tandem_parameters();

struct TandemExperiment {
  int capacity = 4;
  std::size_t sequences = 100;
  std::size_t length = 30;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  ObservationKind mode = ObservationKind::Timed;
  double init_lo = 0.1;
  double init_hi = 5.0;
  EstimatorConfig estimator;
  double timeout_s = std::numeric_limits<double>::infinity();
  bool timings = false;
};

struct TandemOutcome {
  Json report;
  RestartStats stats;
  std::size_t states = 0;
  std::size_t transitions = 0;
  double seconds = 0.0;
  bool skipped = false;
};

/// Simulate from the bundled tandem model at its defined rates, fit from random restarts.
TandemOutcome run_tandem(const TandemExperiment& experiment);

struct SirCase {
  double scale = 0.01;
  std::uint64_t seed = 1;
  /// Observation window in days; ignored when `steps` is set.
  double days = 30.0;
  std::optional<std::size_t> steps;
  std::size_t restarts = 10;
  double init_lo = 0.01;
  double init_hi = 1.0;
  EstimatorConfig estimator;
  bool timings = false;
  double beta = 0.122128;
  double gamma = 0.127283;
  double plock = 0.472081;
};

struct SirOutcome {
  Json report;
  double beta = 0.0;
  double gamma = 0.0;
  double plock = 0.0;
};

/// Two-step SIR estimation: data from the full model, fits on the binned approximation.
SirOutcome run_sir_case(const SirCase& config);

}  // namespace ctmcfit::app
