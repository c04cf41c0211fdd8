#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "app/experiments.hpp"
#include "app/report.hpp"

namespace ctmcfit::app {

/// Summary of a compiled model; with `explore` false only the declarations are reported.
Json cmd_build(const ModelSpec& model, bool explore = true, const prism::BuildLimits& limits = {});

struct SimulateOptions {
  ModelSpec model;
  std::size_t sequences = 100;
  std::size_t length = 30;
  double horizon = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  ObservationKind kind = ObservationKind::Timed;
  std::string output = "-";
  std::size_t workers = 0;
};

/// Writes the dataset to `output` ("-" for stdout) and returns a summary.
Json cmd_simulate(const SimulateOptions& options);

struct FitOptions {
  ModelSpec model;
  std::string dataset;
  prism::Bindings fix;
  EstimatorConfig estimator;
  double init_lo = 0.1;
  double init_hi = 5.0;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> truth_path;
  /// Use the definitions of promoted constants as true values.
  bool truth_from_model = false;
  bool timings = false;
};

Json cmd_fit(const FitOptions& options);

struct BenchOptions {
  int cmin = 4;
  int cmax = 4;
  int step = 1;
  double timeout_s = 3600.0;
  std::size_t sequences = 100;
  std::size_t length = 30;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  std::vector<ObservationKind> modes = {ObservationKind::Timed, ObservationKind::Untimed};
  EstimatorConfig estimator;
  bool timings = true;
};

Json cmd_bench_tandem(const BenchOptions& options);
/// c, mode, states, transitions, runtime_s, l1, linf, skipped.
std::string bench_csv(const Json& bench);

Json cmd_case_sir(const SirCase& config);
/// parameter, expected, estimated, absolute_error.
std::string case_sir_csv(const Json& report);

}  // namespace ctmcfit::app
