#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctmcfit/estimation.hpp"
#include "json.hpp"

namespace ctmcfit::app {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// delta_i = |e_i - r_i| / |r_i| over the parameters listed in `names`.
struct ErrorMetrics {
  std::vector<std::string> names;
  std::vector<double> delta;
  double l1 = 0.0;
  double linf = 0.0;
};

ErrorMetrics relative_errors(const ParamSpace& params, const Valuation& estimate,
                             const std::map<std::string, double>& truth, const std::vector<std::string>& names);

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

Json valuation_json(const ParamSpace& params, const Valuation& values);
Json result_json(const ParamSpace& params, const EstimationResult& result, bool timings);
Json metrics_json(const ErrorMetrics& metrics);

/// Per-restart results plus aggregate error statistics. `truth` may be empty.
Json restarts_json(const ParamSpace& params, const std::vector<EstimationResult>& runs,
                   const std::map<std::string, double>& truth, bool timings);

/// Median and mean of the restart norms stored by restarts_json.
struct RestartStats {
  double median_l1 = 0.0;
  double median_linf = 0.0;
  double mean_l1 = 0.0;
  double mean_linf = 0.0;
  bool all_converged = true;
  std::size_t max_iterations = 0;
  bool monotone = true;
};

RestartStats restart_stats(const std::vector<EstimationResult>& runs, const std::vector<ErrorMetrics>& errors,
                           double relative_slack = 1e-8);

/// True when every step of the trace gains at least -slack * |value|.
bool monotone_trace(const std::vector<double>& trace, double relative_slack = 1e-8);

}  // namespace ctmcfit::app
