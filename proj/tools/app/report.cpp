#include "app/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ctmcfit/errors.hpp"

namespace ctmcfit::app {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ErrorMetrics relative_errors(const ParamSpace& params, const Valuation& estimate,
                             const std::map<std::string, double>& truth, const std::vector<std::string>& names) {
  ErrorMetrics m;
  for (const auto& name : names) {
    const auto t = truth.find(name);
    if (t == truth.end()) throw ConfigError("no true value for parameter '" + name + "'");
    if (t->second == 0.0) throw ConfigError("true value of '" + name + "' is zero; relative error undefined");
    const auto index = params.index_of(name);
    if (!index) throw ConfigError("unknown parameter '" + name + "'");
    const double d = std::abs(estimate[*index] - t->second) / std::abs(t->second);
    m.names.push_back(name);
    m.delta.push_back(d);
    m.l1 += d;
    m.linf = std::max(m.linf, d);
  }
  return m;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::nan("");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Json valuation_json(const ParamSpace& params, const Valuation& values) {
  Json j = Json::object();
  for (std::size_t i = 0; i < params.size(); ++i) j[params.name(i)] = values[i];
  return j;
}

Json result_json(const ParamSpace& params, const EstimationResult& r, bool timings) {
  Json j;
  j["initial"] = valuation_json(params, r.initial);
  j["estimate"] = valuation_json(params, r.valuation);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["loglik"] = r.loglik_trace.empty() ? 0.0 : r.loglik_trace.back();
  j["loglik_trace"] = r.loglik_trace;
  Json status = Json::object();
  for (std::size_t i = 0; i < params.size(); ++i) status[params.name(i)] = to_string(r.status[i]);
  j["status"] = status;
  j["warnings"] = r.warnings;
  if (timings) j["wall_time_s"] = r.wall_time;
  return j;
}

Json metrics_json(const ErrorMetrics& m) {
  Json j;
  Json delta = Json::object();
  for (std::size_t i = 0; i < m.names.size(); ++i) delta[m.names[i]] = m.delta[i];
  j["delta"] = delta;
  j["l1"] = m.l1;
  j["linf"] = m.linf;
  return j;
}

bool monotone_trace(const std::vector<double>& trace, double slack) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] < trace[i - 1] - slack * std::abs(trace[i - 1])) return false;
  return true;
}

RestartStats restart_stats(const std::vector<EstimationResult>& runs, const std::vector<ErrorMetrics>& errors,
                           double slack) {
  RestartStats s;
  std::vector<double> l1, linf;
  for (const auto& e : errors) {
    l1.push_back(e.l1);
    linf.push_back(e.linf);
  }
  if (!errors.empty()) {
    s.median_l1 = median(l1);
    s.median_linf = median(linf);
    s.mean_l1 = mean(l1);
    s.mean_linf = mean(linf);
  }
  for (const auto& r : runs) {
    s.all_converged = s.all_converged && r.converged;
    s.max_iterations = std::max(s.max_iterations, r.iterations);
    s.monotone = s.monotone && monotone_trace(r.loglik_trace, slack);
  }
  return s;
}

Json restarts_json(const ParamSpace& params, const std::vector<EstimationResult>& runs,
                   const std::map<std::string, double>& truth, bool timings) {
  Json j;
  Json list = Json::array();
  std::vector<ErrorMetrics> errors;
  const auto free = params.free_names();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    Json item;
    item["restart"] = r;
    item["result"] = result_json(params, runs[r], timings);
    if (!truth.empty()) {
      errors.push_back(relative_errors(params, runs[r].valuation, truth, free));
      item["errors"] = metrics_json(errors.back());
    }
    list.push_back(std::move(item));
  }
  j["restarts"] = std::move(list);

  const auto stats = restart_stats(runs, errors);
  Json agg;
  agg["all_converged"] = stats.all_converged;
  agg["max_iterations"] = stats.max_iterations;
  agg["monotone_traces"] = stats.monotone;
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].loglik_trace.back() > runs[best].loglik_trace.back()) best = r;
  if (!runs.empty()) agg["best_restart"] = best;
  if (!errors.empty()) {
    Json mean_delta = Json::object();
    for (std::size_t i = 0; i < free.size(); ++i) {
      std::vector<double> d;
      for (const auto& e : errors) d.push_back(e.delta[i]);
      mean_delta[free[i]] = mean(d);
    }
    agg["mean_delta"] = mean_delta;
    agg["mean_l1"] = stats.mean_l1;
    agg["mean_linf"] = stats.mean_linf;
    agg["median_l1"] = stats.median_l1;
    agg["median_linf"] = stats.median_linf;
  }
  if (timings) {
    std::vector<double> wall;
    for (const auto& r : runs) wall.push_back(r.wall_time);
    agg["mean_wall_time_s"] = mean(wall);
  }
  j["aggregate"] = std::move(agg);
  return j;
}

}  // namespace ctmcfit::app
