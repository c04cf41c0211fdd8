#include "ctmcfit/estimation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "ctmcfit/errors.hpp"
#include "ctmcfit/parallel.hpp"
#include "ctmcfit/rng.hpp"

namespace ctmcfit {

namespace {

struct SequenceStats {
  std::vector<double> gamma_timed;
  std::vector<double> gamma_hat;
  std::vector<double> xi;
  double loglik = 0.0;
};

// Streams posteriors into the per-sequence sums without materializing them.
SequenceStats sequence_stats(const FbTables& tb, const ConcreteCtmc& chain, const double* dwells) {
  const std::size_t n = tb.states;
  const auto& edges = chain.edges();
  SequenceStats st;
  st.gamma_timed.assign(dwells ? n : 0, 0.0);
  st.gamma_hat.assign(n, 0.0);
  st.xi.assign(edges.size(), 0.0);
  st.loglik = tb.loglik;
  if (tb.log_domain()) {
    const auto post = posteriors(tb, chain);
    for (std::size_t t = 0; t + 1 < tb.length; ++t) {
      for (std::size_t s = 0; s < n; ++s) {
        const double g = post.gamma_at(s, t);
        st.gamma_hat[s] += g;
        if (dwells) st.gamma_timed[s] += g * dwells[t];
      }
      for (std::size_t rho = 0; rho < edges.size(); ++rho) st.xi[rho] += post.xi_at(rho, t);
    }
    return st;
  }
  for (std::size_t t = 0; t + 1 < tb.length; ++t) {
    const double* a = &tb.alpha[t * n];
    const double* b_now = &tb.beta[t * n];
    double z = 0.0;
    for (std::size_t s = 0; s < n; ++s) z += a[s] * b_now[s];
    for (std::size_t s = 0; s < n; ++s) {
      const double g = a[s] * b_now[s] / z;
      if (g == 0.0) continue;
      st.gamma_hat[s] += g;
      if (dwells) st.gamma_timed[s] += g * dwells[t];
    }
    const double inv = 1.0 / (z * tb.normalizer[t + 1]);
    const double* b = &tb.beta[(t + 1) * n];
    const double* em = &tb.emission[(t + 1) * n];
    for (std::size_t rho = 0; rho < edges.size(); ++rho) {
      const auto& e = edges[rho];
      const double w = a[e.source] * em[e.target] * b[e.target];
      if (w == 0.0) continue;
      st.xi[rho] += w * (e.rate / chain.exit(e.source)) * inv;
    }
  }
  return st;
}

std::vector<double> exit_rates(const ParametricCtmc& chain, std::span<const double> v) {
  std::vector<double> exits(chain.state_count(), 0.0);
  for (const auto& t : chain.transitions()) exits[t.source] += t.rate.evaluate(v);
  return exits;
}

// Coefficient weight of a source state in the update polynomial.
std::vector<double> state_weights(const ParametricCtmc& chain, std::span<const double> v, const Accumulators& acc) {
  if (acc.gamma_hat.size() != chain.state_count() || acc.xi.size() != chain.transition_count())
    throw DimensionError("accumulators do not match the chain");
  if (acc.kind == ObservationKind::Timed) {
    if (acc.gamma_timed.size() != chain.state_count()) throw DimensionError("timed accumulators missing");
    return acc.gamma_timed;
  }
  const auto exits = exit_rates(chain, v);
  std::vector<double> w(chain.state_count(), 0.0);
  for (std::size_t s = 0; s < w.size(); ++s)
    if (exits[s] > 0.0) w[s] = acc.gamma_hat[s] / exits[s];
  return w;
}

unsigned free_degree(const Monomial& m, const std::set<std::size_t>& fixed) {
  unsigned d = 0;
  for (std::size_t i = 0; i < m.exponents.size(); ++i)
    if (!fixed.count(i)) d += m.exponents[i];
  return d;
}

// Update polynomial in z = y / x_m, i.e. sum_rho f_rho(x_m) a_rho_i w_s z^{a_rho} - N.
struct ScaledProblem {
  bool occurs = false;
  double numerator = 0.0;
  std::map<unsigned, double> by_degree;
};

ScaledProblem scaled_problem(const ParametricCtmc& chain, std::span<const double> v, const std::vector<double>& weights,
                             const Accumulators& acc, std::size_t i, const std::set<std::size_t>& fixed) {
  ScaledProblem pb;
  const auto& ts = chain.transitions();
  for (std::size_t rho = 0; rho < ts.size(); ++rho) {
    const auto& m = ts[rho].rate;
    const unsigned a = m.exponents[i];
    if (a == 0) continue;
    pb.occurs = true;
    pb.numerator += acc.xi[rho] * a;
    const double c = m.evaluate(v) * a * weights[ts[rho].source];
    pb.by_degree[free_degree(m, fixed)] += c;
  }
  return pb;
}

MmStep mm_step(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
               const std::set<std::size_t>& fixed, const UpdateOptions& options) {
  if (current.size() != chain.params().size()) throw DimensionError("valuation size mismatch");
  const auto weights = state_weights(chain, current, acc);
  MmStep step;
  step.valuation.assign(current.begin(), current.end());
  step.updates.assign(current.size(), ParamUpdate::Fixed);
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (fixed.count(i)) continue;
    const auto pb = scaled_problem(chain, current, weights, acc, i, fixed);
    if (!pb.occurs) {
      step.updates[i] = ParamUpdate::Unused;
      continue;
    }
    if (pb.numerator == 0.0) {
      step.valuation[i] = options.min_param;
      step.updates[i] = ParamUpdate::Floored;
      continue;
    }
    double total = 0.0;
    for (const auto& [deg, c] : pb.by_degree) total += c;
    if (!(total > 0.0)) {
      step.updates[i] = ParamUpdate::Degenerate;
      continue;
    }
    double next;
    if (options.rule == UpdateRule::Auto && pb.by_degree.size() == 1) {
      const double degree = static_cast<double>(pb.by_degree.begin()->first);
      next = current[i] * std::pow(pb.numerator / total, 1.0 / degree);
      step.updates[i] = ParamUpdate::ClosedForm;
    } else {
      UpdatePolynomial poly;
      poly.constant = -pb.numerator;
      for (const auto& [deg, c] : pb.by_degree) poly.terms.push_back({deg, c});
      next = current[i] * positive_root(poly, options.root_tolerance);
      step.updates[i] = ParamUpdate::RootSolved;
    }
    if (!(next >= options.min_param)) {
      next = options.min_param;
      step.updates[i] = ParamUpdate::Floored;
    }
    step.valuation[i] = next;
  }
  return step;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const char* to_string(ParamUpdate update) noexcept {
  switch (update) {
    case ParamUpdate::Fixed: return "fixed";
    case ParamUpdate::Unused: return "unused";
    case ParamUpdate::ClosedForm: return "closed_form";
    case ParamUpdate::RootSolved: return "root_solved";
    case ParamUpdate::Floored: return "floored";
    case ParamUpdate::Degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(ParamStatus status) noexcept {
  switch (status) {
    case ParamStatus::Estimated: return "estimated";
    case ParamStatus::Fixed: return "fixed";
    case ParamStatus::NotInModel: return "not_in_model";
    case ParamStatus::Floored: return "floored";
    case ParamStatus::Degenerate: return "degenerate";
  }
  return "?";
}

Accumulators accumulate(const ParametricCtmc& chain, std::span<const double> valuation, const Dataset& data,
                        std::size_t workers) {
  const ConcreteCtmc concrete = instantiate(chain, valuation);
  const LabelIndex index(concrete.labels());
  const bool timed = data.kind() == ObservationKind::Timed;
  std::vector<SequenceStats> per(data.size());
  parallel_for(data.size(), workers, [&](std::size_t j) {
    if (timed) {
      const auto& o = data.timed()[j];
      per[j] = sequence_stats(forward_backward(concrete, index, o), concrete, o.dwells.data());
    } else {
      const auto& o = data.untimed()[j];
      per[j] = sequence_stats(forward_backward(concrete, index, o), concrete, nullptr);
    }
  });

  Accumulators acc;
  acc.kind = data.kind();
  acc.gamma_timed.assign(timed ? chain.state_count() : 0, 0.0);
  acc.gamma_hat.assign(chain.state_count(), 0.0);
  acc.xi.assign(chain.transition_count(), 0.0);
  for (std::size_t j = 0; j < per.size(); ++j) {
    const auto& st = per[j];
    if (!std::isfinite(st.loglik))
      throw EstimationError("observation " + std::to_string(j) + " has zero likelihood under the current parameters",
                            j);
    acc.loglik += st.loglik;
    for (std::size_t s = 0; s < st.gamma_timed.size(); ++s) acc.gamma_timed[s] += st.gamma_timed[s];
    for (std::size_t s = 0; s < st.gamma_hat.size(); ++s) acc.gamma_hat[s] += st.gamma_hat[s];
    for (std::size_t r = 0; r < st.xi.size(); ++r) acc.xi[r] += st.xi[r];
  }
  return acc;
}

UpdatePolynomial update_polynomial(const ParametricCtmc& chain, std::span<const double> current,
                                   const Accumulators& acc, std::size_t parameter,
                                   const std::set<std::size_t>& fixed) {
  if (parameter >= current.size()) throw DimensionError("parameter index out of range");
  const auto weights = state_weights(chain, current, acc);
  const auto pb = scaled_problem(chain, current, weights, acc, parameter, fixed);
  UpdatePolynomial poly;
  poly.constant = -pb.numerator;
  for (const auto& [deg, c] : pb.by_degree)
    poly.terms.push_back({deg, c / std::pow(current[parameter], static_cast<double>(deg))});
  return poly;
}

MmStep mm_step_timed(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                     const std::set<std::size_t>& fixed, const UpdateOptions& options) {
  if (acc.kind != ObservationKind::Timed) throw ConfigError("mm_step_timed needs timed accumulators");
  return mm_step(chain, current, acc, fixed, options);
}

MmStep mm_step_untimed(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                       const std::set<std::size_t>& fixed, const UpdateOptions& options) {
  if (acc.kind != ObservationKind::Untimed) throw ConfigError("mm_step_untimed needs untimed accumulators");
  return mm_step(chain, current, acc, fixed, options);
}

double surrogate(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                 std::span<const double> candidate, const std::set<std::size_t>& fixed) {
  if (candidate.size() != current.size()) throw DimensionError("candidate valuation size mismatch");
  const auto weights = state_weights(chain, current, acc);
  double value = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (fixed.count(i)) continue;
    const auto pb = scaled_problem(chain, current, weights, acc, i, fixed);
    if (!pb.occurs) continue;
    const double ratio = candidate[i] / current[i];
    if (pb.numerator > 0.0) value += pb.numerator * std::log(candidate[i]);
    for (const auto& [deg, c] : pb.by_degree) {
      const double d = static_cast<double>(deg);
      value -= c / d * std::pow(ratio, d);
    }
  }
  return value;
}

void EstimatorConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(min_param > 0.0)) throw ConfigError("min_param must be > 0");
  if (!init.values) {
    if (!(init.lo > 0.0)) throw ConfigError("initial sampling interval must have lo > 0");
    if (!(init.hi >= init.lo)) throw ConfigError("initial sampling interval must have hi >= lo");
  }
}

Valuation initial_valuation(const ParametricCtmc& chain, const InitSpec& init) {
  const auto& params = chain.params();
  Valuation v(params.size(), 0.0);
  if (init.values) {
    if (init.values->size() != params.size()) throw ConfigError("initial valuation has the wrong size");
    v = *init.values;
  } else {
    Rng rng(init.seed);
    for (auto i : params.free_indices()) v[i] = rng.uniform(init.lo, init.hi);
  }
  for (const auto& [i, value] : params.fixed()) v[i] = value;
  return v;
}

EstimationResult fit(const ParametricCtmc& chain, const Dataset& data, const EstimatorConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& params = chain.params();
  const ObservationKind mode = config.mode.value_or(data.kind());
  if (mode == ObservationKind::Timed && data.kind() != ObservationKind::Timed)
    throw ConfigError("timed estimation needs a timed dataset");
  const Dataset untimed_copy = (mode == ObservationKind::Untimed && data.kind() == ObservationKind::Timed)
                                   ? data.without_times()
                                   : data;
  const Dataset& used = untimed_copy;
  const std::size_t workers = config.workers ? config.workers : default_worker_count();

  EstimationResult result;
  result.initial = initial_valuation(chain, config.init);
  result.status.assign(params.size(), ParamStatus::Estimated);

  std::set<std::size_t> fixed;
  for (const auto& [i, value] : params.fixed()) {
    fixed.insert(i);
    result.status[i] = ParamStatus::Fixed;
  }
  for (auto i : params.free_indices()) {
    bool occurs = false;
    for (const auto& t : chain.transitions()) occurs = occurs || t.rate.exponents[i] > 0;
    if (!occurs) {
      fixed.insert(i);
      result.status[i] = ParamStatus::NotInModel;
      result.warnings.push_back("parameter '" + params.name(i) + "' occurs in no transition; kept at its initial value");
      continue;
    }
    if (!(result.initial[i] > 0.0))
      throw ConfigError("initial value of free parameter '" + params.name(i) + "' must be > 0");
  }

  UpdateOptions options;
  options.min_param = config.min_param;
  options.rule = config.rule;

  Valuation v = result.initial;
  for (std::size_t m = 0;; ++m) {
    const Accumulators acc = accumulate(chain, v, used, workers);
    result.loglik_trace.push_back(acc.loglik);
    if (m > 0 && acc.loglik - result.loglik_trace[m - 1] <= config.epsilon) {
      result.converged = true;
      break;
    }
    if (m == config.max_iters) break;
    MmStep step = mode == ObservationKind::Timed ? mm_step_timed(chain, v, acc, fixed, options)
                                                 : mm_step_untimed(chain, v, acc, fixed, options);
    for (std::size_t i = 0; i < step.updates.size(); ++i) {
      if (result.status[i] != ParamStatus::Estimated) continue;
      if (step.updates[i] == ParamUpdate::Floored) result.status[i] = ParamStatus::Floored;
      if (step.updates[i] == ParamUpdate::Degenerate) result.status[i] = ParamStatus::Degenerate;
    }
    v = std::move(step.valuation);
    result.iterations = m + 1;
  }
  result.valuation = std::move(v);
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace ctmcfit
