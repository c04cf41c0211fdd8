#include "ctmcfit/forward_backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctmcfit/errors.hpp"

namespace ctmcfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kConsistencyTolerance = 1e-9;

double log_omega(const ConcreteCtmc& chain, std::size_t s, std::size_t t, std::size_t k, const double* dwells) {
  const double exit = chain.exit(s);
  if (t == k) return 0.0;
  if (exit == 0.0) return kNegInf;
  if (dwells == nullptr) return 0.0;
  return std::log(exit) - exit * dwells[t];
}

FbTables impossible(std::size_t states, std::size_t length) {
  FbTables tables;
  tables.states = states;
  tables.length = length;
  tables.alpha.assign(states * length, 0.0);
  tables.beta.assign(states * length, 0.0);
  tables.emission.assign(states * length, 0.0);
  tables.log_scale.assign(length, 0.0);
  tables.normalizer.assign(length, 0.0);
  tables.loglik = kNegInf;
  return tables;
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Unscaled recurrences in the log domain; slower, used only when scaling underflows.
FbTables run_log(const ConcreteCtmc& chain, const LabelIndex& index, const std::vector<Label>& labels,
                 const double* dwells) {
  const std::size_t n = chain.state_count();
  const std::size_t length = labels.size();
  const std::size_t k = length - 1;
  const auto& edges = chain.edges();
  const auto& exits = chain.exit_rates();
  std::vector<double> log_step(edges.size(), kNegInf);
  for (std::size_t r = 0; r < edges.size(); ++r)
    if (edges[r].rate > 0.0) log_step[r] = std::log(edges[r].rate) - std::log(exits[edges[r].source]);

  FbTables tb;
  tb.states = n;
  tb.length = length;
  tb.log_emission.assign(n * length, kNegInf);
  for (std::size_t t = 0; t < length; ++t)
    for (auto s : index.states_with(labels[t])) tb.log_emission[t * n + s] = log_omega(chain, s, t, k, dwells);

  tb.log_alpha.assign(n * length, kNegInf);
  for (std::size_t s = 0; s < n; ++s)
    if (chain.initial()[s] > 0.0) tb.log_alpha[s] = std::log(chain.initial()[s]) + tb.log_emission[s];
  for (std::size_t t = 1; t < length; ++t) {
    const double* prev = &tb.log_alpha[(t - 1) * n];
    double* cur = &tb.log_alpha[t * n];
    for (std::size_t r = 0; r < edges.size(); ++r)
      cur[edges[r].target] = log_sum_exp(cur[edges[r].target], prev[edges[r].source] + log_step[r]);
    for (std::size_t s = 0; s < n; ++s) cur[s] += tb.log_emission[t * n + s];
  }
  double loglik = kNegInf;
  for (std::size_t s = 0; s < n; ++s) loglik = log_sum_exp(loglik, tb.log_alpha[k * n + s]);
  if (loglik == kNegInf || std::isnan(loglik)) return impossible(n, length);

  tb.log_beta.assign(n * length, kNegInf);
  std::fill(tb.log_beta.begin() + static_cast<std::ptrdiff_t>(k * n), tb.log_beta.end(), 0.0);
  for (std::size_t t = k; t-- > 0;) {
    const double* next = &tb.log_beta[(t + 1) * n];
    const double* em = &tb.log_emission[(t + 1) * n];
    double* cur = &tb.log_beta[t * n];
    for (std::size_t r = 0; r < edges.size(); ++r)
      cur[edges[r].source] =
          log_sum_exp(cur[edges[r].source], log_step[r] + em[edges[r].target] + next[edges[r].target]);
  }

  // Scaled views: alpha normalized per step, beta to match.
  tb.alpha.assign(n * length, 0.0);
  tb.beta.assign(n * length, 0.0);
  tb.emission.assign(n * length, 0.0);
  tb.normalizer.assign(length, 0.0);
  tb.log_scale.assign(length, 0.0);
  double cumulative = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    double mass = kNegInf, best = kNegInf;
    for (std::size_t s = 0; s < n; ++s) {
      mass = log_sum_exp(mass, tb.log_alpha[t * n + s]);
      best = std::max(best, tb.log_emission[t * n + s]);
    }
    tb.log_scale[t] = mass - cumulative;
    cumulative = mass;
    tb.normalizer[t] = std::exp(tb.log_scale[t] - best);
    for (std::size_t s = 0; s < n; ++s) {
      tb.alpha[t * n + s] = std::exp(tb.log_alpha[t * n + s] - mass);
      tb.beta[t * n + s] = std::exp(tb.log_beta[t * n + s] + mass - loglik);
      tb.emission[t * n + s] = std::exp(tb.log_emission[t * n + s] - best);
    }
  }
  tb.loglik = loglik;

  const double err = tb.consistency_error();
  if (!(err <= kConsistencyTolerance))
    throw NumericalError("log-domain forward/backward tables are inconsistent (error " + std::to_string(err) + ")");
  return tb;
}

// dwells == nullptr selects the untimed emission.
FbTables run(const ConcreteCtmc& chain, const LabelIndex& index, const std::vector<Label>& labels,
             const double* dwells) {
  const std::size_t n = chain.state_count();
  const std::size_t length = labels.size();
  if (length == 0) throw ModelError("observation has no labels");
  const std::size_t k = length - 1;

  FbTables tb;
  tb.states = n;
  tb.length = length;
  tb.emission.assign(n * length, 0.0);
  tb.log_scale.assign(length, 0.0);
  tb.normalizer.assign(length, 0.0);

  // The offset at t is the largest log emission among states that carry
  // forward mass, so reachable states never underflow against unreachable ones.
  std::vector<double> offset(length, 0.0);
  const auto& edges = chain.edges();
  const auto& exits = chain.exit_rates();
  tb.alpha.assign(n * length, 0.0);
  std::vector<double> scale(length, 0.0);

  for (std::size_t t = 0; t < length; ++t) {
    double* cur = &tb.alpha[t * n];
    if (t == 0) {
      for (std::size_t s = 0; s < n; ++s) cur[s] = chain.initial()[s];
    } else {
      const double* prev = &tb.alpha[(t - 1) * n];
      for (const auto& e : edges) {
        const double a = prev[e.source];
        if (a != 0.0) cur[e.target] += a * (e.rate / exits[e.source]);
      }
    }
    const auto& matching = index.states_with(labels[t]);
    double best = kNegInf;
    for (auto s : matching)
      if (cur[s] > 0.0) best = std::max(best, log_omega(chain, s, t, k, dwells));
    if (best == kNegInf) return t == 0 ? impossible(n, length) : run_log(chain, index, labels, dwells);
    offset[t] = best;
    double* em = &tb.emission[t * n];
    for (auto s : matching) {
      const double lw = log_omega(chain, s, t, k, dwells);
      if (lw != kNegInf) em[s] = std::exp(lw - best);
    }
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      cur[s] *= em[s];
      total += cur[s];
    }
    if (!(total > 0.0)) return run_log(chain, index, labels, dwells);
    scale[t] = total;
    for (std::size_t s = 0; s < n; ++s) cur[s] /= total;
  }

  tb.beta.assign(n * length, 0.0);
  std::fill(tb.beta.begin() + static_cast<std::ptrdiff_t>(k * n), tb.beta.end(), 1.0);
  for (std::size_t t = k; t-- > 0;) {
    const double* next = &tb.beta[(t + 1) * n];
    const double* em = &tb.emission[(t + 1) * n];
    double* cur = &tb.beta[t * n];
    for (const auto& e : edges) {
      const double w = em[e.target] * next[e.target];
      if (w == 0.0) continue;
      cur[e.source] += (e.rate / exits[e.source]) * w;
    }
    const double inv = 1.0 / scale[t + 1];
    for (std::size_t s = 0; s < n; ++s) cur[s] *= inv;
  }

  tb.loglik = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    tb.log_scale[t] = std::log(scale[t]) + offset[t];
    tb.normalizer[t] = scale[t];
    tb.loglik += tb.log_scale[t];
  }

  const double err = tb.consistency_error();
  if (!(err <= kConsistencyTolerance))
    throw NumericalError("forward/backward tables are inconsistent (error " + std::to_string(err) + ")");
  return tb;
}

}  // namespace

std::size_t LabelHash::operator()(const Label& label) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (auto v : label) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

LabelIndex::LabelIndex(const std::vector<Label>& labels) {
  for (std::size_t s = 0; s < labels.size(); ++s) by_label_[labels[s]].push_back(s);
}

const std::vector<std::size_t>& LabelIndex::states_with(const Label& label) const {
  auto it = by_label_.find(label);
  return it == by_label_.end() ? none_ : it->second;
}

double omega(std::size_t state, std::size_t t, const TimedObservation& o, const ConcreteCtmc& chain) {
  if (t >= o.labels.size()) throw DimensionError("time index beyond observation");
  if (chain.label(state) != o.labels[t]) return 0.0;
  if (t + 1 == o.labels.size()) return 1.0;
  const double exit = chain.exit(state);
  return exit * std::exp(-exit * o.dwells.at(t));
}

double omega(std::size_t state, std::size_t t, const UntimedObservation& o, const ConcreteCtmc& chain) {
  if (t >= o.labels.size()) throw DimensionError("time index beyond observation");
  if (chain.label(state) != o.labels[t]) return 0.0;
  if (t + 1 == o.labels.size()) return 1.0;
  return chain.exit(state) > 0.0 ? 1.0 : 0.0;
}

bool FbTables::possible() const noexcept { return loglik != kNegInf; }

double FbTables::consistency_error() const {
  if (!possible()) return 0.0;
  double worst = 0.0;
  if (log_domain()) {
    for (std::size_t t = 0; t < length; ++t) {
      double z = kNegInf;
      for (std::size_t s = 0; s < states; ++s)
        z = log_sum_exp(z, log_alpha[t * states + s] + log_beta[t * states + s]);
      worst = std::max(worst, std::abs(std::expm1(z - loglik)));
    }
    return worst;
  }
  for (std::size_t t = 0; t < length; ++t) {
    double z = 0.0;
    for (std::size_t s = 0; s < states; ++s) z += alpha[t * states + s] * beta[t * states + s];
    worst = std::max(worst, std::abs(z - 1.0));
  }
  return worst;
}

FbTables forward_backward(const ConcreteCtmc& chain, const LabelIndex& index, const TimedObservation& o) {
  o.validate();
  return run(chain, index, o.labels, o.dwells.data());
}

FbTables forward_backward(const ConcreteCtmc& chain, const LabelIndex& index, const UntimedObservation& o) {
  o.validate();
  return run(chain, index, o.labels, nullptr);
}

FbTables forward_backward(const ConcreteCtmc& chain, const TimedObservation& o) {
  return forward_backward(chain, LabelIndex(chain.labels()), o);
}

FbTables forward_backward(const ConcreteCtmc& chain, const UntimedObservation& o) {
  return forward_backward(chain, LabelIndex(chain.labels()), o);
}

Posteriors posteriors(const FbTables& tables, const ConcreteCtmc& chain) {
  if (tables.states != chain.state_count()) throw DimensionError("tables and chain disagree on state count");
  const std::size_t n = tables.states;
  const auto& edges = chain.edges();
  Posteriors post;
  post.states = n;
  post.edges = edges.size();
  post.length = tables.length;
  post.gamma.assign(n * tables.length, 0.0);
  post.xi.assign(edges.size() * (tables.length ? tables.length - 1 : 0), 0.0);
  if (!tables.possible()) return post;

  if (tables.log_domain()) {
    for (std::size_t t = 0; t < tables.length; ++t) {
      for (std::size_t s = 0; s < n; ++s)
        post.gamma[t * n + s] = std::exp(tables.log_alpha[t * n + s] + tables.log_beta[t * n + s] - tables.loglik);
      if (t + 1 == tables.length) break;
      for (std::size_t rho = 0; rho < edges.size(); ++rho) {
        const auto& e = edges[rho];
        if (!(e.rate > 0.0)) continue;
        const double lw = tables.log_alpha[t * n + e.source] + std::log(e.rate) - std::log(chain.exit(e.source)) +
                          tables.log_emission[(t + 1) * n + e.target] + tables.log_beta[(t + 1) * n + e.target];
        post.xi[t * edges.size() + rho] = std::exp(lw - tables.loglik);
      }
    }
    return post;
  }

  for (std::size_t t = 0; t < tables.length; ++t) {
    double z = 0.0;
    for (std::size_t s = 0; s < n; ++s) z += tables.alpha_at(s, t) * tables.beta_at(s, t);
    for (std::size_t s = 0; s < n; ++s) post.gamma[t * n + s] = tables.alpha_at(s, t) * tables.beta_at(s, t) / z;
    if (t + 1 == tables.length) break;
    const double inv = 1.0 / (z * tables.normalizer[t + 1]);
    const double* a = &tables.alpha[t * n];
    const double* b = &tables.beta[(t + 1) * n];
    const double* em = &tables.emission[(t + 1) * n];
    double* xi = &post.xi[t * edges.size()];
    for (std::size_t rho = 0; rho < edges.size(); ++rho) {
      const auto& e = edges[rho];
      const double w = a[e.source] * em[e.target] * b[e.target];
      if (w == 0.0) continue;
      xi[rho] = w * (e.rate / chain.exit(e.source)) * inv;
    }
  }
  return post;
}

}  // namespace ctmcfit
