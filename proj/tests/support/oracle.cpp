#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace ctmcfit::testing {

namespace {

struct PathTables {
  std::vector<std::vector<double>> rate;  // aggregated R(s, t)
  std::vector<double> exit;
};

PathTables tables(const ParametricCtmc& chain, std::span<const double> v) {
  const std::size_t n = chain.state_count();
  PathTables t{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)), std::vector<double>(n, 0.0)};
  for (const auto& tr : chain.transitions()) {
    double r = tr.rate.coeff;
    for (std::size_t i = 0; i < v.size(); ++i) r *= std::pow(v[i], static_cast<double>(tr.rate.exponents[i]));
    t.rate[tr.source][tr.target] += r;
    t.exit[tr.source] += r;
  }
  return t;
}

template <class StepWeight>
double enumerate(const ParametricCtmc& chain, const std::vector<Label>& labels, StepWeight&& step) {
  const std::size_t n = chain.state_count();
  const std::size_t k = labels.size() - 1;
  std::vector<std::size_t> path(k + 1, 0);
  long double total = 0.0L;
  for (;;) {
    long double w = chain.initial()[path[0]];
    for (std::size_t t = 0; t <= k && w != 0.0L; ++t) {
      if (chain.labels()[path[t]] != labels[t]) w = 0.0L;
      else if (t < k) w *= step(t, path[t], path[t + 1]);
    }
    total += w;
    std::size_t pos = 0;
    while (pos <= k && ++path[pos] == n) path[pos++] = 0;
    if (pos > k) break;
  }
  return static_cast<double>(total);
}

template <class StepWeight>
PathStatistics statistics(const ParametricCtmc& chain, std::span<const double> v, const std::vector<Label>& labels,
                          const std::vector<double>* dwells, StepWeight&& step) {
  const std::size_t n = chain.state_count();
  const std::size_t k = labels.size() - 1;
  const auto tab = tables(chain, v);
  std::vector<long double> rate(chain.transition_count());
  for (std::size_t r = 0; r < rate.size(); ++r) {
    const auto& tr = chain.transitions()[r];
    long double x = tr.rate.coeff;
    for (std::size_t i = 0; i < v.size(); ++i) x *= std::pow(static_cast<long double>(v[i]), tr.rate.exponents[i]);
    rate[r] = x;
  }
  std::vector<long double> gt(n, 0.0L), gh(n, 0.0L), xi(rate.size(), 0.0L);
  long double total = 0.0L;
  std::vector<std::size_t> path(k + 1, 0);
  for (;;) {
    long double w = chain.initial()[path[0]];
    for (std::size_t t = 0; t <= k && w != 0.0L; ++t) {
      if (chain.labels()[path[t]] != labels[t]) w = 0.0L;
      else if (t < k) w *= step(t, path[t], path[t + 1]);
    }
    if (w != 0.0L) {
      total += w;
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t s = path[t], u = path[t + 1];
        gh[s] += w;
        if (dwells) gt[s] += w * (*dwells)[t];
        for (std::size_t r = 0; r < rate.size(); ++r) {
          const auto& tr = chain.transitions()[r];
          if (tr.source == s && tr.target == u) xi[r] += w * rate[r] / tab.rate[s][u];
        }
      }
    }
    std::size_t pos = 0;
    while (pos <= k && ++path[pos] == n) path[pos++] = 0;
    if (pos > k) break;
  }
  PathStatistics out;
  out.likelihood = static_cast<double>(total);
  auto norm = [&](const std::vector<long double>& in) {
    std::vector<double> o(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) o[i] = total == 0.0L ? 0.0 : static_cast<double>(in[i] / total);
    return o;
  };
  out.gamma_timed = norm(gt);
  out.gamma_hat = norm(gh);
  out.xi = norm(xi);
  return out;
}

}  // namespace

PathStatistics brute_force_statistics(const ParametricCtmc& chain, std::span<const double> v,
                                      const TimedObservation& o) {
  const auto t = tables(chain, v);
  return statistics(chain, v, o.labels, &o.dwells, [&](std::size_t step, std::size_t s, std::size_t u) {
    return static_cast<long double>(t.rate[s][u]) * std::exp(-static_cast<long double>(t.exit[s]) * o.dwells[step]);
  });
}

PathStatistics brute_force_statistics(const ParametricCtmc& chain, std::span<const double> v,
                                      const UntimedObservation& o) {
  const auto t = tables(chain, v);
  return statistics(chain, v, o.labels, nullptr, [&](std::size_t, std::size_t s, std::size_t u) {
    if (t.exit[s] == 0.0) return 0.0L;
    return static_cast<long double>(t.rate[s][u]) / t.exit[s];
  });
}

double brute_force_likelihood(const ParametricCtmc& chain, std::span<const double> v, const TimedObservation& o) {
  const auto t = tables(chain, v);
  return enumerate(chain, o.labels, [&](std::size_t step, std::size_t s, std::size_t u) {
    return static_cast<long double>(t.rate[s][u]) * std::exp(-static_cast<long double>(t.exit[s]) * o.dwells[step]);
  });
}

double brute_force_likelihood(const ParametricCtmc& chain, std::span<const double> v, const UntimedObservation& o) {
  const auto t = tables(chain, v);
  return enumerate(chain, o.labels, [&](std::size_t, std::size_t s, std::size_t u) {
    if (t.exit[s] == 0.0) return 0.0L;
    return static_cast<long double>(t.rate[s][u]) / t.exit[s];
  });
}

ParametricCtmc random_model(Rng& rng, const RandomModelShape& shape) {
  const auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
  };
  const std::size_t n = pick(2, shape.max_states);
  const std::size_t p = pick(1, shape.max_params);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p; ++i) names.push_back("x" + std::to_string(i));

  std::vector<Label> labels(n);
  for (auto& l : labels) l = {static_cast<std::int64_t>(pick(0, shape.labels - 1))};

  std::vector<double> initial(n, 0.0);
  double mass = 0.0;
  for (auto& w : initial) {
    w = rng.uniform() < 0.6 ? rng.uniform(0.1, 1.0) : 0.0;
    mass += w;
  }
  if (mass == 0.0) {
    initial[0] = 1.0;
    mass = 1.0;
  }
  for (auto& w : initial) w /= mass;
  // Normalize so the sum hits 1 to rounding.
  double sum = 0.0;
  for (std::size_t s = 0; s + 1 < n; ++s) sum += initial[s];
  initial[n - 1] = std::max(0.0, 1.0 - sum);

  auto monomial = [&]() {
    Monomial m;
    m.coeff = rng.uniform(0.2, 2.0);
    m.exponents.assign(p, 0);
    if (shape.uniform_degree) {
      m.exponents[pick(0, p - 1)] = 1;
    } else {
      for (auto& e : m.exponents) e = static_cast<unsigned>(pick(0, shape.max_exponent));
    }
    return m;
  };

  std::vector<Transition> transitions;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (rng.uniform() < shape.edge_probability) transitions.push_back({s, t, monomial()});
  if (transitions.empty()) transitions.push_back({0, n - 1, monomial()});
  // Make sure each parameter occurs somewhere.
  for (std::size_t i = 0; i < p; ++i) {
    bool seen = false;
    for (const auto& tr : transitions) seen = seen || tr.rate.exponents[i] > 0;
    if (!seen) {
      Monomial m = monomial();
      std::fill(m.exponents.begin(), m.exponents.end(), 0u);
      m.exponents[i] = 1;
      transitions.push_back({pick(0, n - 1), pick(0, n - 1), m});
    }
  }
  return ParametricCtmc(ParamSpace(names), labels, initial, transitions);
}

Valuation random_valuation(Rng& rng, std::size_t size, double lo, double hi) {
  Valuation v(size);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<TimedObservation> random_sequences(const ParametricCtmc& chain, std::span<const double> valuation,
                                               std::size_t count, std::size_t length, Rng& rng) {
  const ConcreteCtmc concrete = instantiate(chain, valuation);
  std::vector<TimedObservation> out;
  SimulationLimits limits;
  limits.max_steps = length;
  for (std::size_t j = 0; j < count; ++j) out.push_back(simulate(concrete, limits, rng));
  return out;
}

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace ctmcfit::testing
