#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctmcfit/ctmc.hpp"
#include "ctmcfit/rng.hpp"

namespace ctmcfit {

/// l0 t0 l1 ... t(k-1) lk: labels and the dwell time spent before each jump.
struct TimedObservation {
  std::vector<Label> labels;
  std::vector<double> dwells;

  std::size_t steps() const noexcept { return labels.empty() ? 0 : labels.size() - 1; }
  /// Throws ModelError unless dwells.size() == labels.size() - 1 and every dwell > 0.
  void validate() const;

  friend bool operator==(const TimedObservation&, const TimedObservation&) = default;
};

struct UntimedObservation {
  std::vector<Label> labels;

  std::size_t steps() const noexcept { return labels.empty() ? 0 : labels.size() - 1; }
  void validate() const;

  friend bool operator==(const UntimedObservation&, const UntimedObservation&) = default;
};

enum class ObservationKind { Timed, Untimed };

const char* to_string(ObservationKind kind) noexcept;

/// J >= 1 i.i.d. observation sequences of one kind.
class Dataset {
 public:
  explicit Dataset(std::vector<TimedObservation> sequences, std::vector<std::string> observables = {});
  explicit Dataset(std::vector<UntimedObservation> sequences, std::vector<std::string> observables = {});

  ObservationKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept;
  const std::vector<std::string>& observables() const noexcept { return observables_; }

  /// Throws ModelError when the dataset holds the other kind.
  const std::vector<TimedObservation>& timed() const;
  const std::vector<UntimedObservation>& untimed() const;

  std::set<Label> alphabet() const;
  /// Untimed copy (identity on untimed datasets).
  Dataset without_times() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  ObservationKind kind_;
  std::vector<std::string> observables_;
  std::vector<TimedObservation> timed_;
  std::vector<UntimedObservation> untimed_;
};

UntimedObservation strip_times(const TimedObservation& observation);

/// Stop conditions for a simulated path.
struct SimulationLimits {
  std::size_t max_steps = 0;
  /// Drop the jump that would push the cumulative time past this horizon.
  double horizon = std::numeric_limits<double>::infinity();
};

/// Walk a CTMC given its successor relation.
///
/// `successors(state)` returns (target, rate) pairs; `label_of(state)` the
/// state's label. Each step draws the dwell from Exp(E(s)) and then the
/// successor with probability rate/E(s). Stops early at absorbing states.
template <class State, class SuccessorFn, class LabelFn>
TimedObservation simulate_walk(State state, SuccessorFn&& successors, LabelFn&& label_of,
                               const SimulationLimits& limits, Rng& rng) {
  TimedObservation obs;
  obs.labels.push_back(label_of(state));
  double clock = 0.0;
  for (std::size_t step = 0; step < limits.max_steps; ++step) {
    const auto out = successors(state);
    double exit = 0.0;
    for (const auto& [target, rate] : out) exit += rate;
    if (!(exit > 0.0)) break;
    const double dwell = rng.exponential(exit);
    const double pick = rng.uniform() * exit;
    if (clock + dwell > limits.horizon) break;
    std::size_t chosen = out.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      cumulative += out[i].second;
      if (pick < cumulative && out[i].second > 0.0) {
        chosen = i;
        break;
      }
    }
    clock += dwell;
    state = out[chosen].first;
    obs.dwells.push_back(dwell);
    obs.labels.push_back(label_of(state));
  }
  return obs;
}

/// Sample an index from a discrete distribution with one uniform draw.
std::size_t sample_index(const std::vector<double>& weights, Rng& rng);

TimedObservation simulate(const ConcreteCtmc& chain, std::size_t steps, std::uint64_t seed);
TimedObservation simulate(const ConcreteCtmc& chain, const SimulationLimits& limits, Rng& rng);

/// J sequences; sequence j uses the stream Rng(seed, j), so output does not
/// depend on the worker count.
std::vector<TimedObservation> simulate_many(const ConcreteCtmc& chain, std::size_t sequences,
                                            const SimulationLimits& limits, std::uint64_t seed,
                                            std::size_t workers = 1);

}  // namespace ctmcfit
