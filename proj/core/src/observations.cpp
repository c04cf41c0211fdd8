#include "ctmcfit/observations.hpp"

#include <cmath>

#include "ctmcfit/errors.hpp"
#include "ctmcfit/parallel.hpp"

namespace ctmcfit {

void TimedObservation::validate() const {
  if (labels.empty()) throw ModelError("observation has no labels");
  if (dwells.size() + 1 != labels.size()) throw ModelError("observation needs exactly one dwell per jump");
  for (double d : dwells)
    if (!(d > 0.0) || !std::isfinite(d)) throw ModelError("dwell times must be positive and finite");
}

void UntimedObservation::validate() const {
  if (labels.empty()) throw ModelError("observation has no labels");
}

const char* to_string(ObservationKind kind) noexcept {
  return kind == ObservationKind::Timed ? "timed" : "untimed";
}

Dataset::Dataset(std::vector<TimedObservation> sequences, std::vector<std::string> observables)
    : kind_(ObservationKind::Timed), observables_(std::move(observables)), timed_(std::move(sequences)) {
  if (timed_.empty()) throw ModelError("dataset must contain at least one observation");
  for (const auto& o : timed_) o.validate();
}

Dataset::Dataset(std::vector<UntimedObservation> sequences, std::vector<std::string> observables)
    : kind_(ObservationKind::Untimed), observables_(std::move(observables)), untimed_(std::move(sequences)) {
  if (untimed_.empty()) throw ModelError("dataset must contain at least one observation");
  for (const auto& o : untimed_) o.validate();
}

std::size_t Dataset::size() const noexcept {
  return kind_ == ObservationKind::Timed ? timed_.size() : untimed_.size();
}

const std::vector<TimedObservation>& Dataset::timed() const {
  if (kind_ != ObservationKind::Timed) throw ModelError("dataset is untimed");
  return timed_;
}

const std::vector<UntimedObservation>& Dataset::untimed() const {
  if (kind_ != ObservationKind::Untimed) throw ModelError("dataset is timed");
  return untimed_;
}

std::set<Label> Dataset::alphabet() const {
  std::set<Label> out;
  for (const auto& o : timed_) out.insert(o.labels.begin(), o.labels.end());
  for (const auto& o : untimed_) out.insert(o.labels.begin(), o.labels.end());
  return out;
}

Dataset Dataset::without_times() const {
  if (kind_ == ObservationKind::Untimed) return *this;
  std::vector<UntimedObservation> seqs;
  seqs.reserve(timed_.size());
  for (const auto& o : timed_) seqs.push_back(strip_times(o));
  return Dataset(std::move(seqs), observables_);
}

UntimedObservation strip_times(const TimedObservation& observation) { return {observation.labels}; }

std::size_t sample_index(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double pick = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    cumulative += weights[i];
    if (pick < cumulative) return i;
  }
  return last_positive;
}

TimedObservation simulate(const ConcreteCtmc& chain, const SimulationLimits& limits, Rng& rng) {
  const std::size_t start = sample_index(chain.initial(), rng);
  auto successors = [&chain](std::size_t s) {
    std::vector<std::pair<std::size_t, double>> out;
    for (auto i : chain.outgoing(s)) out.emplace_back(chain.edges()[i].target, chain.edges()[i].rate);
    return out;
  };
  auto label_of = [&chain](std::size_t s) { return chain.label(s); };
  return simulate_walk(start, successors, label_of, limits, rng);
}

TimedObservation simulate(const ConcreteCtmc& chain, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  return simulate(chain, SimulationLimits{steps}, rng);
}

std::vector<TimedObservation> simulate_many(const ConcreteCtmc& chain, std::size_t sequences,
                                            const SimulationLimits& limits, std::uint64_t seed,
                                            std::size_t workers) {
  std::vector<TimedObservation> out(sequences);
  parallel_for(sequences, workers, [&](std::size_t j) {
    Rng rng(seed, j);
    out[j] = simulate(chain, limits, rng);
  });
  return out;
}

}  // namespace ctmcfit
