#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctmcfit/param_space.hpp"
#include "ctmcfit/rate_expr.hpp"

namespace ctmcfit {

/// Observable state label: a tuple of observable-variable values.
using Label = std::vector<std::int64_t>;

/// Parametric transition carrying a single monomial rate.
struct Transition {
  std::size_t source = 0;
  std::size_t target = 0;
  Monomial rate;
};

/// Parametric edge with an arbitrary polynomial rate, before normalization.
struct RateEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  RateExpr rate;
};

/// Parametric CTMC (S, ->, pi, l) whose transitions all carry one monomial.
///
/// Every stored monomial is either a positive constant or has a positive
/// coefficient and at least one positive exponent. Parallel transitions
/// between the same pair of states are allowed; the rate function is their sum.
class ParametricCtmc {
 public:
  ParametricCtmc(ParamSpace params, std::vector<Label> labels, std::vector<double> initial,
                 std::vector<Transition> transitions);

  const ParamSpace& params() const noexcept { return params_; }
  std::size_t state_count() const noexcept { return labels_.size(); }
  std::size_t transition_count() const noexcept { return transitions_.size(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<double>& initial() const noexcept { return initial_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  /// Indices of transitions leaving `state`, in insertion order.
  std::span<const std::size_t> outgoing(std::size_t state) const;

  /// Same chain with a different set of fixed parameters.
  ParametricCtmc with_params(ParamSpace params) const;

 private:
  ParamSpace params_;
  std::vector<Label> labels_;
  std::vector<double> initial_;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> out_index_;
};

/// Split multi-monomial edges into one transition per monomial and drop zero rates.
ParametricCtmc normalize_transitions(ParamSpace params, std::vector<Label> labels,
                                     std::vector<double> initial, const std::vector<RateEdge>& edges);

struct ConcreteEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  double rate = 0.0;
};

/// Instantiated CTMC with numeric rates and cached exit rates.
///
/// Edges keep the indexing of the parametric transitions they came from.
class ConcreteCtmc {
 public:
  ConcreteCtmc(std::vector<Label> labels, std::vector<double> initial, std::vector<ConcreteEdge> edges);

  std::size_t state_count() const noexcept { return labels_.size(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const Label& label(std::size_t s) const { return labels_.at(s); }
  const std::vector<double>& initial() const noexcept { return initial_; }
  const std::vector<ConcreteEdge>& edges() const noexcept { return edges_; }
  std::span<const std::size_t> outgoing(std::size_t state) const;

  /// R(s, s'), the sum of all edges from s to s'.
  double rate(std::size_t source, std::size_t target) const;
  double exit(std::size_t state) const { return exit_.at(state); }
  const std::vector<double>& exit_rates() const noexcept { return exit_; }
  bool absorbing(std::size_t state) const { return exit_.at(state) == 0.0; }

 private:
  std::vector<Label> labels_;
  std::vector<double> initial_;
  std::vector<ConcreteEdge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> out_index_;
  std::vector<double> exit_;
};

/// P(v): the CTMC obtained by plugging a nonnegative valuation into every rate.
ConcreteCtmc instantiate(const ParametricCtmc& chain, std::span<const double> valuation);

/// Row-stochastic matrix in compressed-row form.
struct StochasticMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_offsets;  // size rows + 1
  std::vector<std::size_t> columns;
  std::vector<double> values;

  double at(std::size_t row, std::size_t column) const;
  double row_sum(std::size_t row) const;
};

/// Jump chain: P(s,s') = R(s,s')/E(s), absorbing states loop on themselves.
StochasticMatrix embedded_dtmc(const ConcreteCtmc& chain);

}  // namespace ctmcfit
