#include "ctmcfit/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ctmcfit/errors.hpp"

namespace ctmcfit {

namespace {

template <class EdgeT>
void index_outgoing(std::size_t states, const std::vector<EdgeT>& edges,
                    std::vector<std::size_t>& offsets, std::vector<std::size_t>& index) {
  offsets.assign(states + 1, 0);
  for (const auto& e : edges) ++offsets[e.source + 1];
  for (std::size_t s = 0; s < states; ++s) offsets[s + 1] += offsets[s];
  index.assign(edges.size(), 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) index[cursor[edges[i].source]++] = i;
}

void check_initial(const std::vector<double>& initial, std::size_t states) {
  if (initial.size() != states) throw DimensionError("initial distribution size != state count");
  double total = 0.0;
  for (double p : initial) {
    if (!(p >= 0.0)) throw ModelError("initial distribution has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ModelError("initial distribution does not sum to 1");
}

}  // namespace

ParametricCtmc::ParametricCtmc(ParamSpace params, std::vector<Label> labels, std::vector<double> initial,
                               std::vector<Transition> transitions)
    : params_(std::move(params)),
      labels_(std::move(labels)),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)) {
  check_initial(initial_, labels_.size());
  for (const auto& t : transitions_) {
    if (t.source >= labels_.size() || t.target >= labels_.size())
      throw ModelError("transition endpoint out of range");
    if (t.rate.exponents.size() != params_.size()) throw DimensionError("monomial arity mismatch");
    if (!(t.rate.coeff > 0.0)) throw ModelError("transition with nonpositive coefficient");
  }
  index_outgoing(labels_.size(), transitions_, out_offsets_, out_index_);
}

std::span<const std::size_t> ParametricCtmc::outgoing(std::size_t state) const {
  return {out_index_.data() + out_offsets_.at(state), out_offsets_.at(state + 1) - out_offsets_[state]};
}

ParametricCtmc ParametricCtmc::with_params(ParamSpace params) const {
  if (params.names() != params_.names()) throw DimensionError("with_params: different parameter names");
  ParametricCtmc copy = *this;
  copy.params_ = std::move(params);
  return copy;
}

ParametricCtmc normalize_transitions(ParamSpace params, std::vector<Label> labels,
                                     std::vector<double> initial, const std::vector<RateEdge>& edges) {
  std::vector<Transition> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.rate.arity() != params.size()) throw DimensionError("edge rate arity mismatch");
    for (const auto& m : e.rate.terms()) {
      if (m.coeff == 0.0) continue;
      out.push_back(Transition{e.source, e.target, m});
    }
  }
  return ParametricCtmc(std::move(params), std::move(labels), std::move(initial), std::move(out));
}

ConcreteCtmc::ConcreteCtmc(std::vector<Label> labels, std::vector<double> initial, std::vector<ConcreteEdge> edges)
    : labels_(std::move(labels)), initial_(std::move(initial)), edges_(std::move(edges)) {
  check_initial(initial_, labels_.size());
  exit_.assign(labels_.size(), 0.0);
  for (const auto& e : edges_) {
    if (e.source >= labels_.size() || e.target >= labels_.size())
      throw ModelError("edge endpoint out of range");
    if (!(e.rate >= 0.0) || !std::isfinite(e.rate)) throw ModelError("edge with invalid rate");
    exit_[e.source] += e.rate;
  }
  index_outgoing(labels_.size(), edges_, out_offsets_, out_index_);
}

std::span<const std::size_t> ConcreteCtmc::outgoing(std::size_t state) const {
  return {out_index_.data() + out_offsets_.at(state), out_offsets_.at(state + 1) - out_offsets_[state]};
}

double ConcreteCtmc::rate(std::size_t source, std::size_t target) const {
  double sum = 0.0;
  for (auto i : outgoing(source))
    if (edges_[i].target == target) sum += edges_[i].rate;
  return sum;
}

ConcreteCtmc instantiate(const ParametricCtmc& chain, std::span<const double> valuation) {
  if (valuation.size() != chain.params().size())
    throw DimensionError("valuation has " + std::to_string(valuation.size()) + " entries, expected " +
                         std::to_string(chain.params().size()));
  for (double v : valuation)
    if (!(v >= 0.0)) throw ModelError("valuation entries must be nonnegative");
  std::vector<ConcreteEdge> edges;
  edges.reserve(chain.transition_count());
  for (const auto& t : chain.transitions())
    edges.push_back(ConcreteEdge{t.source, t.target, t.rate.evaluate(valuation)});
  return ConcreteCtmc(chain.labels(), chain.initial(), std::move(edges));
}

double StochasticMatrix::at(std::size_t row, std::size_t column) const {
  auto begin = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets.at(row));
  auto end = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets.at(row + 1));
  auto it = std::lower_bound(begin, end, column);
  if (it == end || *it != column) return 0.0;
  return values[static_cast<std::size_t>(it - columns.begin())];
}

double StochasticMatrix::row_sum(std::size_t row) const {
  double sum = 0.0;
  for (std::size_t i = row_offsets.at(row); i < row_offsets.at(row + 1); ++i) sum += values[i];
  return sum;
}

StochasticMatrix embedded_dtmc(const ConcreteCtmc& chain) {
  StochasticMatrix p;
  p.rows = chain.state_count();
  p.row_offsets.push_back(0);
  for (std::size_t s = 0; s < p.rows; ++s) {
    const double exit = chain.exit(s);
    if (exit == 0.0) {
      p.columns.push_back(s);
      p.values.push_back(1.0);
    } else {
      std::map<std::size_t, double> row;
      for (auto i : chain.outgoing(s)) row[chain.edges()[i].target] += chain.edges()[i].rate;
      for (const auto& [target, rate] : row) {
        p.columns.push_back(target);
        p.values.push_back(rate / exit);
      }
    }
    p.row_offsets.push_back(p.columns.size());
  }
  return p;
}

}  // namespace ctmcfit
