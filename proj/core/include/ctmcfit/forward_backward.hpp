#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "ctmcfit/ctmc.hpp"
#include "ctmcfit/observations.hpp"

namespace ctmcfit {

struct LabelHash {
  std::size_t operator()(const Label& label) const noexcept;
};

/// States grouped by label, for Iverson-bracket lookups.
class LabelIndex {
 public:
  explicit LabelIndex(const std::vector<Label>& labels);
  /// States carrying `label`; empty when no state does.
  const std::vector<std::size_t>& states_with(const Label& label) const;

 private:
  std::unordered_map<Label, std::vector<std::size_t>, LabelHash> by_label_;
  std::vector<std::size_t> none_;
};

/// omega_s(t): [l(s) = l_t] E(s) exp(-E(s) tau_t) for t < k, the bare indicator at t = k.
double omega(std::size_t state, std::size_t t, const TimedObservation& o, const ConcreteCtmc& chain);
/// Untimed emission: [l(s) = l_t], except that an absorbing state cannot emit at t < k.
double omega(std::size_t state, std::size_t t, const UntimedObservation& o, const ConcreteCtmc& chain);

/// Scaled forward/backward tables of one observation sequence.
///
/// Entries are stored time-major: value(s, t) = v[t * states + s]. With
/// L the sequence likelihood and C_t = exp(sum_{u<=t} log_scale[u]):
///   true alpha_s(t) = alpha(s,t) * C_t
///   true beta_s(t)  = beta(s,t) * L / C_t
/// so sum_s alpha(s,t) beta(s,t) = 1 for every t. `emission` is omega
/// divided by exp(offset_t), the largest log omega among states carrying
/// forward mass, and `normalizer` is the forward mass at t after that
/// division; log_scale[t] = ln normalizer[t] + offset_t.
///
/// When competing paths differ by more than the double range, the scaled
/// pass loses the one that later turns out to be the only possible path.
/// The sequence is then redone in the log domain: log_alpha, log_beta and
/// log_emission hold the unscaled logarithms and take precedence; alpha and
/// beta are still filled but may under- or overflow.
struct FbTables {
  std::size_t states = 0;
  std::size_t length = 0;  // k + 1
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> emission;
  std::vector<double> normalizer;
  std::vector<double> log_scale;
  std::vector<double> log_alpha;
  std::vector<double> log_beta;
  std::vector<double> log_emission;
  double loglik = 0.0;

  bool possible() const noexcept;
  bool log_domain() const noexcept { return !log_alpha.empty(); }
  double alpha_at(std::size_t s, std::size_t t) const { return alpha[t * states + s]; }
  double beta_at(std::size_t s, std::size_t t) const { return beta[t * states + s]; }
  double emission_at(std::size_t s, std::size_t t) const { return emission[t * states + s]; }
  /// max_t |sum_s alpha(s,t) beta(s,t) - 1| (computed from the log tables
  /// when present); 0 for impossible sequences.
  double consistency_error() const;
};

/// Forward and backward passes for one sequence. An impossible observation
/// yields loglik = -infinity and zero tables; the caller decides what to do.
/// Throws NumericalError when the scaled tables fail the constancy check (1e-9).
FbTables forward_backward(const ConcreteCtmc& chain, const TimedObservation& o);
FbTables forward_backward(const ConcreteCtmc& chain, const UntimedObservation& o);
FbTables forward_backward(const ConcreteCtmc& chain, const LabelIndex& index, const TimedObservation& o);
FbTables forward_backward(const ConcreteCtmc& chain, const LabelIndex& index, const UntimedObservation& o);

/// gamma_s(t) for t in [0, k] and xi_rho(t) for t in [0, k), rho indexing chain.edges().
struct Posteriors {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t length = 0;
  std::vector<double> gamma;  // [t * states + s]
  std::vector<double> xi;     // [t * edges + rho]

  double gamma_at(std::size_t s, std::size_t t) const { return gamma[t * states + s]; }
  double xi_at(std::size_t rho, std::size_t t) const { return xi[t * edges + rho]; }
};

/// Posteriors from tables computed on the same chain and observation.
Posteriors posteriors(const FbTables& tables, const ConcreteCtmc& chain);

}  // namespace ctmcfit
