#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctmcfit/ctmc.hpp"
#include "ctmcfit/forward_backward.hpp"
#include "ctmcfit/observations.hpp"
#include "ctmcfit/polysolve.hpp"

namespace ctmcfit {

/// Expected sufficient statistics of a dataset under P(v_m).
struct Accumulators {
  ObservationKind kind = ObservationKind::Timed;
  /// Per state: sum_j sum_{t<k_j} gamma_s(t) tau_t (expected dwell time; timed only).
  std::vector<double> gamma_timed;
  /// Per state: sum_j sum_{t<k_j} gamma_s(t) (expected visits that end in a jump).
  std::vector<double> gamma_hat;
  /// Per transition: sum_j sum_{t<k_j} xi_rho(t) (expected firings).
  std::vector<double> xi;
  double loglik = 0.0;
};

/// Instantiate once at `valuation` and sum per-sequence posteriors.
///
/// Sequences are processed on up to `workers` threads and reduced in sequence
/// order, so results are identical for every worker count. Throws
/// EstimationError naming the first sequence with zero likelihood.
Accumulators accumulate(const ParametricCtmc& chain, std::span<const double> valuation, const Dataset& data,
                        std::size_t workers = 1);

enum class UpdateRule {
  Auto,        // closed form when every edge with x_i has the same free degree, else root solve
  RootSolver,  // always solve the update polynomial numerically
};

struct UpdateOptions {
  double min_param = 1e-12;
  UpdateRule rule = UpdateRule::Auto;
  double root_tolerance = 1e-12;
};

/// How one parameter moved in an MM step.
enum class ParamUpdate {
  Fixed,       // copied unchanged
  Unused,      // occurs in no transition; unchanged
  ClosedForm,  // uniform-degree closed form
  RootSolved,  // positive root of the update polynomial
  Floored,     // no expected firings; set to min_param
  Degenerate,  // no posterior mass on its transitions; unchanged
};

const char* to_string(ParamUpdate update) noexcept;

struct MmStep {
  Valuation valuation;
  std::vector<ParamUpdate> updates;
};

/// P_i(y) (timed) or Q_i(y) (untimed, per acc.kind) for parameter i.
///
/// Degrees count only parameters outside `fixed`: fixed parameters are
/// treated as constants folded into the coefficient.
UpdatePolynomial update_polynomial(const ParametricCtmc& chain, std::span<const double> current,
                                   const Accumulators& acc, std::size_t parameter,
                                   const std::set<std::size_t>& fixed);

/// One MM update from timed accumulators.
MmStep mm_step_timed(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                     const std::set<std::size_t>& fixed, const UpdateOptions& options = {});
/// One MM update from untimed accumulators.
MmStep mm_step_untimed(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                       const std::set<std::size_t>& fixed, const UpdateOptions& options = {});

/// g(v | v_m) or h(v | v_m), without the additive constant, summed over free parameters.
double surrogate(const ParametricCtmc& chain, std::span<const double> current, const Accumulators& acc,
                 std::span<const double> candidate, const std::set<std::size_t>& fixed = {});

/// Where the first iterate comes from.
struct InitSpec {
  /// Full valuation; fixed entries are overwritten with their fixed values.
  std::optional<Valuation> values;
  /// Otherwise each free parameter is drawn uniformly from [lo, hi].
  double lo = 0.1;
  double hi = 5.0;
  std::uint64_t seed = 0;
};

struct EstimatorConfig {
  double epsilon = 1e-2;
  std::size_t max_iters = 100;
  InitSpec init;
  /// Defaults to the dataset's kind; an untimed fit of a timed dataset ignores the times.
  std::optional<ObservationKind> mode;
  double min_param = 1e-12;
  UpdateRule rule = UpdateRule::Auto;
  /// 0 selects default_worker_count().
  std::size_t workers = 0;

  void validate() const;
};

enum class ParamStatus {
  Estimated,
  Fixed,
  NotInModel,  // occurs in no transition; kept at its initial value
  Floored,     // hit min_param at least once
  Degenerate,  // update skipped at least once for lack of posterior mass
};

const char* to_string(ParamStatus status) noexcept;

struct EstimationResult {
  Valuation initial;
  Valuation valuation;
  std::vector<double> loglik_trace;
  std::size_t iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::vector<ParamStatus> status;
  std::vector<std::string> warnings;
};

/// Draw (or copy) the first iterate for `chain` under `init`.
Valuation initial_valuation(const ParametricCtmc& chain, const InitSpec& init);

/// Iterate accumulate + MM update until the log-likelihood gain is <= epsilon
/// or max_iters updates have been made. Fixed parameters come from chain.params().
EstimationResult fit(const ParametricCtmc& chain, const Dataset& data, const EstimatorConfig& config);

}  // namespace ctmcfit
