#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctmcfit/ctmc.hpp"
#include "ctmcfit/observations.hpp"
#include "ctmcfit/prism/ast.hpp"
#include "ctmcfit/prism/elaborate.hpp"

namespace ctmcfit::prism {

struct VariableInfo {
  std::string name;
  std::string module;
  std::int64_t low = 0;
  std::int64_t high = 0;
  std::int64_t init = 0;
};

/// Values of every variable, in declaration order across modules.
using StateVector = std::vector<std::int64_t>;

/// Compiled command semantics with on-demand successor generation.
///
/// Used by build() for the reachable graph and directly for simulating
/// models too large to enumerate. Copies share the compiled program.
class Explorer {
 public:
  Explorer(const ModelAst& ast, const Elaboration& elaboration, const std::vector<std::string>& observables);

  const ParamSpace& params() const noexcept;
  const std::vector<VariableInfo>& variables() const noexcept;
  const std::vector<std::string>& observables() const noexcept;

  StateVector initial_state() const;
  Label label(const StateVector& state) const;

  /// Enabled transitions under concrete parameter values. Zero rates are
  /// dropped; transitions to the same target are listed separately.
  void successors(const StateVector& state, std::span<const double> valuation,
                  std::vector<std::pair<StateVector, double>>& out) const;

  /// Enabled transitions with symbolic rates, parallel transitions not merged.
  std::vector<std::pair<StateVector, RateExpr>> symbolic_successors(const StateVector& state) const;

 private:
  struct Program;
  std::shared_ptr<const Program> program_;
};

/// Simulate `sequences` runs straight from the compiled commands, without
/// building the state space. Sequence j uses Rng(seed, j).
std::vector<TimedObservation> simulate_many(const Explorer& explorer, std::span<const double> valuation,
                                            std::size_t sequences, const SimulationLimits& limits,
                                            std::uint64_t seed, std::size_t workers = 1);

struct BuildLimits {
  std::size_t max_states = 5'000'000;
};

struct BuiltModel {
  ParametricCtmc chain;
  std::vector<VariableInfo> variables;
  std::vector<StateVector> states;  // state index -> variable values; index 0 is initial
  std::vector<std::string> observables;
};

/// Breadth-first reachable state space from the initial state.
BuiltModel build(const ModelAst& ast, const Elaboration& elaboration, const std::vector<std::string>& observables,
                 const BuildLimits& limits = {});

/// parse + elaborate + build.
BuiltModel compile(std::string_view source, const Bindings& bindings, const std::vector<std::string>& observables,
                   const std::vector<std::string>& promote = {}, const BuildLimits& limits = {});

}  // namespace ctmcfit::prism
