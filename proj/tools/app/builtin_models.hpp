#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctmcfit::app {

/// Names accepted after the `builtin:` prefix.
const std::vector<std::string>& builtin_names();

/// Source text of a bundled model, or nullopt for an unknown name.
std::optional<std::string_view> builtin_model(std::string_view name);

/// Population figures substituted into the bundled SIR sources.
struct SirPopulation {
  std::int64_t size = 100000;
  std::int64_t susceptible = 99936;
  std::int64_t infected = 48;
  std::int64_t recovered = 16;

  /// size scaled by `factor`; the initial infected and recovered counts are kept.
  static SirPopulation scaled(double factor);
};

/// Single-module or modular SIR source with the given population.
/// The default population reproduces the bundled text exactly.
std::string sir_source(const SirPopulation& population, bool modular = false);

/// Approximate SIR source (binned recovered count) for the given population.
std::string sir_approx_source(const SirPopulation& population);

}  // namespace ctmcfit::app
