#include "app/builtin_models.hpp"

#include <cmath>

#include "ctmcfit/errors.hpp"

namespace ctmcfit::app {

namespace generated {
extern const std::string_view tandem_source;
extern const std::string_view sir_source;
extern const std::string_view sir_modular_source;
extern const std::string_view sir_approx_source;
}  // namespace generated

namespace {

void replace_once(std::string& text, std::string_view from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw ModelError("bundled model lacks '" + std::string(from) + "'");
  text.replace(pos, from.size(), to);
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"tandem", "sir", "sir_modular", "sir_approx"};
  return names;
}

std::optional<std::string_view> builtin_model(std::string_view name) {
  if (name == "tandem") return generated::tandem_source;
  if (name == "sir") return generated::sir_source;
  if (name == "sir_modular") return generated::sir_modular_source;
  if (name == "sir_approx") return generated::sir_approx_source;
  return std::nullopt;
}

SirPopulation SirPopulation::scaled(double factor) {
  if (!(factor > 0.0) || factor > 1.0) throw ConfigError("scale factor must lie in (0, 1]");
  SirPopulation p;
  p.size = static_cast<std::int64_t>(std::llround(100000 * factor));
  if (p.size <= p.infected + p.recovered) throw ConfigError("scale factor leaves no susceptible individuals");
  p.susceptible = p.size - p.infected - p.recovered;
  return p;
}

std::string sir_source(const SirPopulation& p, bool modular) {
  std::string text(modular ? generated::sir_modular_source : generated::sir_source);
  replace_once(text, "const int SIZE = 100000;", "const int SIZE = " + std::to_string(p.size) + ";");
  replace_once(text, "init 99936;", "init " + std::to_string(p.susceptible) + ";");
  replace_once(text, "init 48;", "init " + std::to_string(p.infected) + ";");
  replace_once(text, "init 16;", "init " + std::to_string(p.recovered) + ";");
  return text;
}

std::string sir_approx_source(const SirPopulation& p) {
  std::string text(generated::sir_approx_source);
  replace_once(text, "const int SIZE = 100000;", "const int SIZE = " + std::to_string(p.size) + ";");
  replace_once(text, "init 48;", "init " + std::to_string(p.infected) + ";");
  return text;
}

}  // namespace ctmcfit::app
