#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctmcfit/param_space.hpp"
#include "ctmcfit/prism/ast.hpp"

namespace ctmcfit::prism {

using Bindings = std::map<std::string, double>;

struct Elaboration {
  /// Undefined double constants plus promoted ones, in declaration order.
  /// A parameter that also has a binding is kept and marked fixed.
  ParamSpace params;
  /// Every constant that folded to a number.
  std::map<std::string, double> constants;
  /// Definitions of promoted constants; usable as ground truth or simulation values.
  std::map<std::string, double> parameter_defaults;

  /// Per-parameter value for simulation: fixed value, then default; throws ConfigError if neither.
  Valuation valuation() const;
};

/// Resolve constants of `ast`.
///
/// `bindings` override or supply values; `promote` names defined double
/// constants that should become parameters instead of being folded.
/// Throws SemanticError on undefined int constants, cycles, type mismatches
/// and unknown binding names.
Elaboration elaborate(const ModelAst& ast, const Bindings& bindings = {},
                      const std::vector<std::string>& promote = {});

/// Parse "a=1,b=2.5" (also accepts repeated flags joined by commas).
Bindings parse_bindings(const std::string& text);

}  // namespace ctmcfit::prism
