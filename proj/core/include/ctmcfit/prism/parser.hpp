#pragma once

#include <string_view>

#include "ctmcfit/prism/ast.hpp"

namespace ctmcfit::prism {

/// Parse a ctmc model in the supported PRISM subset.
///
/// Throws ParseError (with line and column) on malformed input and
/// UnsupportedConstructError for PRISM features outside the subset.
ModelAst parse(std::string_view source);

}  // namespace ctmcfit::prism
