#include "ctmcfit/param_space.hpp"

#include <algorithm>
#include <set>

#include "ctmcfit/errors.hpp"

namespace ctmcfit {

ParamSpace::ParamSpace(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ModelError("parameter names must be nonempty");
    if (!seen.insert(n).second) throw ModelError("duplicate parameter name '" + n + "'");
  }
}

std::optional<std::size_t> ParamSpace::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

void ParamSpace::fix(std::size_t index, double value) {
  if (index >= names_.size()) throw DimensionError("parameter index out of range");
  if (!(value >= 0.0)) throw ModelError("fixed value of '" + names_[index] + "' must be >= 0");
  fixed_[index] = value;
}

void ParamSpace::unfix(std::size_t index) { fixed_.erase(index); }

std::vector<std::size_t> ParamSpace::free_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!is_fixed(i)) out.push_back(i);
  return out;
}

std::vector<std::string> ParamSpace::free_names() const {
  std::vector<std::string> out;
  for (auto i : free_indices()) out.push_back(names_[i]);
  return out;
}

}  // namespace ctmcfit
