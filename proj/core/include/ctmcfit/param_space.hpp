#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctmcfit {

/// One value per parameter, in ParamSpace order.
using Valuation = std::vector<double>;

/// Ordered parameter names plus the subset whose values are pinned.
class ParamSpace {
 public:
  ParamSpace() = default;
  explicit ParamSpace(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  void fix(std::size_t index, double value);
  void unfix(std::size_t index);
  bool is_fixed(std::size_t index) const { return fixed_.count(index) != 0; }
  const std::map<std::size_t, double>& fixed() const noexcept { return fixed_; }

  std::vector<std::size_t> free_indices() const;
  std::vector<std::string> free_names() const;

  friend bool operator==(const ParamSpace&, const ParamSpace&) = default;

 private:
  std::vector<std::string> names_;
  std::map<std::size_t, double> fixed_;
};

}  // namespace ctmcfit
