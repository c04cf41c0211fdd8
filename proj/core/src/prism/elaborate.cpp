#include "ctmcfit/prism/elaborate.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "ctmcfit/errors.hpp"

namespace ctmcfit::prism {

namespace {

std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

bool integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

struct Folded {
  double value = 0.0;
  bool is_int = true;
};

class ConstantResolver {
 public:
  ConstantResolver(const ModelAst& ast, const Bindings& bindings, const std::set<std::string>& parameters)
      : ast_(ast), bindings_(bindings), parameters_(parameters) {}

  Folded resolve(const ConstDecl& decl) {
    if (auto it = done_.find(decl.name); it != done_.end()) return it->second;
    if (active_.count(decl.name)) throw SemanticError(where(decl.pos) + "cyclic definition of constant '" + decl.name + "'");
    active_.insert(decl.name);
    Folded f;
    if (auto b = bindings_.find(decl.name); b != bindings_.end()) {
      f = {b->second, decl.type == ConstType::Int};
    } else if (decl.value) {
      f = fold(*decl.value);
    } else {
      throw SemanticError(where(decl.pos) + "integer constant '" + decl.name + "' is undefined; bind it with -const " +
                          decl.name + "=<value>");
    }
    if (decl.type == ConstType::Int) {
      if (!integral(f.value) || !f.is_int)
        throw SemanticError(where(decl.pos) + "type mismatch: int constant '" + decl.name + "' gets non-integer value");
    }
    f.is_int = decl.type == ConstType::Int;
    active_.erase(decl.name);
    done_[decl.name] = f;
    return f;
  }

  Folded fold(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Int: return {e.number, true};
      case ExprKind::Real: return {e.number, false};
      case ExprKind::Bool: throw SemanticError(where(e.pos) + "type mismatch: boolean in numeric constant");
      case ExprKind::Ident: {
        if (parameters_.count(e.name))
          throw SemanticError(where(e.pos) + "constant definitions may not depend on parameter '" + e.name + "'");
        const ConstDecl* d = ast_.find_constant(e.name);
        if (!d) throw SemanticError(where(e.pos) + "unknown identifier '" + e.name + "' in constant definition");
        return resolve(*d);
      }
      case ExprKind::Neg: {
        auto a = fold(e.args[0]);
        return {-a.value, a.is_int};
      }
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
      case ExprKind::Div: {
        const auto a = fold(e.args[0]);
        const auto b = fold(e.args[1]);
        const bool both_int = a.is_int && b.is_int;
        switch (e.kind) {
          case ExprKind::Add: return {a.value + b.value, both_int};
          case ExprKind::Sub: return {a.value - b.value, both_int};
          case ExprKind::Mul: return {a.value * b.value, both_int};
          default:
            if (b.value == 0.0) throw SemanticError(where(e.pos) + "division by zero in constant definition");
            return {a.value / b.value, false};
        }
      }
      default:
        throw SemanticError(where(e.pos) + "type mismatch: boolean operator in numeric constant");
    }
  }

 private:
  const ModelAst& ast_;
  const Bindings& bindings_;
  const std::set<std::string>& parameters_;
  std::map<std::string, Folded> done_;
  std::set<std::string> active_;
};

}  // namespace

Valuation Elaboration::valuation() const {
  Valuation v(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.is_fixed(i)) {
      v[i] = params.fixed().at(i);
    } else if (auto it = parameter_defaults.find(params.name(i)); it != parameter_defaults.end()) {
      v[i] = it->second;
    } else {
      throw ConfigError("parameter '" + params.name(i) + "' needs a value (bind it with -const)");
    }
  }
  return v;
}

Elaboration elaborate(const ModelAst& ast, const Bindings& bindings, const std::vector<std::string>& promote) {
  std::set<std::string> seen;
  for (const auto& c : ast.constants)
    if (!seen.insert(c.name).second) throw SemanticError(where(c.pos) + "constant '" + c.name + "' declared twice");
  for (const auto& [name, value] : bindings) {
    if (!ast.find_constant(name)) throw SemanticError("binding for unknown constant '" + name + "'");
    if (!std::isfinite(value)) throw SemanticError("binding for '" + name + "' is not finite");
  }

  const std::set<std::string> promoted(promote.begin(), promote.end());
  for (const auto& name : promoted) {
    const ConstDecl* d = ast.find_constant(name);
    if (!d) throw SemanticError("cannot estimate unknown constant '" + name + "'");
    if (d->type != ConstType::Double) throw SemanticError("cannot estimate int constant '" + name + "'");
  }

  std::vector<std::string> names;
  std::set<std::string> parameters;
  for (const auto& c : ast.constants) {
    if (c.type == ConstType::Double && (!c.value || promoted.count(c.name))) {
      names.push_back(c.name);
      parameters.insert(c.name);
    }
  }

  Elaboration out;
  out.params = ParamSpace(names);
  ConstantResolver resolver(ast, bindings, parameters);
  for (const auto& c : ast.constants) {
    if (parameters.count(c.name)) {
      const std::size_t index = *out.params.index_of(c.name);
      if (auto b = bindings.find(c.name); b != bindings.end()) {
        if (b->second < 0.0) throw SemanticError("parameter '" + c.name + "' cannot be fixed to a negative value");
        out.params.fix(index, b->second);
      }
      if (c.value) {
        out.parameter_defaults[c.name] = resolver.fold(*c.value).value;
      }
      continue;
    }
    out.constants[c.name] = resolver.resolve(c).value;
  }
  return out;
}

Bindings parse_bindings(const std::string& text) {
  Bindings out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) {
      if (end >= text.size()) break;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("binding '" + item + "' is not of the form name=value");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
      throw ConfigError("binding '" + item + "' has a non-numeric value");
    out[name] = v;
  }
  return out;
}

}  // namespace ctmcfit::prism
