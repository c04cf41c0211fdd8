#include "ctmcfit/prism/builder.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "ctmcfit/errors.hpp"
#include "ctmcfit/parallel.hpp"
#include "ctmcfit/rng.hpp"
#include "ctmcfit/prism/parser.hpp"

namespace ctmcfit::prism {

namespace {

std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

enum class Op { Num, Var, Param, Neg, Not, Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

// Identifiers resolved to variable slots, parameter slots or folded numbers.
struct CExpr {
  Op op = Op::Num;
  double number = 0.0;
  std::size_t index = 0;
  bool boolean = false;
  bool has_param = false;
  std::vector<CExpr> args;
  SourcePos pos;
};

// Signed polynomial used while a rate is assembled; checked for sign at the end.
using Exponents = std::vector<unsigned>;
using Poly = std::map<Exponents, double>;

Poly poly_constant(std::size_t arity, double c) {
  Poly p;
  if (c != 0.0) p[Exponents(arity, 0)] = c;
  return p;
}

Poly poly_add(const Poly& a, const Poly& b, double sign) {
  Poly out = a;
  for (const auto& [e, c] : b) {
    double& slot = out[e];
    slot += sign * c;
    if (slot == 0.0) out.erase(e);
  }
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponents e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out[e] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
  return out;
}

Poly poly_scale(const Poly& a, double c) {
  Poly out;
  if (c == 0.0) return out;
  for (const auto& [e, v] : a) out[e] = v * c;
  return out;
}

struct CAssign {
  std::size_t variable = 0;
  CExpr value;
};

struct CAlternative {
  CExpr rate;
  std::vector<CAssign> updates;
};

struct CCommand {
  std::size_t module = 0;
  std::optional<std::string> action;
  CExpr guard;
  std::vector<CAlternative> alternatives;
  SourcePos pos;
};

std::string describe(const CCommand& c, const std::vector<std::string>& modules) {
  std::string s = "command [" + c.action.value_or("") + "] in module '" + modules[c.module] + "' at line " +
                  std::to_string(c.pos.line);
  return s;
}

}  // namespace

struct Explorer::Program {
  ParamSpace params;
  std::vector<VariableInfo> variables;
  std::vector<std::string> modules;
  std::vector<std::string> observables;
  std::vector<std::size_t> observable_slots;
  std::vector<CCommand> commands;
  std::vector<std::size_t> independent;  // indices of unlabeled commands
  // Per action: for each participating module, its commands with that action.
  std::vector<std::pair<std::string, std::vector<std::vector<std::size_t>>>> actions;

  // --- compilation ---------------------------------------------------------

  CExpr compile(const Expr& e, const std::map<std::string, double>& constants,
                const std::map<std::string, std::size_t>& slots) const {
    CExpr c;
    c.pos = e.pos;
    auto numeric = [&](const CExpr& x) {
      if (x.boolean) throw SemanticError(where(x.pos) + "type mismatch: expected a number, found a boolean");
    };
    auto logical = [&](const CExpr& x) {
      if (!x.boolean) throw SemanticError(where(x.pos) + "type mismatch: expected a boolean, found a number");
    };
    switch (e.kind) {
      case ExprKind::Int:
      case ExprKind::Real:
        c.number = e.number;
        return c;
      case ExprKind::Bool:
        c.number = e.number;
        c.boolean = true;
        return c;
      case ExprKind::Ident: {
        if (auto it = slots.find(e.name); it != slots.end()) {
          c.op = Op::Var;
          c.index = it->second;
          return c;
        }
        if (auto p = params.index_of(e.name)) {
          c.op = Op::Param;
          c.index = *p;
          c.has_param = true;
          return c;
        }
        if (auto it = constants.find(e.name); it != constants.end()) {
          c.number = it->second;
          return c;
        }
        throw SemanticError(where(e.pos) + "unknown identifier '" + e.name + "'");
      }
      default: break;
    }
    for (const auto& a : e.args) c.args.push_back(compile(a, constants, slots));
    for (const auto& a : c.args) c.has_param = c.has_param || a.has_param;
    switch (e.kind) {
      case ExprKind::Neg: c.op = Op::Neg; numeric(c.args[0]); break;
      case ExprKind::Not: c.op = Op::Not; logical(c.args[0]); c.boolean = true; break;
      case ExprKind::Add: c.op = Op::Add; break;
      case ExprKind::Sub: c.op = Op::Sub; break;
      case ExprKind::Mul: c.op = Op::Mul; break;
      case ExprKind::Div: c.op = Op::Div; break;
      case ExprKind::Eq: c.op = Op::Eq; break;
      case ExprKind::Ne: c.op = Op::Ne; break;
      case ExprKind::Lt: c.op = Op::Lt; break;
      case ExprKind::Le: c.op = Op::Le; break;
      case ExprKind::Gt: c.op = Op::Gt; break;
      case ExprKind::Ge: c.op = Op::Ge; break;
      case ExprKind::And: c.op = Op::And; break;
      case ExprKind::Or: c.op = Op::Or; break;
      default: break;
    }
    switch (c.op) {
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        numeric(c.args[0]);
        numeric(c.args[1]);
        if (c.op == Op::Div && c.args[1].has_param)
          throw SemanticError(where(c.pos) + "division by an expression that depends on a parameter");
        break;
      case Op::Eq:
      case Op::Ne:
        if (c.args[0].boolean != c.args[1].boolean)
          throw SemanticError(where(c.pos) + "type mismatch in comparison");
        c.boolean = true;
        break;
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        numeric(c.args[0]);
        numeric(c.args[1]);
        c.boolean = true;
        break;
      case Op::And:
      case Op::Or:
        logical(c.args[0]);
        logical(c.args[1]);
        c.boolean = true;
        break;
      default: break;
    }
    return c;
  }

  // --- evaluation ----------------------------------------------------------

  static double eval(const CExpr& c, const StateVector& s, std::span<const double> v) {
    switch (c.op) {
      case Op::Num: return c.number;
      case Op::Var: return static_cast<double>(s[c.index]);
      case Op::Param: return v[c.index];
      case Op::Neg: return -eval(c.args[0], s, v);
      case Op::Not: return eval(c.args[0], s, v) != 0.0 ? 0.0 : 1.0;
      case Op::And: return eval(c.args[0], s, v) != 0.0 && eval(c.args[1], s, v) != 0.0 ? 1.0 : 0.0;
      case Op::Or: return eval(c.args[0], s, v) != 0.0 || eval(c.args[1], s, v) != 0.0 ? 1.0 : 0.0;
      default: break;
    }
    const double a = eval(c.args[0], s, v);
    const double b = eval(c.args[1], s, v);
    switch (c.op) {
      case Op::Add: return a + b;
      case Op::Sub: return a - b;
      case Op::Mul: return a * b;
      case Op::Div:
        if (!(b > 0.0)) throw SemanticError(where(c.pos) + "divisor must be a positive constant");
        return a / b;
      case Op::Eq: return a == b ? 1.0 : 0.0;
      case Op::Ne: return a != b ? 1.0 : 0.0;
      case Op::Lt: return a < b ? 1.0 : 0.0;
      case Op::Le: return a <= b ? 1.0 : 0.0;
      case Op::Gt: return a > b ? 1.0 : 0.0;
      case Op::Ge: return a >= b ? 1.0 : 0.0;
      default: return 0.0;
    }
  }

  Poly eval_poly(const CExpr& c, const StateVector& s) const {
    const std::size_t n = params.size();
    if (!c.has_param) return poly_constant(n, eval(c, s, {}));
    switch (c.op) {
      case Op::Param: {
        Exponents e(n, 0);
        e[c.index] = 1;
        return Poly{{e, 1.0}};
      }
      case Op::Neg: return poly_scale(eval_poly(c.args[0], s), -1.0);
      case Op::Add: return poly_add(eval_poly(c.args[0], s), eval_poly(c.args[1], s), 1.0);
      case Op::Sub: return poly_add(eval_poly(c.args[0], s), eval_poly(c.args[1], s), -1.0);
      case Op::Mul: return poly_mul(eval_poly(c.args[0], s), eval_poly(c.args[1], s));
      case Op::Div: {
        const double d = eval(c.args[1], s, {});
        if (!(d > 0.0)) throw SemanticError(where(c.pos) + "divisor must be a positive constant");
        return poly_scale(eval_poly(c.args[0], s), 1.0 / d);
      }
      default: throw SemanticError(where(c.pos) + "parameter used in a non-arithmetic context");
    }
  }

  bool enabled(const CCommand& c, const StateVector& s) const { return eval(c.guard, s, {}) != 0.0; }

  // Apply assignments of one alternative to `target` (which starts as the source).
  bool apply(const CAlternative& a, const StateVector& source, StateVector& target) const {
    for (const auto& u : a.updates) {
      const double x = eval(u.value, source, {});
      if (!std::isfinite(x) || std::floor(x) != x)
        throw SemanticError(where(u.value.pos) + "update of '" + variables[u.variable].name +
                            "' does not yield an integer");
      const auto value = static_cast<std::int64_t>(x);
      const auto& info = variables[u.variable];
      if (value < info.low || value > info.high) return false;
      target[u.variable] = value;
    }
    return true;
  }

  // Walk all enabled combinations; `emit(target, parts)` receives the chosen
  // (command, alternative) pairs whose rates multiply.
  template <class Emit>
  void expand(const StateVector& s, Emit&& emit) const {
    std::vector<std::pair<const CCommand*, const CAlternative*>> parts;
    for (std::size_t ci : independent) {
      const auto& c = commands[ci];
      if (!enabled(c, s)) continue;
      for (const auto& a : c.alternatives) {
        StateVector t = s;
        if (!apply(a, s, t)) continue;
        parts.assign(1, {&c, &a});
        emit(t, parts);
      }
    }
    for (const auto& [name, per_module] : actions) {
      std::vector<std::vector<std::size_t>> live(per_module.size());
      bool blocked = false;
      for (std::size_t m = 0; m < per_module.size() && !blocked; ++m) {
        for (std::size_t ci : per_module[m])
          if (enabled(commands[ci], s)) live[m].push_back(ci);
        blocked = live[m].empty();
      }
      if (blocked) continue;
      parts.clear();
      combine(s, live, 0, parts, emit);
    }
  }

  template <class Emit>
  void combine(const StateVector& s, const std::vector<std::vector<std::size_t>>& live, std::size_t m,
               std::vector<std::pair<const CCommand*, const CAlternative*>>& parts, Emit& emit) const {
    if (m == live.size()) {
      StateVector t = s;
      for (const auto& [c, a] : parts)
        if (!apply(*a, s, t)) return;
      emit(t, parts);
      return;
    }
    for (std::size_t ci : live[m]) {
      const auto& c = commands[ci];
      for (const auto& a : c.alternatives) {
        parts.emplace_back(&c, &a);
        combine(s, live, m + 1, parts, emit);
        parts.pop_back();
      }
    }
  }

  std::string describe_parts(const std::vector<std::pair<const CCommand*, const CAlternative*>>& parts) const {
    std::string out;
    for (const auto& [c, a] : parts) {
      if (!out.empty()) out += " synchronized with ";
      out += describe(*c, modules);
    }
    return out;
  }

  std::string describe_state(const StateVector& s) const {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += variables[i].name + "=" + std::to_string(s[i]);
    }
    return out + ")";
  }
};

Explorer::Explorer(const ModelAst& ast, const Elaboration& elab, const std::vector<std::string>& observables) {
  auto prog = std::make_shared<Program>();
  prog->params = elab.params;

  std::map<std::string, std::size_t> slots;
  std::vector<std::size_t> owner;
  std::set<std::string> module_names;
  for (std::size_t m = 0; m < ast.modules.size(); ++m) {
    const auto& mod = ast.modules[m];
    if (!module_names.insert(mod.name).second)
      throw SemanticError(where(mod.pos) + "module '" + mod.name + "' declared twice");
    prog->modules.push_back(mod.name);
    for (const auto& v : mod.variables) {
      if (slots.count(v.name)) throw SemanticError(where(v.pos) + "variable '" + v.name + "' declared twice");
      if (ast.find_constant(v.name))
        throw SemanticError(where(v.pos) + "variable '" + v.name + "' shadows a constant");
      static const std::map<std::string, std::size_t> no_slots;
      auto fold_int = [&](const Expr& e, const char* what) {
        const CExpr c = prog->compile(e, elab.constants, no_slots);
        if (c.has_param) throw SemanticError(where(e.pos) + std::string(what) + " of '" + v.name + "' uses a parameter");
        if (c.boolean) throw SemanticError(where(e.pos) + std::string(what) + " of '" + v.name + "' is boolean");
        const double x = Program::eval(c, {}, {});
        if (!std::isfinite(x) || std::floor(x) != x)
          throw SemanticError(where(e.pos) + std::string(what) + " of '" + v.name + "' is not an integer");
        return static_cast<std::int64_t>(x);
      };
      VariableInfo info;
      info.name = v.name;
      info.module = mod.name;
      info.low = fold_int(v.low, "lower bound");
      info.high = fold_int(v.high, "upper bound");
      info.init = v.init ? fold_int(*v.init, "initial value") : info.low;
      if (info.high < info.low) throw SemanticError(where(v.pos) + "empty range for variable '" + v.name + "'");
      if (info.init < info.low || info.init > info.high)
        throw SemanticError(where(v.pos) + "initial value of '" + v.name + "' is outside its range");
      slots[v.name] = prog->variables.size();
      owner.push_back(m);
      prog->variables.push_back(info);
    }
  }

  std::map<std::string, std::vector<std::vector<std::size_t>>> by_action;  // action -> module -> commands
  std::vector<std::string> action_order;
  for (std::size_t m = 0; m < ast.modules.size(); ++m) {
    for (const auto& cmd : ast.modules[m].commands) {
      CCommand c;
      c.module = m;
      c.action = cmd.action;
      c.pos = cmd.pos;
      c.guard = prog->compile(cmd.guard, elab.constants, slots);
      if (!c.guard.boolean) throw SemanticError(where(cmd.guard.pos) + "guard is not a boolean expression");
      if (c.guard.has_param) throw SemanticError(where(cmd.guard.pos) + "guard depends on a parameter");
      for (const auto& alt : cmd.alternatives) {
        CAlternative a;
        a.rate = prog->compile(alt.rate, elab.constants, slots);
        if (a.rate.boolean) throw SemanticError(where(alt.rate.pos) + "rate is a boolean expression");
        std::set<std::size_t> assigned;
        for (const auto& u : alt.updates) {
          auto it = slots.find(u.variable);
          if (it == slots.end()) throw SemanticError(where(u.pos) + "update of unknown variable '" + u.variable + "'");
          if (owner[it->second] != m)
            throw SemanticError(where(u.pos) + "module '" + ast.modules[m].name + "' updates variable '" +
                                u.variable + "' of module '" + prog->variables[it->second].module + "'");
          if (!assigned.insert(it->second).second)
            throw SemanticError(where(u.pos) + "variable '" + u.variable + "' assigned twice in one update");
          CAssign ca;
          ca.variable = it->second;
          ca.value = prog->compile(u.value, elab.constants, slots);
          if (ca.value.boolean || ca.value.has_param)
            throw SemanticError(where(u.pos) + "update of '" + u.variable + "' must be an integer expression");
          a.updates.push_back(std::move(ca));
        }
        c.alternatives.push_back(std::move(a));
      }
      const std::size_t index = prog->commands.size();
      if (c.action) {
        auto& per = by_action[*c.action];
        if (per.empty()) action_order.push_back(*c.action);
        per.resize(ast.modules.size());
        per[m].push_back(index);
      } else {
        prog->independent.push_back(index);
      }
      prog->commands.push_back(std::move(c));
    }
  }
  for (const auto& name : action_order) {
    std::vector<std::vector<std::size_t>> participants;
    for (const auto& cmds : by_action[name])
      if (!cmds.empty()) participants.push_back(cmds);
    prog->actions.emplace_back(name, std::move(participants));
  }

  prog->observables = observables;
  for (const auto& o : observables) {
    auto it = slots.find(o);
    if (it == slots.end()) throw SemanticError("observable '" + o + "' is not a declared variable");
    prog->observable_slots.push_back(it->second);
  }
  program_ = std::move(prog);
}

const ParamSpace& Explorer::params() const noexcept { return program_->params; }
const std::vector<VariableInfo>& Explorer::variables() const noexcept { return program_->variables; }
const std::vector<std::string>& Explorer::observables() const noexcept { return program_->observables; }

StateVector Explorer::initial_state() const {
  StateVector s;
  for (const auto& v : program_->variables) s.push_back(v.init);
  return s;
}

Label Explorer::label(const StateVector& state) const {
  Label l;
  l.reserve(program_->observable_slots.size());
  for (auto slot : program_->observable_slots) l.push_back(state[slot]);
  return l;
}

void Explorer::successors(const StateVector& state, std::span<const double> valuation,
                          std::vector<std::pair<StateVector, double>>& out) const {
  if (valuation.size() != program_->params.size()) throw DimensionError("valuation size mismatch");
  out.clear();
  const Program& p = *program_;
  p.expand(state, [&](const StateVector& target, const auto& parts) {
    double rate = 1.0;
    for (const auto& [c, a] : parts) rate *= Program::eval(a->rate, state, valuation);
    if (rate < 0.0)
      throw SemanticError("negative rate for " + p.describe_parts(parts) + " in state " + p.describe_state(state));
    if (rate > 0.0) out.emplace_back(target, rate);
  });
}

std::vector<std::pair<StateVector, RateExpr>> Explorer::symbolic_successors(const StateVector& state) const {
  std::vector<std::pair<StateVector, RateExpr>> out;
  const Program& p = *program_;
  const std::size_t n = p.params.size();
  p.expand(state, [&](const StateVector& target, const auto& parts) {
    Poly rate = poly_constant(n, 1.0);
    for (const auto& [c, a] : parts) {
      rate = poly_mul(rate, p.eval_poly(a->rate, state));
      if (rate.empty()) break;
    }
    std::vector<Monomial> terms;
    for (const auto& [e, coeff] : rate) {
      if (coeff < 0.0 || !std::isfinite(coeff))
        throw SemanticError("rate of " + p.describe_parts(parts) + " in state " + p.describe_state(state) +
                            " is not a polynomial with nonnegative coefficients");
      terms.push_back({coeff, e});
    }
    if (terms.empty()) return;
    out.emplace_back(target, RateExpr::from_terms(n, std::move(terms)));
  });
  return out;
}

namespace {

// Mixed-radix code of a state vector.
class StateCodec {
 public:
  explicit StateCodec(const std::vector<VariableInfo>& vars) {
    std::uint64_t total = 1;
    for (const auto& v : vars) {
      const auto width = static_cast<std::uint64_t>(v.high - v.low) + 1;
      lows_.push_back(v.low);
      radix_.push_back(width);
      if (width == 0 || total > std::numeric_limits<std::uint64_t>::max() / width)
        throw ModelError("variable ranges are too large to encode states in 64 bits");
      total *= width;
    }
  }

  std::uint64_t encode(const StateVector& s) const {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      code = code * radix_[i] + static_cast<std::uint64_t>(s[i] - lows_[i]);
    return code;
  }

 private:
  std::vector<std::int64_t> lows_;
  std::vector<std::uint64_t> radix_;
};

}  // namespace

BuiltModel build(const ModelAst& ast, const Elaboration& elaboration, const std::vector<std::string>& observables,
                 const BuildLimits& limits) {
  const Explorer explorer(ast, elaboration, observables);
  const StateCodec codec(explorer.variables());

  std::vector<StateVector> states{explorer.initial_state()};
  std::unordered_map<std::uint64_t, std::size_t> index{{codec.encode(states[0]), 0}};
  std::vector<RateEdge> edges;

  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto succ = explorer.symbolic_successors(states[s]);
    std::map<std::size_t, std::size_t> slot_of_target;  // merge parallel edges per (s, t)
    for (const auto& [target, rate] : succ) {
      const auto code = codec.encode(target);
      auto [it, inserted] = index.try_emplace(code, states.size());
      if (inserted) {
        if (states.size() >= limits.max_states)
          throw ModelError("state space exceeds the limit of " + std::to_string(limits.max_states) + " states");
        states.push_back(target);
      }
      const std::size_t t = it->second;
      auto [slot, fresh] = slot_of_target.try_emplace(t, edges.size());
      if (fresh)
        edges.push_back({s, t, rate});
      else
        edges[slot->second].rate = rate_add(edges[slot->second].rate, rate);
    }
  }

  std::vector<Label> labels;
  labels.reserve(states.size());
  for (const auto& st : states) labels.push_back(explorer.label(st));
  std::vector<double> initial(states.size(), 0.0);
  initial[0] = 1.0;

  BuiltModel out{normalize_transitions(explorer.params(), std::move(labels), std::move(initial), edges),
                 explorer.variables(), std::move(states), observables};
  return out;
}

std::vector<TimedObservation> simulate_many(const Explorer& explorer, std::span<const double> valuation,
                                            std::size_t sequences, const SimulationLimits& limits,
                                            std::uint64_t seed, std::size_t workers) {
  if (valuation.size() != explorer.params().size()) throw DimensionError("valuation size mismatch");
  std::vector<TimedObservation> out(sequences);
  parallel_for(sequences, workers, [&](std::size_t j) {
    Rng rng(seed, j);
    std::vector<std::pair<StateVector, double>> buffer;
    out[j] = simulate_walk(
        explorer.initial_state(),
        [&](const StateVector& s) {
          explorer.successors(s, valuation, buffer);
          return buffer;
        },
        [&](const StateVector& s) { return explorer.label(s); }, limits, rng);
  });
  return out;
}

BuiltModel compile(std::string_view source, const Bindings& bindings, const std::vector<std::string>& observables,
                   const std::vector<std::string>& promote, const BuildLimits& limits) {
  const ModelAst ast = parse(source);
  return build(ast, elaborate(ast, bindings, promote), observables, limits);
}

}  // namespace ctmcfit::prism
