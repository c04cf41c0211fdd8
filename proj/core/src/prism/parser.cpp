#include "ctmcfit/prism/parser.hpp"

#include <cstdio>
#include <set>

#include "ctmcfit/errors.hpp"
#include "lexer.hpp"

namespace ctmcfit::prism {

Expr Expr::literal(ExprKind kind, double value, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.number = value;
  e.pos = pos;
  return e;
}

Expr Expr::ident(std::string name, SourcePos pos) {
  Expr e;
  e.kind = ExprKind::Ident;
  e.name = std::move(name);
  e.pos = pos;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr operand, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(operand));
  e.pos = pos;
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.pos = pos;
  return e;
}

namespace {

const char* symbol(ExprKind kind) {
  switch (kind) {
    case ExprKind::Add: return "+";
    case ExprKind::Sub: return "-";
    case ExprKind::Mul: return "*";
    case ExprKind::Div: return "/";
    case ExprKind::Eq: return "=";
    case ExprKind::Ne: return "!=";
    case ExprKind::Lt: return "<";
    case ExprKind::Le: return "<=";
    case ExprKind::Gt: return ">";
    case ExprKind::Ge: return ">=";
    case ExprKind::And: return "&";
    case ExprKind::Or: return "|";
    default: return "?";
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int:
    case ExprKind::Real: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      return buf;
    }
    case ExprKind::Bool: return e.number != 0.0 ? "true" : "false";
    case ExprKind::Ident: return e.name;
    case ExprKind::Neg: return "(-" + to_string(e.args[0]) + ")";
    case ExprKind::Not: return "(!" + to_string(e.args[0]) + ")";
    default: return "(" + to_string(e.args[0]) + symbol(e.kind) + to_string(e.args[1]) + ")";
  }
}

const ConstDecl* ModelAst::find_constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> ModelAst::undefined_doubles() const {
  std::vector<std::string> out;
  for (const auto& c : constants)
    if (c.type == ConstType::Double && !c.value) out.push_back(c.name);
  return out;
}

namespace {

using detail::Tok;
using detail::Token;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ModelAst model() {
    ModelAst ast;
    if (at_keyword("ctmc")) {
      next();
    } else if (cur().kind == Tok::Keyword && model_kinds().count(cur().text)) {
      unsupported("model type '" + cur().text + "' (only ctmc is supported)");
    } else {
      fail("expected model type 'ctmc'");
    }
    while (cur().kind != Tok::End) {
      if (at_keyword("const")) {
        ast.constants.push_back(constant());
      } else if (at_keyword("module")) {
        ast.modules.push_back(module());
      } else if (cur().kind == Tok::Keyword) {
        top_level_keyword();
      } else {
        fail("expected 'const' or 'module', found " + found());
      }
    }
    return ast;
  }

 private:
  static const std::set<std::string>& model_kinds() {
    static const std::set<std::string> kinds = {"dtmc", "mdp",   "pta",   "probabilistic", "nondeterministic",
                                                "stochastic", "smg", "ctmdp", "lts", "pomdp", "popta"};
    return kinds;
  }

  void top_level_keyword() {
    const auto& t = cur().text;
    if (t == "rewards") unsupported("rewards structures");
    if (t == "system") unsupported("system ... endsystem composition");
    if (t == "formula") unsupported("formula definitions");
    if (t == "label") unsupported("label definitions");
    if (t == "global") unsupported("global variables");
    if (t == "init") unsupported("init ... endinit blocks");
    if (t == "player") unsupported("players");
    if (t == "observables") unsupported("observables blocks");
    if (model_kinds().count(t) || t == "ctmc") unsupported("repeated or mixed model type '" + t + "'");
    fail("unexpected keyword '" + t + "'");
  }

  ConstDecl constant() {
    ConstDecl d;
    d.pos = cur().pos;
    next();  // const
    if (at_keyword("int")) {
      next();
    } else if (at_keyword("double")) {
      d.type = ConstType::Double;
      next();
    } else if (at_keyword("bool")) {
      unsupported("boolean constants");
    }
    d.name = identifier("constant name");
    if (cur().kind == Tok::Assign) {
      next();
      d.value = expression();
    }
    expect(Tok::Semi, "';' after constant declaration");
    return d;
  }

  Module module() {
    Module m;
    m.pos = cur().pos;
    next();  // module
    m.name = identifier("module name");
    if (cur().kind == Tok::Assign) unsupported("module renaming");
    while (!at_keyword("endmodule")) {
      if (cur().kind == Tok::End) fail("missing 'endmodule' for module '" + m.name + "'");
      if (cur().kind == Tok::LBracket) {
        m.commands.push_back(command());
      } else if (cur().kind == Tok::Ident) {
        m.variables.push_back(variable());
      } else if (at_keyword("invariant")) {
        unsupported("invariants");
      } else {
        fail("expected variable declaration or command, found " + found());
      }
    }
    next();  // endmodule
    return m;
  }

  VarDecl variable() {
    VarDecl v;
    v.pos = cur().pos;
    v.name = identifier("variable name");
    expect(Tok::Colon, "':' after variable name");
    if (at_keyword("bool")) unsupported("boolean variables");
    if (at_keyword("clock")) unsupported("clock variables");
    if (at_keyword("int") || at_keyword("double")) unsupported("unbounded variables");
    expect(Tok::LBracket, "'[' to open the variable range");
    v.low = expression();
    expect(Tok::DotDot, "'..' in variable range");
    v.high = expression();
    expect(Tok::RBracket, "']' to close the variable range");
    if (at_keyword("init")) {
      next();
      v.init = expression();
    }
    expect(Tok::Semi, "';' after variable declaration");
    return v;
  }

  Command command() {
    Command c;
    c.pos = cur().pos;
    next();  // [
    if (cur().kind == Tok::Ident) c.action = identifier("action name");
    expect(Tok::RBracket, "']' after action");
    c.guard = expression();
    expect(Tok::Arrow, "'->' after guard");
    do {
      c.alternatives.push_back(alternative());
    } while (accept(Tok::Plus));
    expect(Tok::Semi, "';' after command");
    return c;
  }

  Alternative alternative() {
    Alternative a;
    a.pos = cur().pos;
    a.rate = expression();
    if (cur().kind != Tok::Colon) fail("expected ':' after rate (every ctmc command needs a rate)");
    next();
    if (at_keyword("true")) {
      next();
      return a;
    }
    do {
      Assignment s;
      s.pos = cur().pos;
      expect(Tok::LParen, "'(' to open an update");
      s.variable = identifier("updated variable");
      expect(Tok::Prime, "''' after updated variable");
      expect(Tok::Assign, "'=' in update");
      s.value = expression();
      expect(Tok::RParen, "')' to close an update");
      a.updates.push_back(std::move(s));
    } while (accept(Tok::And));
    return a;
  }

  // or < and < not < relational < additive < multiplicative < unary minus
  Expr expression() {
    Expr e = disjunction();
    if (cur().kind == Tok::Question) unsupported("conditional expressions");
    if (cur().kind == Tok::Implies || cur().kind == Tok::Iff) unsupported("implication operators");
    return e;
  }

  Expr disjunction() {
    Expr e = conjunction();
    while (cur().kind == Tok::Or) {
      const auto pos = cur().pos;
      next();
      e = Expr::binary(ExprKind::Or, std::move(e), conjunction(), pos);
    }
    return e;
  }

  Expr conjunction() {
    Expr e = negation();
    // `&` also separates updates; an update list never reaches here because
    // assignments are parsed only inside parentheses.
    while (cur().kind == Tok::And) {
      const auto pos = cur().pos;
      next();
      e = Expr::binary(ExprKind::And, std::move(e), negation(), pos);
    }
    return e;
  }

  Expr negation() {
    if (cur().kind == Tok::Not) {
      const auto pos = cur().pos;
      next();
      return Expr::unary(ExprKind::Not, negation(), pos);
    }
    return relation();
  }

  Expr relation() {
    Expr e = additive();
    for (;;) {
      ExprKind k;
      switch (cur().kind) {
        case Tok::Assign: k = ExprKind::Eq; break;
        case Tok::Ne: k = ExprKind::Ne; break;
        case Tok::Lt: k = ExprKind::Lt; break;
        case Tok::Le: k = ExprKind::Le; break;
        case Tok::Gt: k = ExprKind::Gt; break;
        case Tok::Ge: k = ExprKind::Ge; break;
        default: return e;
      }
      const auto pos = cur().pos;
      next();
      e = Expr::binary(k, std::move(e), additive(), pos);
    }
  }

  Expr additive() {
    Expr e = multiplicative();
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      // Inside a command, `+` after an update list separates alternatives; the
      // update parser never calls back into expressions at that point.
      const auto k = cur().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
      const auto pos = cur().pos;
      next();
      e = Expr::binary(k, std::move(e), multiplicative(), pos);
    }
    return e;
  }

  Expr multiplicative() {
    Expr e = unary();
    while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
      const auto k = cur().kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
      const auto pos = cur().pos;
      next();
      e = Expr::binary(k, std::move(e), unary(), pos);
    }
    return e;
  }

  Expr unary() {
    if (cur().kind == Tok::Minus) {
      const auto pos = cur().pos;
      next();
      return Expr::unary(ExprKind::Neg, unary(), pos);
    }
    return primary();
  }

  Expr primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Int: {
        auto e = Expr::literal(ExprKind::Int, t.number, t.pos);
        next();
        return e;
      }
      case Tok::Real: {
        auto e = Expr::literal(ExprKind::Real, t.number, t.pos);
        next();
        return e;
      }
      case Tok::Ident: {
        auto e = Expr::ident(t.text, t.pos);
        next();
        if (cur().kind == Tok::LParen) unsupported("function call '" + e.name + "(...)'");
        return e;
      }
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") {
          auto e = Expr::literal(ExprKind::Bool, t.text == "true" ? 1.0 : 0.0, t.pos);
          next();
          return e;
        }
        fail("unexpected keyword '" + t.text + "' in expression");
      case Tok::LParen: {
        next();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LBrace:
        unsupported("function call syntax");
      default:
        fail("expected expression, found " + found());
    }
  }

  const Token& cur() const { return toks_[pos_]; }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool accept(Tok kind) {
    if (cur().kind != kind) return false;
    next();
    return true;
  }
  bool at_keyword(const char* word) const { return cur().kind == Tok::Keyword && cur().text == word; }

  std::string found() const {
    if (cur().kind == Tok::End) return "end of input";
    return "'" + cur().text + "'";
  }

  void expect(Tok kind, const std::string& what) {
    if (cur().kind != kind) fail("expected " + what + ", found " + found());
    next();
  }

  std::string identifier(const std::string& what) {
    if (cur().kind != Tok::Ident) {
      if (cur().kind == Tok::Keyword) fail("expected " + what + ", found reserved word '" + cur().text + "'");
      fail("expected " + what + ", found " + found());
    }
    std::string name = cur().text;
    next();
    return name;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, cur().pos.line, cur().pos.column);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedConstructError(what, cur().pos.line, cur().pos.column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ModelAst parse(std::string_view source) { return Parser(detail::tokenize(source)).model(); }

}  // namespace ctmcfit::prism
