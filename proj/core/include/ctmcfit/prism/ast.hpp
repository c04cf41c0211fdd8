#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ctmcfit::prism {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class ExprKind {
  Int,
  Real,
  Bool,
  Ident,
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
};

/// Expression tree; children are held by value.
struct Expr {
  ExprKind kind = ExprKind::Int;
  double number = 0.0;  // Int, Real, Bool (0 or 1)
  std::string name;     // Ident
  std::vector<Expr> args;
  SourcePos pos;

  static Expr literal(ExprKind kind, double value, SourcePos pos);
  static Expr ident(std::string name, SourcePos pos);
  static Expr unary(ExprKind kind, Expr operand, SourcePos pos);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs, SourcePos pos);

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Render an expression with full parenthesization; used in diagnostics and tests.
std::string to_string(const Expr& expr);

enum class ConstType { Int, Double };

struct ConstDecl {
  std::string name;
  ConstType type = ConstType::Int;
  std::optional<Expr> value;
  SourcePos pos;
};

struct VarDecl {
  std::string name;
  Expr low;
  Expr high;
  std::optional<Expr> init;
  SourcePos pos;
};

struct Assignment {
  std::string variable;
  Expr value;
  SourcePos pos;
};

struct Alternative {
  Expr rate;
  std::vector<Assignment> updates;  // empty for `true`
  SourcePos pos;
};

struct Command {
  std::optional<std::string> action;
  Expr guard;
  std::vector<Alternative> alternatives;
  SourcePos pos;
};

struct Module {
  std::string name;
  std::vector<VarDecl> variables;
  std::vector<Command> commands;
  SourcePos pos;
};

struct ModelAst {
  std::vector<ConstDecl> constants;
  std::vector<Module> modules;

  const ConstDecl* find_constant(const std::string& name) const;
  /// Constants that have neither a definition nor an int type.
  std::vector<std::string> undefined_doubles() const;
};

}  // namespace ctmcfit::prism
