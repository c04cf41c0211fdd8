#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctmcfit/prism/ast.hpp"

namespace ctmcfit::prism::detail {

enum class Tok {
  End,
  Ident,
  Keyword,
  Int,
  Real,
  LBracket,
  RBracket,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semi,
  Colon,
  Comma,
  Prime,
  Assign,  // =
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Not,
  Plus,
  Minus,
  Star,
  Slash,
  Arrow,
  DotDot,
  Question,
  Implies,  // =>
  Iff,      // <=>
  String,   // "...", only seen in constructs outside the subset
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

/// Split source into tokens, dropping whitespace and `//` comments. The last token is End.
std::vector<Token> tokenize(std::string_view source);

const char* describe(Tok kind) noexcept;

}  // namespace ctmcfit::prism::detail
