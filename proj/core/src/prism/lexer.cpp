#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "ctmcfit/errors.hpp"

namespace ctmcfit::prism::detail {

namespace {

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> words = {
      "ctmc",     "const",      "int",         "double",    "module",        "endmodule", "init",
      "true",     "false",      "rewards",     "endrewards", "system",       "endsystem", "formula",
      "label",    "global",     "dtmc",        "mdp",       "pta",           "probabilistic",
      "nondeterministic", "stochastic", "bool", "endinit",  "invariant",     "endinvariant", "clock",
      "player",   "endplayer",  "smg",         "ctmdp",     "lts",           "pomdp",     "popta",
      "observables", "endobservables",
  };
  return words;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

const char* describe(Tok kind) noexcept {
  switch (kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Keyword: return "keyword";
    case Tok::Int: return "integer";
    case Tok::Real: return "number";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Prime: return "'''";
    case Tok::Assign: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Not: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Arrow: return "'->'";
    case Tok::DotDot: return "'..'";
    case Tok::Question: return "'?'";
    case Tok::Implies: return "'=>'";
    case Tok::Iff: return "'<=>'";
    case Tok::String: return "string";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](std::size_t off) { return i + off < src.size() ? src[i + off] : '\0'; };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      const SourcePos start{line, col};
      advance(2);
      while (i < src.size() && !(src[i] == '*' && peek(1) == '/')) advance(1);
      if (i >= src.size()) throw ParseError("unterminated block comment", start.line, start.column);
      advance(2);
      continue;
    }

    Token tok;
    tok.pos = {line, col};
    if (ident_start(c)) {
      std::size_t n = 1;
      while (ident_char(peek(n))) ++n;
      tok.text = std::string(src.substr(i, n));
      tok.kind = keywords().count(tok.text) ? Tok::Keyword : Tok::Ident;
      advance(n);
      out.push_back(std::move(tok));
      continue;
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) {
      std::size_t n = 0;
      bool real = false;
      while (digit(peek(n))) ++n;
      if (peek(n) == '.' && peek(n + 1) != '.') {
        real = true;
        ++n;
        while (digit(peek(n))) ++n;
      }
      if (peek(n) == 'e' || peek(n) == 'E') {
        std::size_t m = n + 1;
        if (peek(m) == '+' || peek(m) == '-') ++m;
        if (digit(peek(m))) {
          real = true;
          n = m;
          while (digit(peek(n))) ++n;
        }
      }
      tok.text = std::string(src.substr(i, n));
      tok.kind = real ? Tok::Real : Tok::Int;
      const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size())
        throw ParseError("malformed number '" + tok.text + "'", tok.pos.line, tok.pos.column);
      advance(n);
      out.push_back(std::move(tok));
      continue;
    }

    if (c == '"') {
      std::size_t n = 1;
      while (peek(n) != '"' && peek(n) != '\n' && peek(n) != '\0') ++n;
      if (peek(n) != '"') throw ParseError("unterminated string", tok.pos.line, tok.pos.column);
      tok.kind = Tok::String;
      tok.text = std::string(src.substr(i + 1, n - 1));
      advance(n + 1);
      out.push_back(std::move(tok));
      continue;
    }

    auto emit = [&](Tok kind, std::size_t n) {
      tok.kind = kind;
      tok.text = std::string(src.substr(i, n));
      advance(n);
      out.push_back(tok);
    };
    switch (c) {
      case '[': emit(Tok::LBracket, 1); break;
      case ']': emit(Tok::RBracket, 1); break;
      case '(': emit(Tok::LParen, 1); break;
      case ')': emit(Tok::RParen, 1); break;
      case '{': emit(Tok::LBrace, 1); break;
      case '}': emit(Tok::RBrace, 1); break;
      case ';': emit(Tok::Semi, 1); break;
      case ':': emit(Tok::Colon, 1); break;
      case ',': emit(Tok::Comma, 1); break;
      case '\'': emit(Tok::Prime, 1); break;
      case '&': emit(Tok::And, 1); break;
      case '|': emit(Tok::Or, 1); break;
      case '+': emit(Tok::Plus, 1); break;
      case '*': emit(Tok::Star, 1); break;
      case '/': emit(Tok::Slash, 1); break;
      case '?': emit(Tok::Question, 1); break;
      case '-': peek(1) == '>' ? emit(Tok::Arrow, 2) : emit(Tok::Minus, 1); break;
      case '=': peek(1) == '>' ? emit(Tok::Implies, 2) : emit(Tok::Assign, 1); break;
      case '!': peek(1) == '=' ? emit(Tok::Ne, 2) : emit(Tok::Not, 1); break;
      case '>': peek(1) == '=' ? emit(Tok::Ge, 2) : emit(Tok::Gt, 1); break;
      case '<':
        if (peek(1) == '=' && peek(2) == '>')
          emit(Tok::Iff, 3);
        else if (peek(1) == '=')
          emit(Tok::Le, 2);
        else
          emit(Tok::Lt, 1);
        break;
      case '.':
        if (peek(1) == '.') {
          emit(Tok::DotDot, 2);
          break;
        }
        [[fallthrough]];
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace ctmcfit::prism::detail
