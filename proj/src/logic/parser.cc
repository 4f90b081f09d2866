#include "stapu/logic/parser.h"

#include <cctype>
#include <string>
#include <vector>

#include "stapu/errors.h"

namespace stapu::logic {
namespace {

enum class Tok {
  kAtom,
  kTrue,
  kFalse,
  kNot,
  kNext,
  kEventually,
  kAlways,
  kUntil,
  kAnd,
  kOr,
  kLParen,
  kRParen,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l = line, col = column;
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      std::string word(text.substr(i, j - i));
      Tok kind = word == "true" ? Tok::kTrue
                 : word == "false" ? Tok::kFalse
                                   : Tok::kAtom;
      out.push_back({kind, std::move(word), l, col});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '!': kind = Tok::kNot; break;
      case 'X': kind = Tok::kNext; break;
      case 'F': kind = Tok::kEventually; break;
      case 'G': kind = Tok::kAlways; break;
      case 'U': kind = Tok::kUntil; break;
      case '&': kind = Tok::kAnd; break;
      case '|': kind = Tok::kOr; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      default: {
        std::size_t j = i + 1;
        if (!std::isupper(static_cast<unsigned char>(c))) {
          // Report the whole symbol run, e.g. "->".
          while (j < text.size() && std::ispunct(static_cast<unsigned char>(text[j])) &&
                 text[j] != '(' && text[j] != ')' && text[j] != '!')
            ++j;
        }
        throw ParseError("unknown operator '" + std::string(text.substr(i, j - i)) + "'",
                         l, col);
      }
    }
    out.push_back({kind, std::string(1, c), l, col});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, column});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula parse_all() {
    Formula f = parse_or();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(t.kind == Tok::kEnd ? msg + " (end of input)" : msg, t.line,
                     t.column);
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (peek().kind == Tok::kOr) {
      take();
      parts.push_back(parse_and());
    }
    return Formula::Or(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_until()};
    while (peek().kind == Tok::kAnd) {
      take();
      parts.push_back(parse_until());
    }
    return Formula::And(std::move(parts));
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (peek().kind == Tok::kUntil) {
      take();
      return Formula::Until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (peek().kind) {
      case Tok::kNext:
        take();
        return Formula::Next(parse_unary());
      case Tok::kEventually:
        take();
        return Formula::Eventually(parse_unary());
      case Tok::kAlways:
        take();
        return Formula::Always(parse_unary());
      case Tok::kNot:
        take();
        if (peek().kind != Tok::kAtom) fail("'!' must be followed by an atom");
        return Formula::NegAtom(take().text);
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    switch (peek().kind) {
      case Tok::kAtom:
        return Formula::Atom(take().text);
      case Tok::kTrue:
        take();
        return Formula::True();
      case Tok::kFalse:
        take();
        return Formula::False();
      case Tok::kLParen: {
        take();
        Formula inner = parse_or();
        if (peek().kind != Tok::kRParen) fail("expected ')'");
        take();
        return inner;
      }
      default:
        fail(peek().kind == Tok::kEnd ? "expected formula"
                                      : "unexpected '" + peek().text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(lex(text)).parse_all(); }

}  // namespace stapu::logic
