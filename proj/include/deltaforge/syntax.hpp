#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "deltaforge/diffpoly.hpp"

namespace deltaforge {

class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

/// Splits text into identifiers, unsigned integers and punctuation. `#` starts
/// a comment only at the beginning of a line (after whitespace); elsewhere it
/// is the natural-sum operator of the ordinal syntax.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with error helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Tok::End; }
  bool is(std::string_view punct_or_word, std::size_t ahead = 0) const;
  bool accept(std::string_view punct_or_word);
  Token expect(std::string_view punct_or_word);
  std::string expect_ident();
  long expect_int();
  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// True for reserved derivation names d1, d2, ...
bool is_derivation_name(std::string_view s);
/// 0-based index of `dK`; throws ParseError via the stream otherwise.
unsigned derivation_index(const TokenStream& ts, const Token& t, unsigned m);

/// Named polynomials visible to the parser.
using PolyEnv = std::map<std::string, DiffPoly, std::less<>>;

/// Parses one expression from the stream (stops before an unexpected token).
DiffPoly parse_expr(TokenStream& ts, const DiffRing& ring, const PolyEnv& env = {});

/// Parses a complete expression string.
DiffPoly parse_poly(const DiffRing& ring, std::string_view text, const PolyEnv& env = {});

/// Parses a BaseElem over the ring's constants.
BaseElem parse_base_expr(TokenStream& ts, const BaseRing& ring);

}  // namespace deltaforge
