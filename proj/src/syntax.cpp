#include "deltaforge/syntax.hpp"

#include <cctype>

namespace deltaforge {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  bool line_start = true;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
        line_start = true;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' && line_start) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    line_start = false;
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Tok::Number;
    } else {
      t.kind = Tok::Punct;
      j = i + 1;
      if (text.substr(i, 2) == ":=" || text.substr(i, 2) == "->") j = i + 2;
      if (std::string_view("+-*/^()[]{},;:=|#<>.").find(c) == std::string_view::npos)
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    t.text = std::string(text.substr(i, j - i));
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != Tok::End) tokens_.push_back(Token{});
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind != Tok::End && t.kind != Tok::Number && t.text == s;
}

bool TokenStream::accept(std::string_view s) {
  if (!is(s)) return false;
  next();
  return true;
}

Token TokenStream::expect(std::string_view s) {
  if (!is(s)) fail("expected '" + std::string(s) + "'");
  return next();
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Tok::Ident) fail("expected a name");
  return next().text;
}

long TokenStream::expect_int() {
  if (peek().kind != Tok::Number) fail("expected an integer");
  const Token t = next();
  if (t.text.size() > 9) fail_at(t, "integer too large");
  return std::stol(t.text);
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& t, const std::string& message) const {
  std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(message + " (found " + found + ")", t.line, t.column);
}

bool is_derivation_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'd') return false;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return s[1] != '0';
}

unsigned derivation_index(const TokenStream& ts, const Token& t, unsigned m) {
  if (t.kind != Tok::Ident || !is_derivation_name(t.text)) ts.fail_at(t, "expected a derivation name dK");
  if (t.text.size() > 3) ts.fail_at(t, "derivation index out of range");
  const unsigned k = static_cast<unsigned>(std::stoul(t.text.substr(1)));
  if (k == 0 || k > m) ts.fail_at(t, "derivation " + t.text + " is not declared (m=" + std::to_string(m) + ")");
  return k - 1;
}

namespace {

class ExprParser {
 public:
  ExprParser(TokenStream& ts, const DiffRing& ring, const PolyEnv& env) : ts_(ts), ring_(ring), env_(env) {}

  DiffPoly expr() {
    DiffPoly acc = term();
    while (ts_.is("+") || ts_.is("-")) {
      const bool minus = ts_.next().text == "-";
      DiffPoly t = term();
      if (minus)
        acc -= t;
      else
        acc += t;
    }
    return acc;
  }

 private:
  DiffPoly term() {
    DiffPoly acc = unary();
    while (ts_.is("*") || ts_.is("/")) {
      const Token op = ts_.next();
      const Token at = ts_.peek();
      DiffPoly rhs = unary();
      if (op.text == "*") {
        acc *= rhs;
      } else {
        if (!rhs.is_constant() || rhs.is_zero() || !is_rational(rhs.constant_term()))
          ts_.fail_at(at, "division is only allowed by a nonzero rational number");
        const Rational q = rhs.constant_term().constant_term();
        acc = acc.scaled(BaseElem(Rational(1) / q));
      }
    }
    return acc;
  }

  DiffPoly unary() {
    if (ts_.accept("-")) return -unary();
    if (ts_.accept("+")) return unary();
    return power();
  }

  DiffPoly power() {
    DiffPoly base = atom();
    if (ts_.accept("^")) {
      const long e = ts_.expect_int();
      if (e > 64) ts_.fail("exponent too large");
      base = base.pow(static_cast<std::uint32_t>(e));
    }
    return base;
  }

  DiffPoly atom() {
    const Token t = ts_.peek();
    if (t.kind == Tok::Number) {
      ts_.next();
      return lift(Rational(mpz_class(t.text)));
    }
    if (ts_.accept("(")) {
      DiffPoly inner = expr();
      ts_.expect(")");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      if (is_derivation_name(t.text)) return derivative();
      ts_.next();
      if (auto it = env_.find(t.text); it != env_.end()) return it->second;
      if (ring_.find_variable(t.text)) return ring_.var(t.text);
      if (ring_.base().find_constant(t.text)) return ring_.constant(t.text);
      ts_.fail_at(t, "unknown name '" + t.text + "'");
    }
    ts_.fail("expected an expression");
  }

  DiffPoly derivative() {
    DerivOp op;
    for (;;) {
      const Token d = ts_.next();
      const unsigned j = derivation_index(ts_, d, ring_.num_derivations());
      long e = 1;
      if (ts_.accept("^")) e = ts_.expect_int();
      if (e < 0 || e + op.e[j] > 64) ts_.fail_at(d, "derivative exponent too large");
      op.e[j] = static_cast<std::uint16_t>(op.e[j] + e);
      if (ts_.is("*") && ts_.peek(1).kind == Tok::Ident && is_derivation_name(ts_.peek(1).text)) {
        ts_.next();
        continue;
      }
      break;
    }
    ts_.expect("(");
    DiffPoly inner = expr();
    ts_.expect(")");
    return apply_op(ring_, op, inner);
  }

  TokenStream& ts_;
  const DiffRing& ring_;
  const PolyEnv& env_;
};

}  // namespace

DiffPoly parse_expr(TokenStream& ts, const DiffRing& ring, const PolyEnv& env) {
  return ExprParser(ts, ring, env).expr();
}

DiffPoly parse_poly(const DiffRing& ring, std::string_view text, const PolyEnv& env) {
  TokenStream ts(tokenize(text));
  DiffPoly p = parse_expr(ts, ring, env);
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return p;
}

BaseElem parse_base_expr(TokenStream& ts, const BaseRing& ring) {
  DiffRing scratch(ring);
  DiffPoly p = parse_expr(ts, scratch);
  if (!is_base_element(p)) ts.fail("expected an expression in the constants only");
  return p.constant_term();
}

}  // namespace deltaforge
