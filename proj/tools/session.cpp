#include "session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "deltaforge/axioms.hpp"
#include "deltaforge/dvariety.hpp"
#include "deltaforge/kolchin.hpp"

namespace deltaforge::cli {

void apply_limits_spec(Limits& limits, std::string_view spec) {
  std::string s(spec);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string item;
  while (in >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("limits: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    unsigned long long v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error("limits: bad value for " + key + ": '" + value + "'");
    }
    if (key == "max_order" || key == "max-order")
      limits.max_order = static_cast<unsigned>(v);
    else if (key == "max_degree" || key == "max-degree")
      limits.max_degree = static_cast<unsigned>(v);
    else if (key == "max_steps" || key == "max-steps")
      limits.max_steps = static_cast<std::size_t>(v);
    else
      throw Error("limits: unknown key '" + key + "'");
  }
}

namespace {

const std::set<std::string, std::less<>> kDeclarations{"ring", "constants", "sigma", "vars", "poly",
                                                        "set",  "section",   "group", "matrix"};
const std::set<std::string, std::less<>> kVerbs{
    "check-charset", "reduce",     "prolong",    "tau-map",    "sharp-system", "integrability", "logderiv",
    "crossed-hom",   "linear-int", "axiom-dcf",  "axiom-dcfa",   "dsm-check",     "jet",
    "kolchin",       "g-r",        "ordinal"};

bool adjacent(const Token& a, const Token& b) {
  return a.line == b.line && a.column + static_cast<int>(a.text.size()) == b.column;
}

// Number of tokens spelling the keyword (`check-charset` is three tokens).
std::size_t keyword_length(const std::vector<Token>& toks, std::string& keyword) {
  keyword = toks[0].text;
  std::size_t n = 1;
  while (n + 1 < toks.size() && toks[n].text == "-" && toks[n + 1].kind == Tok::Ident && adjacent(toks[n - 1], toks[n]) &&
         adjacent(toks[n], toks[n + 1])) {
    keyword += "-" + toks[n + 1].text;
    n += 2;
  }
  return n;
}

std::string collapse(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view source) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : source) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

}  // namespace

Session parse_session(std::string_view source, std::string name) {
  std::vector<Token> toks = tokenize(source);
  const std::vector<std::string> lines = split_lines(source);
  Session session;
  session.name = std::move(name);
  std::vector<Token> open;
  std::vector<Token> cur;
  auto flush = [&](const Token& end) {
    if (cur.empty()) return;
    Statement st;
    st.line = cur.front().line;
    std::size_t kw = keyword_length(cur, st.keyword);
    (void)kw;
    if (cur.front().kind != Tok::Ident || (!kDeclarations.count(st.keyword) && !kVerbs.count(st.keyword)))
      throw ParseError("unknown statement '" + st.keyword + "'", cur.front().line, cur.front().column);
    std::string echo;
    const Token& last = cur.back();
    for (int l = cur.front().line; l <= last.line; ++l) {
      std::string text = lines.at(static_cast<std::size_t>(l - 1));
      const auto first = text.find_first_not_of(" \t\r");
      if (first != std::string::npos && text[first] == '#') continue;
      if (l == last.line) text = text.substr(0, static_cast<std::size_t>(last.column - 1) + last.text.size());
      if (l == cur.front().line) text = text.substr(static_cast<std::size_t>(cur.front().column - 1));
      echo += text + " ";
    }
    st.echo = collapse(echo);
    Token e = end;
    e.kind = Tok::End;
    e.text.clear();
    cur.push_back(e);
    st.tokens = std::move(cur);
    cur.clear();
    session.statements.push_back(std::move(st));
  };
  for (const Token& t : toks) {
    if (t.kind == Tok::End) {
      if (!open.empty()) {
        const Token& o = open.back();
        const std::string what = o.text == "(" ? "parenthesis" : o.text == "[" ? "bracket" : "brace";
        throw ParseError("unbalanced " + what + ": '" + o.text + "' is never closed", o.line, o.column);
      }
      Token end = cur.empty() ? t : cur.back();
      end.column += static_cast<int>(end.text.size());
      flush(end);
      break;
    }
    const bool starts_declaration = t.kind == Tok::Ident && kDeclarations.count(t.text);
    if (open.empty() && !cur.empty() && (t.line != cur.back().line || starts_declaration)) {
      Token end = cur.back();
      end.column += static_cast<int>(end.text.size());
      flush(end);
    }
    if (t.kind == Tok::Punct && (t.text == "(" || t.text == "[" || t.text == "{")) open.push_back(t);
    if (t.kind == Tok::Punct && (t.text == ")" || t.text == "]" || t.text == "}")) {
      static const std::map<std::string, std::string> match{{")", "("}, {"]", "["}, {"}", "{"}};
      if (open.empty() || open.back().text != match.at(t.text))
        throw ParseError("unbalanced '" + t.text + "'", t.line, t.column);
      open.pop_back();
    }
    cur.push_back(t);
  }
  return session;
}

namespace {

Json verdict_json(const DiffRing* ring, const std::string& name, const Verdict& v) {
  Json j;
  j["name"] = name;
  j["verdict"] = to_string(v.kind);
  j["detail"] = v.detail;
  if (v.witness && ring)
    j["witness"] = ring->format(*v.witness);
  else
    j["witness"] = nullptr;
  return j;
}

std::string format_op(const DerivOp& op) {
  std::string s;
  for (unsigned j = 0; j < kMaxDerivations; ++j) {
    if (!op.e[j]) continue;
    if (!s.empty()) s += "*";
    s += "d" + std::to_string(j + 1);
    if (op.e[j] > 1) s += "^" + std::to_string(op.e[j]);
  }
  return s.empty() ? "1" : s;
}

struct Bindings {
  PolyEnv polys;
  std::map<std::string, std::vector<DiffPoly>, std::less<>> sets;
  std::map<std::string, std::vector<std::vector<DiffPoly>>, std::less<>> sections;
  std::map<std::string, GroupExpr, std::less<>> groups;
  std::map<std::string, BaseMatrix, std::less<>> matrices;
};

class Interpreter {
 public:
  explicit Interpreter(const RunFlags& flags) : flags_(flags) { opts_.max_steps = flags.limits.max_steps; }

  /// Returns a report entry for verbs; declarations return null.
  Json execute(const Statement& st) {
    TokenStream ts(st.tokens);
    std::string kw;
    const std::size_t n = keyword_length(st.tokens, kw);
    for (std::size_t k = 0; k < n; ++k) ts.next();
    if (kDeclarations.count(kw)) {
      st_tokens_ = st.tokens;
      declare(kw, ts);
      finish_statement(ts);
      return nullptr;
    }
    declare_u_names(st.tokens);
    Json entry;
    entry["line"] = st.line;
    entry["command"] = st.echo;
    entry["verb"] = kw;
    entry["verdicts"] = Json::array();
    entry["output"] = Json::object();
    try {
      verb(kw, ts, entry);
      finish_statement(ts);
    } catch (const LimitExceeded& e) {
      entry["verdicts"].push_back(verdict_json(nullptr, "limit", Verdict::unknown(e.what())));
    }
    return entry;
  }

 private:
  // ---- ring declaration -------------------------------------------------

  void declare(const std::string& kw, TokenStream& ts) {
    if (kw == "ring") return declare_ring(ts);
    if (kw == "constants") return declare_constants(ts);
    if (kw == "sigma") return declare_sigma(ts);
    if (kw == "vars") return declare_vars(ts);
    declare_u_names(st_tokens_);
    const DiffRing& r = ring();
    const Token name_tok = ts.peek();
    const std::string name = ts.expect_ident();
    if (taken(name)) ts.fail_at(name_tok, "name '" + name + "' is already bound");
    if (is_derivation_name(name) || kDeclarations.count(name))
      ts.fail_at(name_tok, "'" + name + "' is reserved");
    ts.expect(":=");
    if (kw == "poly") {
      b_.polys[name] = parse_expr(ts, r, b_.polys);
    } else if (kw == "set") {
      b_.sets[name] = parse_set_literal(ts);
    } else if (kw == "section") {
      b_.sections[name] = parse_section_literal(ts);
    } else if (kw == "group") {
      b_.groups[name] = parse_group_expr(ts);
    } else if (kw == "matrix") {
      b_.matrices[name] = parse_matrix_literal(ts);
    }
  }

  bool taken(const std::string& name) const {
    return b_.polys.count(name) || b_.sets.count(name) || b_.sections.count(name) || b_.groups.count(name) ||
           b_.matrices.count(name) || (ring_ && (ring_->find_variable(name) || ring_->base().find_constant(name)));
  }

  void declare_ring(TokenStream& ts) {
    if (m_) ts.fail("ring is already declared");
    ts.expect("m");
    ts.expect("=");
    const Token t = ts.peek();
    const long m = ts.expect_int();
    if (m < 1 || m > static_cast<long>(kMaxDerivations)) ts.fail_at(t, "m must be between 1 and 8");
    m_ = static_cast<unsigned>(m);
  }

  void require_unfrozen(TokenStream& ts, const std::string& what) {
    if (!m_) ts.fail("declare 'ring m=N' before " + what);
    if (ring_) ts.fail(what + " must come before any binding or command");
  }

  // Tokens of one table value, up to a top-level ',' ';' or '}'.
  std::vector<Token> value_tokens(TokenStream& ts) {
    std::vector<Token> out;
    int depth = 0;
    while (!ts.at_end()) {
      if (depth == 0 && (ts.is(",") || ts.is(";") || ts.is("}"))) break;
      const Token t = ts.next();
      if (t.text == "(") ++depth;
      if (t.text == ")") --depth;
      out.push_back(t);
    }
    if (out.empty()) ts.fail("expected a value");
    Token end = out.back();
    end.kind = Tok::End;
    end.column += static_cast<int>(end.text.size());
    end.text.clear();
    out.push_back(end);
    return out;
  }

  BaseElem parse_value(std::vector<Token> toks, const BaseRing& base) {
    TokenStream vs(std::move(toks));
    BaseElem v = parse_base_expr(vs, base);
    if (!vs.at_end()) vs.fail("unexpected token in value");
    return v;
  }

  void declare_constants(TokenStream& ts) {
    require_unfrozen(ts, "constants");
    if (!names_.empty()) ts.fail("constants are already declared");
    ts.expect("{");
    std::vector<std::vector<std::pair<unsigned, std::vector<Token>>>> entries;
    while (!ts.is("}")) {
      const Token nt = ts.peek();
      const std::string name = ts.expect_ident();
      if (is_derivation_name(name) || kDeclarations.count(name)) ts.fail_at(nt, "'" + name + "' is reserved");
      if (std::find(names_.begin(), names_.end(), name) != names_.end())
        ts.fail_at(nt, "constant '" + name + "' declared twice");
      names_.push_back(name);
      entries.emplace_back();
      if (ts.accept(":")) {
        do {
          const Token dt = ts.next();
          const unsigned j = derivation_index(ts, dt, m_);
          for (const auto& [k, _] : entries.back())
            if (k == j) ts.fail_at(dt, dt.text + "(" + name + ") given twice");
          ts.expect("=");
          entries.back().emplace_back(j, value_tokens(ts));
        } while (ts.accept(","));
      }
      if (!ts.accept(";")) break;
    }
    ts.expect("}");
    // Values may mention constants declared later in the block.
    const std::vector<std::vector<BaseElem>> zero(m_, std::vector<BaseElem>(names_.size()));
    const BaseRing scratch(m_, names_, zero);
    table_ = zero;
    for (std::size_t c = 0; c < entries.size(); ++c)
      for (auto& [j, toks] : entries[c]) table_[j][c] = parse_value(toks, scratch);
  }

  void declare_sigma(TokenStream& ts) {
    require_unfrozen(ts, "sigma");
    if (sigma_) ts.fail("sigma is already declared");
    const BaseRing scratch(m_, names_, table_.empty() ? std::vector<std::vector<BaseElem>>(m_) : table_);
    std::vector<BaseElem> sigma;
    for (std::size_t c = 0; c < names_.size(); ++c) sigma.push_back(BaseElem::variable(static_cast<ConstIndex>(c)));
    std::vector<bool> seen(names_.size());
    ts.expect("{");
    while (!ts.is("}")) {
      const Token nt = ts.peek();
      const std::string name = ts.expect_ident();
      auto c = scratch.find_constant(name);
      if (!c) ts.fail_at(nt, "unknown constant '" + name + "'");
      if (seen[*c]) ts.fail_at(nt, "sigma(" + name + ") given twice");
      seen[*c] = true;
      ts.expect("->");
      sigma[*c] = parse_value(value_tokens(ts), scratch);
      if (!ts.accept(",") && !ts.accept(";")) break;
    }
    ts.expect("}");
    sigma_ = std::move(sigma);
  }

  void declare_vars(TokenStream& ts) {
    require_unfrozen(ts, "vars");
    if (vars_declared_) ts.fail("vars are already declared");
    vars_declared_ = true;
    ts.expect("[");
    while (!ts.is("]")) {
      const Token t = ts.peek();
      const std::string v = ts.expect_ident();
      if (is_derivation_name(v) || kDeclarations.count(v)) ts.fail_at(t, "'" + v + "' is reserved");
      if (std::find(vars_.begin(), vars_.end(), v) != vars_.end() ||
          std::find(names_.begin(), names_.end(), v) != names_.end())
        ts.fail_at(t, "name '" + v + "' declared twice");
      vars_.push_back(v);
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
  }

  DiffRing& ring() {
    if (ring_) return *ring_;
    if (!m_) throw Error("no ring declared: start the session with 'ring m=N'");
    std::vector<std::vector<BaseElem>> table =
        table_.empty() ? std::vector<std::vector<BaseElem>>(m_, std::vector<BaseElem>(names_.size())) : table_;
    BaseRing base(m_, names_, table, sigma_);
    const RingCheck check = verify_ring(base);
    if (!check.ok()) throw Error("ring check failed: " + check.violations.front().message);
    ring_.emplace(std::move(base), vars_);
    return *ring_;
  }

  const BaseRing& base_ring() { return ring().base(); }

  // ---- argument parsing ---------------------------------------------------

  void finish_statement(TokenStream& ts) {
    if (!ts.at_end()) ts.fail("unexpected token");
  }

  std::vector<DiffPoly> parse_set_literal(TokenStream& ts) {
    std::vector<DiffPoly> out;
    ts.expect("{");
    while (!ts.is("}")) {
      out.push_back(parse_expr(ts, ring(), b_.polys));
      if (!ts.accept(",")) break;
    }
    ts.expect("}");
    return out;
  }

  std::vector<DiffPoly> parse_set_arg(TokenStream& ts) {
    if (ts.is("{")) return parse_set_literal(ts);
    const Token t = ts.peek();
    const std::string name = ts.expect_ident();
    auto it = b_.sets.find(name);
    if (it == b_.sets.end()) ts.fail_at(t, "unknown set '" + name + "'");
    return it->second;
  }

  std::vector<DiffPoly> parse_tuple(TokenStream& ts) {
    std::vector<DiffPoly> out;
    ts.expect("[");
    while (!ts.is("]")) {
      out.push_back(parse_expr(ts, ring(), b_.polys));
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
    return out;
  }

  std::vector<std::vector<DiffPoly>> parse_section_literal(TokenStream& ts) {
    std::vector<std::vector<DiffPoly>> out;
    ts.expect("[");
    while (!ts.is("]")) {
      out.push_back(parse_tuple(ts));
      if (!ts.accept(";") && !ts.accept(",")) break;
    }
    ts.expect("]");
    return out;
  }

  std::vector<std::vector<DiffPoly>> parse_section_arg(TokenStream& ts) {
    if (ts.is("[")) return parse_section_literal(ts);
    const Token t = ts.peek();
    const std::string name = ts.expect_ident();
    auto it = b_.sections.find(name);
    if (it == b_.sections.end()) ts.fail_at(t, "unknown section '" + name + "'");
    return it->second;
  }

  GroupExpr parse_group_expr(TokenStream& ts) {
    std::vector<GroupFactor> factors;
    do {
      const Token t = ts.peek();
      const std::string f = ts.expect_ident();
      if (f == "Ga") {
        factors.push_back({GroupFactor::Kind::Ga, 1});
      } else if (f == "Gm") {
        factors.push_back({GroupFactor::Kind::Gm, 1});
      } else if (f == "GL") {
        ts.expect("(");
        const Token nt = ts.peek();
        const long n = ts.expect_int();
        if (n < 1 || n > 3) ts.fail_at(nt, "GL(n) is supported for 1 <= n <= 3");
        ts.expect(")");
        factors.push_back({GroupFactor::Kind::GL, static_cast<unsigned>(n)});
      } else {
        ts.fail_at(t, "expected a catalog group (Ga, Gm, GL(n))");
      }
    } while (ts.accept("x"));
    return GroupExpr(std::move(factors));
  }

  GroupExpr parse_group_arg(TokenStream& ts) {
    if (ts.peek().kind == Tok::Ident) {
      if (auto it = b_.groups.find(ts.peek().text); it != b_.groups.end()) {
        ts.next();
        return it->second;
      }
    }
    return parse_group_expr(ts);
  }

  BaseMatrix parse_matrix_literal(TokenStream& ts) {
    std::vector<std::vector<BaseElem>> rows;
    const Token open = ts.expect("[");
    while (!ts.is("]")) {
      rows.emplace_back();
      ts.expect("[");
      while (!ts.is("]")) {
        rows.back().push_back(parse_base_expr(ts, base_ring()));
        if (!ts.accept(",")) break;
      }
      ts.expect("]");
      if (!ts.accept(",") && !ts.accept(";")) break;
    }
    ts.expect("]");
    if (rows.empty() || rows.front().empty()) ts.fail_at(open, "empty matrix");
    BaseMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) ts.fail_at(open, "matrix rows have different lengths");
      for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  BaseMatrix parse_matrix_arg(TokenStream& ts) {
    if (ts.is("[")) return parse_matrix_literal(ts);
    const Token t = ts.peek();
    const std::string name = ts.expect_ident();
    auto it = b_.matrices.find(name);
    if (it == b_.matrices.end()) ts.fail_at(t, "unknown matrix '" + name + "'");
    return it->second;
  }

  std::vector<BaseMatrix> parse_matrix_list(TokenStream& ts) {
    std::vector<BaseMatrix> out;
    ts.expect("[");
    while (!ts.is("]")) {
      out.push_back(parse_matrix_arg(ts));
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
    return out;
  }

  std::vector<unsigned> parse_derivations(TokenStream& ts) {
    std::vector<unsigned> out;
    do {
      const Token t = ts.next();
      out.push_back(derivation_index(ts, t, m_));
    } while (ts.accept(","));
    return out;
  }

  Partition parse_partition(TokenStream& ts) {
    ts.expect("wrt");
    return Partition::from_distinguished(m_, parse_derivations(ts));
  }

  DerivMask parse_over(TokenStream& ts) {
    if (!ts.accept("over")) return all_derivations(m_);
    DerivMask mask = 0;
    for (unsigned j : parse_derivations(ts)) mask |= 1u << j;
    return mask;
  }

  std::vector<std::uint32_t> parse_var_list(TokenStream& ts) {
    std::vector<std::uint32_t> out;
    ts.expect("[");
    while (!ts.is("]")) {
      const Token t = ts.peek();
      const std::string v = ts.expect_ident();
      auto idx = ring().find_variable(v);
      if (!idx) ts.fail_at(t, "unknown variable '" + v + "'");
      if (std::find(out.begin(), out.end(), *idx) != out.end()) ts.fail_at(t, "variable '" + v + "' listed twice");
      out.push_back(*idx);
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
    return out;
  }

  // Mentioning u<K>_<x> for a declared x declares that tangent coordinate.
  void declare_u_names(const std::vector<Token>& toks) {
    if (!m_) return;
    static const std::regex re("u([1-9][0-9]*)_(.+)");
    for (const Token& t : toks) {
      std::smatch m;
      if (t.kind != Tok::Ident || !std::regex_match(t.text, m, re)) continue;
      const unsigned long d = std::stoul(m[1].str());
      if (d > m_ || b_.polys.count(t.text)) continue;
      DiffRing& r = ring();
      if (r.find_variable(t.text)) continue;
      auto x = r.find_variable(m[2].str());
      if (x && !is_u_name(m[2].str())) ensure_u_block(r, static_cast<unsigned>(d - 1), {*x});
    }
  }

  bool is_u_name(const std::string& name) {
    static const std::regex re("u[1-9][0-9]*_(.+)");
    std::smatch m;
    return std::regex_match(name, m, re) && ring().find_variable(m[1].str()).has_value();
  }

  std::vector<std::uint32_t> parse_block(TokenStream& ts) {
    if (ts.accept("on")) return parse_var_list(ts);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < ring().variables().size(); ++i)
      if (!is_u_name(ring().variables()[i])) out.push_back(i);
    return out;
  }

  Rational parse_rational(TokenStream& ts) {
    const Token t = ts.peek();
    const BaseElem v = parse_base_expr(ts, base_ring());
    if (!is_rational(v)) ts.fail_at(t, "expected a rational number");
    return v.constant_term();
  }

  // ---- helpers --------------------------------------------------------------

  void check_limits(const std::vector<DiffPoly>& ps) {
    for (const auto& p : ps) {
      if (max_order(p) > flags_.limits.max_order)
        throw LimitExceeded("input " + ring().format(p) + " exceeds max-order " +
                            std::to_string(flags_.limits.max_order));
      if (p.total_degree() > flags_.limits.max_degree)
        throw LimitExceeded("input " + ring().format(p) + " exceeds max-degree " +
                            std::to_string(flags_.limits.max_degree));
    }
  }

  void check_limits(const std::vector<std::vector<DiffPoly>>& s) {
    for (const auto& t : s) check_limits(t);
  }

  Json strings(const std::vector<DiffPoly>& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back(ring().format(p));
    return a;
  }

  Json block_names(const std::vector<std::uint32_t>& block) {
    Json a = Json::array();
    for (auto v : block) a.push_back(ring().variables()[v]);
    return a;
  }

  void add(Json& entry, const std::string& name, const Verdict& v) {
    entry["verdicts"].push_back(verdict_json(ring_ ? &*ring_ : nullptr, name, v));
  }

  // ---- verbs ----------------------------------------------------------------

  void verb(const std::string& kw, TokenStream& ts, Json& e) {
    if (kw == "check-charset") return check_charset(ts, e);
    if (kw == "reduce") return reduce(ts, e);
    if (kw == "prolong") return prolong(ts, e);
    if (kw == "tau-map") return tau_map(ts, e);
    if (kw == "sharp-system") return sharp(ts, e);
    if (kw == "integrability") return integrability(ts, e);
    if (kw == "logderiv") return logderiv(ts, e);
    if (kw == "crossed-hom") return crossed_hom(ts, e);
    if (kw == "linear-int") return linear_int(ts, e);
    if (kw == "axiom-dcf") return axiom_dcf(ts, e);
    if (kw == "axiom-dcfa") return axiom_dcfa(ts, e);
    if (kw == "dsm-check") return dsm_check(ts, e);
    if (kw == "jet") return jet(ts, e);
    if (kw == "kolchin") return kolchin(ts, e);
    if (kw == "g-r") return g_r(ts, e);
    if (kw == "ordinal") return ordinal(ts, e);
  }

  void check_charset(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> set = parse_set_arg(ts);
    const DerivMask mask = parse_over(ts);
    finish_statement(ts);
    check_limits(set);
    const DiffRing& r = ring();
    AutoSetResult as = make_autoreduced(r, set, mask);
    if (!as.ok()) {
      add(e, "autoreduced", Verdict::fails(std::nullopt, as.violation->message));
      return;
    }
    const CharsetCertificate cert = is_charset_of_prime(r, *as.set, opts_);
    Json& out = e["output"];
    out["lambda"] = strings(cert.lambda.elements());
    Json leaders = Json::array();
    for (std::size_t i = 0; i < cert.lambda.size(); ++i) leaders.push_back(r.format(cert.lambda.leader(i).leader));
    out["leaders"] = leaders;
    Json pairs = Json::array();
    for (const auto& pc : cert.coherence.pairs) {
      Json p;
      p["i"] = pc.pair.i + 1;
      p["j"] = pc.pair.j + 1;
      p["v"] = r.format(pc.pair.v);
      p["delta"] = r.format(pc.delta);
      p["remainder"] = r.format(pc.remainder);
      p["verdict"] = to_string(pc.verdict.kind);
      pairs.push_back(p);
    }
    out["delta_pairs"] = pairs;
    out["primality_stage"] = to_string(cert.primality.stage);
    if (cert.primality.discriminant) out["discriminant"] = r.format(*cert.primality.discriminant);
    if (!cert.primality.factors.empty()) out["factors"] = strings(cert.primality.factors);
    add(e, "coherence", cert.coherence.verdict);
    add(e, "primality", cert.primality.verdict);
    add(e, "no-reduced-element", cert.no_reduced_element);
    add(e, "charset", cert.overall);
  }

  void reduce(TokenStream& ts, Json& e) {
    const DiffPoly g = parse_expr(ts, ring(), b_.polys);
    ts.expect("by");
    const std::vector<DiffPoly> set = parse_set_arg(ts);
    const DerivMask mask = parse_over(ts);
    ReduceOptions o = opts_;
    if (ts.accept("tie")) {
      const Token t = ts.peek();
      const std::string which = ts.expect_ident();
      if (which == "highest")
        o.tie = TieBreak::HighestIndex;
      else if (which != "lowest")
        ts.fail_at(t, "expected 'lowest' or 'highest'");
    }
    finish_statement(ts);
    check_limits({g});
    check_limits(set);
    const DiffRing& r = ring();
    const AutoSet lambda = require_autoreduced(r, set, mask);
    const ReductionCert cert = ritt_reduce(r, g, lambda, o);
    Json& out = e["output"];
    out["lambda"] = strings(lambda.elements());
    out["remainder"] = r.format(cert.remainder);
    out["sep_exp"] = cert.sep_exp;
    out["init_exp"] = cert.init_exp;
    Json comb = Json::array();
    for (const auto& t : cert.combination) {
      Json c;
      c["quotient"] = r.format(t.quotient);
      c["theta"] = format_op(t.theta);
      c["index"] = t.index + 1;
      comb.push_back(c);
    }
    out["combination"] = comb;
    add(e, "certificate", verify_certificate(r, g, lambda, cert)
                              ? Verdict::holds("(prod S^a I^b) g = sum q theta f + R expands exactly")
                              : Verdict::fails(std::nullopt, "certificate identity does not expand"));
  }

  void prolong(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> set = parse_set_arg(ts);
    const Partition part = parse_partition(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(set);
    const ProlongedSystem sys = prolongation_equations(ring(), set, part, block);
    Json& out = e["output"];
    out["partition"] = part.describe();
    out["x_block"] = block_names(block);
    Json eqs = Json::object();
    for (std::size_t i = 0; i < part.r(); ++i) {
      std::vector<std::uint32_t> ub;
      for (auto x : block) ub.push_back(sys.blocks[i].at(x));
      Json d;
      d["u_block"] = block_names(ub);
      d["equations"] = strings(sys.equations[i]);
      eqs["d" + std::to_string(part.dist[i] + 1)] = d;
    }
    out["prolongation"] = eqs;
    out["twist_free"] = sys.twist_free;
    out["caveat"] = "computed from the given generators: this is tau V only if they generate I(V) as a differential ideal";
  }

  void tau_map(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> f = parse_tuple(ts);
    const Partition part = parse_partition(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(f);
    std::vector<UBlock> blocks;
    for (unsigned d : part.dist) blocks.push_back(ensure_u_block(ring(), d, block));
    e["output"]["partition"] = part.describe();
    e["output"]["x_block"] = block_names(block);
    e["output"]["tau_f"] = strings(tau_of_map(ring(), f, part, blocks));
  }

  void sharp(TokenStream& ts, Json& e) {
    const auto s = parse_section_arg(ts);
    const Partition part = parse_partition(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(s);
    e["output"]["partition"] = part.describe();
    e["output"]["equations"] = strings(sharp_system(ring(), part, block, s));
  }

  Json residues(const DVarReport& rep) {
    Json a = Json::array();
    for (const auto& r : rep.residues) {
      Json j;
      j["label"] = r.label;
      j["value"] = ring().format(r.value);
      a.push_back(j);
    }
    return a;
  }

  void integrability(TokenStream& ts, Json& e) {
    const auto s = parse_section_arg(ts);
    const Partition part = parse_partition(ts);
    std::vector<DiffPoly> gens;
    if (ts.accept("mod")) gens = parse_set_arg(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(s);
    check_limits(gens);
    const RelDVar v{gens, part, block, s};
    const DVarReport valid = section_valid(ring(), v);
    const DVarReport integ = integrability_check(ring(), v);
    e["output"]["partition"] = part.describe();
    e["output"]["section_residues"] = residues(valid);
    e["output"]["integrability_residues"] = residues(integ);
    add(e, "section-valid", valid.verdict);
    add(e, "integrability", integ.verdict);
  }

  GroupSection parse_group_section(TokenStream& ts) {
    GroupExpr g = parse_group_arg(ts);
    ts.expect("with");
    auto s = parse_section_arg(ts);
    const Partition part = parse_partition(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(s);
    GroupSection gs{std::move(g), block, part, std::move(s)};
    validate(ring(), gs);
    return gs;
  }

  void logderiv(TokenStream& ts, Json& e) {
    const GroupSection gs = parse_group_section(ts);
    const TauPoint ell = log_derivative(ring(), gs);
    Json a = Json::array();
    for (const auto& x : ell.flatten()) a.push_back(format(ring(), x));
    e["output"]["group"] = gs.group.describe();
    e["output"]["partition"] = gs.part.describe();
    e["output"]["coordinates"] = block_names(gs.coords);
    e["output"]["l"] = a;
  }

  void crossed_hom(TokenStream& ts, Json& e) {
    const GroupSection gs = parse_group_section(ts);
    e["output"]["group"] = gs.group.describe();
    e["output"]["partition"] = gs.part.describe();
    add(e, "crossed-hom", crossed_hom_check(ring(), gs));
    add(e, "kernel-law", kernel_law_check(ring(), gs));
  }

  void linear_int(TokenStream& ts, Json& e) {
    const std::vector<BaseMatrix> a = parse_matrix_list(ts);
    const Partition part = parse_partition(ts);
    finish_statement(ts);
    e["output"]["partition"] = part.describe();
    add(e, "linear-integrability", linear_integrability(ring(), part, a));
  }

  void axiom_report(const AxiomInstance& inst, Json& e) {
    Json& out = e["output"];
    out["kind"] = inst.kind;
    Json hyp;
    hyp["lambda_charset"] = to_string(inst.lambda_charset.kind);
    hyp["gamma_charset"] = to_string(inst.gamma_charset.kind);
    hyp["containment"] = to_string(inst.containment.kind);
    out["hypotheses"] = hyp;
    Json in;
    in["lambda"] = strings(inst.lambda);
    in["gamma"] = strings(inst.gamma);
    in["condition"] = inst.condition ? Json(*inst.condition) : Json(nullptr);
    out["instance"] = in;
    Json members = Json::array();
    for (const auto& m : inst.members) {
      Json j;
      j["label"] = m.label;
      j["poly"] = ring().format(m.poly);
      j["remainder"] = ring().format(m.remainder);
      members.push_back(j);
    }
    out["members"] = members;
    if (!inst.unchecked.empty()) out["unchecked"] = inst.unchecked;
    add(e, "lambda-charset", inst.lambda_charset);
    add(e, "gamma-charset", inst.gamma_charset);
    add(e, "containment", inst.containment);
  }

  void axiom_dcf(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> lambda = parse_set_arg(ts);
    ts.expect(",");
    const std::vector<DiffPoly> gamma = parse_set_arg(ts);
    const Partition part = parse_partition(ts);
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    if (part.r() != 1) throw Error("axiom-dcf takes exactly one distinguished derivation");
    check_limits(lambda);
    check_limits(gamma);
    const UBlock u = ensure_u_block(ring(), part.dist[0], block);
    axiom_report(dcf_instance(ring(), lambda, gamma, part, block, u, opts_), e);
  }

  void axiom_dcfa(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> lambda = parse_set_arg(ts);
    ts.expect(",");
    const std::vector<DiffPoly> gamma = parse_set_arg(ts);
    ts.expect("with");
    const std::vector<std::uint32_t> xb = parse_var_list(ts);
    ts.expect("->");
    const std::vector<std::uint32_t> yb = parse_var_list(ts);
    finish_statement(ts);
    check_limits(lambda);
    check_limits(gamma);
    axiom_report(dcfa_instance(ring(), lambda, gamma, xb, yb, opts_), e);
  }

  void dsm_check(TokenStream& ts, Json& e) {
    DSMSystem s;
    s.a = parse_matrix_list(ts);
    ts.expect(",");
    s.b = parse_matrix_arg(ts);
    ts.expect(",");
    s.b_inv = parse_matrix_arg(ts);
    finish_statement(ts);
    for (const auto& chk : dsm_identities(ring(), s)) add(e, chk.label, chk.verdict);
  }

  void jet(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> gens = parse_set_arg(ts);
    ts.expect("at");
    std::vector<Rational> a;
    ts.expect("[");
    while (!ts.is("]")) {
      a.push_back(parse_rational(ts));
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
    ts.expect("order");
    const Token t = ts.peek();
    const long r = ts.expect_int();
    if (r < 1 || r > 8) ts.fail_at(t, "order must be between 1 and 8");
    const std::vector<std::uint32_t> block = parse_block(ts);
    finish_statement(ts);
    check_limits(gens);
    const JetSystem sys = jet_equations(ring(), gens, block, a, static_cast<unsigned>(r));
    e["output"]["unknowns"] = sys.unknowns;
    Json eqs = Json::array();
    for (std::size_t i = 0; i < sys.rows.size(); ++i) eqs.push_back(sys.format_row(base_ring(), i));
    e["output"]["equations"] = eqs;
  }

  void kolchin(TokenStream& ts, Json& e) {
    const std::vector<DiffPoly> set = parse_set_arg(ts);
    finish_statement(ts);
    check_limits(set);
    const DiffRing& r = ring();
    AutoSetResult as = make_autoreduced(r, set);
    if (!as.ok()) {
      add(e, "autoreduced", Verdict::fails(std::nullopt, as.violation->message));
      return;
    }
    const CharsetCertificate cert = is_charset_of_prime(r, *as.set, opts_);
    add(e, "charset", cert.overall);
    if (!cert.overall.is_holds()) return;
    const NumPolynomial w = kolchin_polynomial(r, cert);
    const TypeDim td = type_dim(w);
    Json& out = e["output"];
    out["omega"] = w.format();
    out["valid_from"] = w.h0;
    out["delta_type"] = td.tau;
    out["delta_dim"] = td.d.get_str();
    out["u_rank_upper"] = "< " + u_rank_bounds(td.tau, td.d).upper.format();
  }

  void family_report(const FamilyReport& rep, Json& e) {
    Json& out = e["output"];
    Json sys = Json::array();
    for (const auto& p : rep.system) sys.push_back(rep.ring.format(p));
    out["system"] = sys;
    out["omega"] = rep.omega.format();
    out["delta_type"] = rep.td.tau;
    out["delta_dim"] = rep.td.d.get_str();
    if (rep.claimed) {
      out["claimed_type"] = rep.claimed->tau;
      out["claimed_dim"] = rep.claimed->d.get_str();
    }
    if (rep.bounds.lower) out["u_rank_lower"] = rep.bounds.lower->format();
    if (rep.known_u) out["u_rank"] = rep.known_u->format();
    out["u_rank_upper"] = "< " + rep.bounds.upper.format();
    add(e, "charset", rep.charset);
    add(e, "type-dim",
        rep.claim_holds ? Verdict::holds("computed (type, dim) matches the family formula")
                        : Verdict::fails(std::nullopt, "computed (type, dim) differs from the family formula"));
    const OrdinalCNF& lower = rep.bounds.lower ? *rep.bounds.lower : *rep.known_u;
    add(e, "rank-bounds", lower < rep.bounds.upper
                              ? Verdict::holds(lower.format() + " < " + rep.bounds.upper.format())
                              : Verdict::fails(std::nullopt, lower.format() + " is not below " +
                                                                 rep.bounds.upper.format()));
  }

  void g_r(TokenStream& ts, Json& e) {
    if (ts.accept("type")) {
      std::map<std::string, long> kv;
      for (const char* key : {"m", "i", "n"}) {
        ts.expect(key);
        ts.expect("=");
        kv[key] = ts.expect_int();
        ts.accept(",");
      }
      finish_statement(ts);
      if (kv["m"] < 1 || kv["m"] > static_cast<long>(kMaxDerivations)) throw Error("m must be between 1 and 8");
      if (kv["i"] < 0 || kv["n"] < 0 || kv["n"] > 64) throw Error("i and n must be small nonnegative integers");
      family_report(type_dim_family(static_cast<unsigned>(kv["m"]), static_cast<unsigned>(kv["i"]),
                                 static_cast<unsigned>(kv["n"])),
                    e);
      return;
    }
    std::vector<unsigned> r;
    ts.expect("[");
    while (!ts.is("]")) {
      const Token t = ts.peek();
      const long v = ts.expect_int();
      if (v > 64) ts.fail_at(t, "entry too large");
      r.push_back(static_cast<unsigned>(v));
      if (!ts.accept(",")) break;
    }
    ts.expect("]");
    finish_statement(ts);
    if (r.empty() || r.size() > kMaxDerivations) throw Error("g-r needs between 1 and 8 entries");
    family_report(gr_family(r), e);
  }

  OrdinalCNF ordinal_side(TokenStream& ts) {
    OrdinalCNF total;
    std::string text;
    auto flush = [&] {
      if (text.empty()) ts.fail("expected an ordinal");
      total = natural_sum(total, OrdinalCNF::parse(text));
      text.clear();
    };
    while (!ts.at_end() && !ts.is("<") && !ts.is(">") && !ts.is("=")) {
      const Token t = ts.next();
      if (t.text == "#") {
        flush();
        continue;
      }
      text += t.text + " ";
    }
    flush();
    return total;
  }

  void ordinal(TokenStream& ts, Json& e) {
    const OrdinalCNF lhs = ordinal_side(ts);
    e["output"]["value"] = lhs.format();
    if (ts.at_end()) return;
    std::string op = ts.next().text;
    if ((op == "<" || op == ">") && ts.is("=")) op += ts.next().text;
    const OrdinalCNF rhs = ordinal_side(ts);
    finish_statement(ts);
    e["output"]["rhs"] = rhs.format();
    const auto c = lhs <=> rhs;
    bool holds = false;
    if (op == "<") holds = c < 0;
    if (op == "<=") holds = c <= 0;
    if (op == ">") holds = c > 0;
    if (op == ">=") holds = c >= 0;
    if (op == "=") holds = c == 0;
    const std::string claim = lhs.format() + " " + op + " " + rhs.format();
    add(e, "comparison", holds ? Verdict::holds(claim) : Verdict::fails(std::nullopt, "not " + claim));
  }

  RunFlags flags_;
  ReduceOptions opts_;
  unsigned m_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<BaseElem>> table_;
  std::optional<std::vector<BaseElem>> sigma_;
  std::vector<std::string> vars_;
  bool vars_declared_ = false;
  std::optional<DiffRing> ring_;
  Bindings b_;
  std::vector<Token> st_tokens_;
};

int exit_code_for(const Json& summary) {
  if (summary["errors"].get<int>() > 0) return 1;
  if (summary["fails"].get<int>() > 0) return 2;
  if (summary["unknown"].get<int>() > 0) return 3;
  return 0;
}

Json base_report(const std::string& name) {
  Json r;
  r["schema_version"] = 1;
  r["session"] = name;
  r["commands"] = Json::array();
  return r;
}

void finalize(Json& report, int errors, double ms) {
  int holds = 0, fails = 0, unknown = 0;
  for (const auto& c : report["commands"]) {
    if (!c.contains("verdicts")) continue;
    for (const auto& v : c["verdicts"]) {
      const std::string k = v["verdict"];
      holds += k == "Holds";
      fails += k == "Fails";
      unknown += k == "Unknown";
    }
  }
  Json s;
  s["commands"] = report["commands"].size();
  s["holds"] = holds;
  s["fails"] = fails;
  s["unknown"] = unknown;
  s["errors"] = errors;
  report["summary"] = s;
  report["exit_code"] = exit_code_for(s);
  report["timing"] = Json{{"total_ms", std::round(ms * 1000.0) / 1000.0}};
}

}  // namespace

Report run(const Session& session, const RunFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  Json report = base_report(session.name);
  Interpreter interp(flags);
  int errors = 0;
  for (const auto& st : session.statements) {
    try {
      Json entry = interp.execute(st);
      if (!entry.is_null()) report["commands"].push_back(std::move(entry));
    } catch (const Error& e) {
      Json entry;
      entry["line"] = st.line;
      entry["command"] = st.echo;
      entry["verb"] = st.keyword;
      entry["error"] = e.what();
      report["commands"].push_back(std::move(entry));
      ++errors;
      if (!flags.keep_going) break;
    }
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  finalize(report, errors, ms);
  return {report, report["exit_code"].get<int>()};
}

Report run_source(std::string_view source, const std::string& name, const RunFlags& flags) {
  try {
    return run(parse_session(source, name), flags);
  } catch (const ParseError& e) {
    Json report = base_report(name);
    Json d;
    d["line"] = e.line();
    d["column"] = e.column();
    d["message"] = e.what();
    report["diagnostics"] = Json::array({d});
    finalize(report, 1, 0.0);
    return {report, 1};
  }
}

std::string render_text(const Json& report) {
  std::ostringstream out;
  if (report.contains("diagnostics"))
    for (const auto& d : report["diagnostics"]) out << "error: " << d["message"].get<std::string>() << "\n";
  for (const auto& c : report["commands"]) {
    out << "[line " << c["line"].get<int>() << "] " << c["command"].get<std::string>() << "\n";
    if (c.contains("error")) {
      out << "  error: " << c["error"].get<std::string>() << "\n";
      continue;
    }
    std::size_t width = 0;
    for (const auto& v : c["verdicts"]) width = std::max(width, v["name"].get<std::string>().size());
    for (const auto& v : c["verdicts"]) {
      std::string name = v["name"];
      std::string verdict = v["verdict"];
      const std::string detail = v["detail"];
      name.resize(width, ' ');
      if (!detail.empty()) verdict.resize(7, ' ');
      out << "  " << name << "  " << verdict << (detail.empty() ? "" : "  " + detail) << "\n";
    }
    for (const auto& [key, val] : c["output"].items()) {
      if (val.is_string()) {
        out << "  " << key << ": " << val.get<std::string>() << "\n";
      } else if (val.is_array() && std::all_of(val.begin(), val.end(), [](const Json& x) { return x.is_string(); })) {
        out << "  " << key << ":" << (val.empty() ? " (none)" : "") << "\n";
        for (const auto& x : val) out << "    " << x.get<std::string>() << "\n";
      } else {
        out << "  " << key << ": " << val.dump() << "\n";
      }
    }
  }
  const Json& s = report["summary"];
  out << s["commands"].get<int>() << " commands: " << s["holds"].get<int>() << " holds, " << s["fails"].get<int>()
      << " fails, " << s["unknown"].get<int>() << " unknown, " << s["errors"].get<int>() << " errors; exit "
      << report["exit_code"].get<int>() << "\n";
  return out.str();
}

std::string canonical_json(const Json& report) {
  Json copy = report;
  copy.erase("timing");
  return copy.dump(2) + "\n";
}

std::string CorpusResult::summary() const {
  std::ostringstream out;
  out << cases << (cases == 1 ? " case" : " cases") << ", " << mismatches.size() << " mismatched, " << missing.size()
      << " missing expectations";
  for (const auto& m : mismatches) out << "\n  mismatch: " << m;
  for (const auto& m : missing) out << "\n  missing: " << m;
  return out.str();
}

CorpusResult run_corpus(const std::string& dir, const RunFlags& flags, bool update) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("corpus: '" + dir + "' is not a directory");
  std::vector<fs::path> scripts;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".dfs") scripts.push_back(entry.path());
  std::sort(scripts.begin(), scripts.end());
  CorpusResult res;
  for (const auto& path : scripts) {
    ++res.cases;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const Report rep = run_source(buf.str(), path.filename().string(), flags);
    const std::string got = canonical_json(rep.json);
    fs::path expected = path;
    expected.replace_extension(".expected.json");
    if (update) {
      std::ofstream(expected) << got;
      continue;
    }
    if (!fs::exists(expected)) {
      res.missing.push_back(expected.filename().string());
      continue;
    }
    std::ifstream ein(expected);
    std::stringstream ebuf;
    ebuf << ein.rdbuf();
    if (ebuf.str() != got) res.mismatches.push_back(path.filename().string());
  }
  return res;
}

}  // namespace deltaforge::cli
