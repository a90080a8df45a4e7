#include "props.hpp"

#include <functional>
#include <random>
#include <sstream>

#include "deltaforge/axioms.hpp"
#include "deltaforge/kolchin.hpp"
#include "deltaforge/prolong.hpp"
#include "deltaforge/syntax.hpp"

namespace deltaforge::cli {

namespace {

constexpr std::size_t kMaxReported = 3;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rational rational(int bound = 3) {
    const int num = integer(-bound, bound);
    Rational q(num == 0 ? 1 : num, integer(1, 2));
    q.canonicalize();
    return q;
  }

  BaseElem base(std::size_t num_constants, unsigned terms = 3) {
    BaseElem p;
    const unsigned n = static_cast<unsigned>(integer(1, static_cast<int>(terms)));
    for (unsigned t = 0; t < n; ++t) {
      BaseElem mono(rational());
      const int deg = integer(0, 2);
      for (int k = 0; k < deg && num_constants > 0; ++k)
        mono *= BaseElem::variable(static_cast<ConstIndex>(integer(0, static_cast<int>(num_constants) - 1)));
      p += mono;
    }
    return p;
  }

  DerivOp op(unsigned m, DerivMask mask, unsigned max_order) {
    DerivOp o;
    const unsigned order = static_cast<unsigned>(integer(0, static_cast<int>(max_order)));
    std::vector<unsigned> allowed;
    for (unsigned j = 0; j < m; ++j)
      if (mask_has(mask, j)) allowed.push_back(j);
    if (allowed.empty()) return o;
    for (unsigned k = 0; k < order; ++k) ++o.e[allowed[static_cast<std::size_t>(integer(0, static_cast<int>(allowed.size()) - 1))]];
    return o;
  }

  AlgInd alg(const std::vector<std::uint32_t>& vars, unsigned m, DerivMask mask, unsigned max_order) {
    return {vars[static_cast<std::size_t>(integer(0, static_cast<int>(vars.size()) - 1))], op(m, mask, max_order)};
  }

  DiffPoly poly(const DiffRing& r, const std::vector<std::uint32_t>& vars, DerivMask mask, unsigned max_order,
                unsigned max_degree = 2, unsigned terms = 4) {
    DiffPoly p;
    const unsigned n = static_cast<unsigned>(integer(1, static_cast<int>(terms)));
    for (unsigned t = 0; t < n; ++t) {
      DiffPoly mono(base(r.base().num_constants(), 2));
      const int deg = integer(0, static_cast<int>(max_degree));
      for (int k = 0; k < deg; ++k) mono *= DiffPoly::variable(alg(vars, r.num_derivations(), mask, max_order));
      p += mono;
    }
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

// t1, t2 with d_j t_k = [j = k]; e with d_j e = (j + 1) e; c with d_j c = t_j.
// sigma: t_k -> t_k + 1, e -> 2 e, c -> c + t1 + t2.
DiffRing random_ring(std::vector<std::string> vars) {
  const BaseElem t1 = BaseElem::variable(0), t2 = BaseElem::variable(1), e = BaseElem::variable(2),
                 c = BaseElem::variable(3);
  const BaseElem one(Rational(1)), zero;
  std::vector<std::vector<BaseElem>> table{{one, zero, e.scaled(Rational(2)), t1},
                                           {zero, one, e.scaled(Rational(3)), t2}};
  BaseRing base(2, {"t1", "t2", "e", "c"}, table, std::vector<BaseElem>{t1 + one, t2 + one, e.scaled(Rational(2)), c + t1 + t2});
  return DiffRing(std::move(base), std::move(vars));
}

// Thrown by a case whose random input exceeded a work budget.
struct Skip {};

struct Suite {
  std::string name;
  // Returns an empty string on success, a description otherwise.
  std::function<std::string(Gen&)> run_case;
};

std::string clip(std::string s) {
  constexpr std::size_t kMax = 160;
  if (s.size() > kMax) s = s.substr(0, kMax) + "...";
  return s;
}

std::string mismatch(const DiffRing& r, const std::string& what, const DiffPoly& a, const DiffPoly& b) {
  return what + ": " + clip(r.format(a)) + " vs " + clip(r.format(b));
}

std::vector<Suite> suites() {
  std::vector<Suite> out;

  out.push_back({"commutation", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const BaseElem p = g.base(4), q = g.base(4);
    for (unsigned j = 0; j < 2; ++j) {
      const BaseElem lhs = apply_delta_base(r.base(), j, p * q);
      const BaseElem rhs = apply_delta_base(r.base(), j, p) * q + p * apply_delta_base(r.base(), j, q);
      if (lhs != rhs) return "base Leibniz fails for " + r.base().format(p) + ", " + r.base().format(q);
    }
    const DiffPoly f = g.poly(r, {0, 1}, 3, 2);
    const DiffPoly a = apply_delta(r, 0, apply_delta(r, 1, f));
    const DiffPoly b = apply_delta(r, 1, apply_delta(r, 0, f));
    if (a != b) return mismatch(r, "d1 d2 f != d2 d1 f for f = " + r.format(f), a, b);
    const AlgInd u = g.alg({0, 1}, 2, 3, 2), v = g.alg({0, 1}, 2, 3, 2);
    const DerivOp theta = g.op(2, 3, 2);
    if (u < v && !(AlgInd{u.var, u.op + theta} < AlgInd{v.var, v.op + theta}))
      return "ranking is not compatible with " + r.format(u) + " < " + r.format(v);
    if (!theta.is_identity() && !(u < AlgInd{u.var, u.op + theta})) return "u < theta u fails for " + r.format(u);
    if ((u < v) + (v < u) + (u == v) != 1) return "ranking is not total on " + r.format(u) + ", " + r.format(v);
    return {};
  }});

  out.push_back({"leibniz", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const DiffPoly f = g.poly(r, {0, 1}, 3, 2), h = g.poly(r, {0, 1}, 3, 2);
    for (unsigned j = 0; j < 2; ++j) {
      const DiffPoly a = apply_delta(r, j, f * h);
      const DiffPoly b = apply_delta(r, j, f) * h + f * apply_delta(r, j, h);
      if (a != b) return mismatch(r, "apply_delta Leibniz", a, b);
      const DiffPoly c = coeff_twist(r, f * h, j);
      const DiffPoly d = coeff_twist(r, f, j) * h + f * coeff_twist(r, h, j);
      if (c != d) return mismatch(r, "coeff_twist Leibniz", c, d);
    }
    const UBlock u = ensure_u_block(r, 1, {0, 1});
    const DiffPoly p = g.poly(r, {0, 1}, 1, 2), q = g.poly(r, {0, 1}, 1, 2);
    const DiffPoly a = d_op(r, p * q, 1, 1, u);
    const DiffPoly b = d_op(r, p, 1, 1, u) * q + p * d_op(r, q, 1, 1, u);
    if (a != b) return mismatch(r, "d_op Leibniz", a, b);
    return {};
  }});

  out.push_back({"d_op-commutes-with-delta", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const UBlock u = ensure_u_block(r, 1, {0, 1});
    const DiffPoly f = g.poly(r, {0, 1}, 1, 2);
    const DiffPoly a = d_op(r, apply_delta(r, 0, f), 1, 1, u);
    const DiffPoly b = apply_delta(r, 0, d_op(r, f, 1, 1, u));
    if (a != b) return mismatch(r, "d_op(d1 f) != d1 d_op(f) for f = " + r.format(f), a, b);
    const Partition part = Partition::from_distinguished(2, {1});
    const DiffPoly c = nabla_substitute(r, d_op(r, f, 1, 1, u), part, {u});
    const DiffPoly d = apply_delta(r, 1, f);
    if (c != d) return mismatch(r, "u <- d2 x in d_op(f) != d2 f", c, d);
    return {};
  }});

  out.push_back({"reduction-certificate", [](Gen& g) -> std::string {
    static const std::vector<std::vector<const char*>> fixtures{
        {"d1(x) - t1*x", "d2(x) - t2*x"},
        {"d2(x) - d1^2(x)"},
        {"x^2 - t1", "d1(y) - e*y"},
        {"d1(x)^2 - x", "y*x - c"},
        {"d1(x) - e*x", "d2(y) + x*y"}};
    DiffRing r = random_ring({"x", "y"});
    const auto& src = fixtures[static_cast<std::size_t>(g.integer(0, static_cast<int>(fixtures.size()) - 1))];
    std::vector<DiffPoly> fs;
    for (const char* s : src) fs.push_back(parse_poly(r, s));
    const AutoSet lambda = require_autoreduced(r, fs);
    const DiffPoly h = g.poly(r, {0, 1}, 3, 3, 3);
    ReductionCert cert;
    try {
      cert = ritt_reduce(r, h, lambda, {TieBreak::LowestIndex, 20000});
    } catch (const LimitExceeded&) {
      throw Skip{};
    }
    DiffPoly lhs = h;
    for (std::size_t k = 0; k < lambda.size(); ++k)
      lhs *= lambda.separant(k).pow(cert.sep_exp[k]) * lambda.initial(k).pow(cert.init_exp[k]);
    DiffPoly rhs = cert.remainder;
    for (const auto& t : cert.combination) rhs += t.quotient * apply_op(r, t.theta, lambda[t.index]);
    if (lhs != rhs) return mismatch(r, "certificate for " + r.format(h), lhs, rhs);
    for (std::size_t k = 0; k < lambda.size(); ++k)
      if (is_reduced(cert.remainder, lambda[k], lambda.mask()) != Reducedness::Fully)
        return "remainder " + r.format(cert.remainder) + " is not reduced";
    const ReductionCert again = ritt_reduce(r, cert.remainder, lambda);
    if (again.remainder != cert.remainder) return mismatch(r, "reduction is not idempotent", again.remainder, cert.remainder);
    return {};
  }});

  out.push_back({"tau-functoriality", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const UBlock u = ensure_u_block(r, 1, {0, 1});
    // f, h : A^2 -> A^2 with degree <= 2 each; the composite has degree <= 4.
    std::vector<DiffPoly> f, h;
    for (int k = 0; k < 2; ++k) {
      f.push_back(g.poly(r, {0, 1}, 1, 2, 2, 3));
      h.push_back(g.poly(r, {0, 1}, 1, 2, 2, 3));
    }
    const std::map<std::uint32_t, DiffPoly> by_h{{0, h[0]}, {1, h[1]}};
    std::map<std::uint32_t, DiffPoly> tau_h = by_h;
    tau_h[u.at(0)] = d_op(r, h[0], 1, 1, u);
    tau_h[u.at(1)] = d_op(r, h[1], 1, 1, u);
    for (int k = 0; k < 2; ++k) {
      const DiffPoly composite = substitute_variables(r, f[k], by_h);
      const DiffPoly a = d_op(r, composite, 1, 1, u);
      const DiffPoly b = substitute_variables(r, d_op(r, f[k], 1, 1, u), tau_h);
      if (a != b) return mismatch(r, "tau(f o h) != tau f o tau h", a, b);
    }
    return {};
  }});

  out.push_back({"torsor", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const UBlock u = ensure_u_block(r, 1, {0, 1});
    const UBlock w{{0, r.add_variable("w_x")}, {1, r.add_variable("w_y")}};
    const DiffPoly f = g.poly(r, {0, 1}, 1, 3);
    const DiffPoly df = d_op(r, f, 1, 1, u);
    std::map<std::uint32_t, DiffPoly> shift;
    for (auto [x, ux] : u) shift[ux] = r.var(ux) + r.var(w.at(x));
    const DiffPoly a = substitute_variables(r, df, shift) - df;
    const DiffPoly b = tangent_form(f, 1, w);
    if (a != b) return mismatch(r, "d f(x, u + w) - d f(x, u) for f = " + r.format(f), a, b);
    // Two points of the torsor differ by a twist-free tangent vector.
    const DiffPoly c0 = g.poly(r, {0, 1}, 1, 1), c1 = g.poly(r, {0, 1}, 1, 1);
    const DiffPoly e0 = g.poly(r, {0, 1}, 1, 1), e1 = g.poly(r, {0, 1}, 1, 1);
    const DiffPoly at_c = substitute_variables(r, df, {{u.at(0), c0}, {u.at(1), c1}});
    const DiffPoly at_e = substitute_variables(r, df, {{u.at(0), e0}, {u.at(1), e1}});
    const DiffPoly diff = substitute_variables(r, tangent_form(f, 1, w), {{w.at(0), c0 - e0}, {w.at(1), c1 - e1}});
    if (at_c - at_e != diff) return mismatch(r, "d f(x, c) - d f(x, e) has a twist term", at_c - at_e, diff);
    return {};
  }});

  out.push_back({"sigma-twist", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const BaseElem p = g.base(4);
    for (unsigned j = 0; j < 2; ++j) {
      const BaseElem a = apply_sigma_base(r.base(), apply_delta_base(r.base(), j, p));
      const BaseElem b = apply_delta_base(r.base(), j, apply_sigma_base(r.base(), p));
      if (a != b) return "sigma d != d sigma on " + r.base().format(p);
    }
    const DiffPoly f = g.poly(r, {0, 1}, 3, 2), h = g.poly(r, {0, 1}, 3, 2);
    const DiffPoly a = coeff_twist_sigma(r, f * h);
    const DiffPoly b = coeff_twist_sigma(r, f) * coeff_twist_sigma(r, h);
    if (a != b) return mismatch(r, "(fg)^sigma != f^sigma g^sigma", a, b);
    for (unsigned j = 0; j < 2; ++j) {
      const DiffPoly c = coeff_twist_sigma(r, apply_delta(r, j, f));
      const DiffPoly d = apply_delta(r, j, coeff_twist_sigma(r, f));
      if (c != d) return mismatch(r, "(d f)^sigma != d (f^sigma)", c, d);
    }
    return {};
  }});

  out.push_back({"jet", [](Gen& g) -> std::string {
    using Univariate = std::vector<Rational>;
    auto mul = [](const Univariate& a, const Univariate& b) {
      Univariate c(a.size() + b.size() - 1);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
      return c;
    };
    auto factorial = [](unsigned n) {
      Rational f = 1;
      for (unsigned k = 2; k <= n; ++k) f *= k;
      return f;
    };
    DiffRing r(BaseRing(1), {"x", "y"});
    const DiffPoly x = r.var(0u), y = r.var(1u);
    // Graph y = p(x) through a = (x0, p(x0)); generators vanish on it.
    std::vector<Rational> pc{g.rational(), g.rational(), Rational(g.integer(-2, 2))};
    const Rational x0 = g.integer(-2, 2);
    Rational y0 = 0;
    DiffPoly p;
    for (std::size_t k = 0; k < pc.size(); ++k) {
      y0 += pc[k] * [&] { Rational v = 1; for (std::size_t i = 0; i < k; ++i) v *= x0; return v; }();
      p += lift(pc[k]) * x.pow(static_cast<std::uint32_t>(k));
    }
    auto factor = [&] { return lift(g.rational()) + lift(g.rational()) * x + lift(Rational(g.integer(0, 1))) * y; };
    const DiffPoly h1 = (y - p) * factor(), h2 = (y - p) * factor();
    if (h1.is_zero() || h2.is_zero()) throw Skip{};
    const unsigned order = static_cast<unsigned>(g.integer(1, 3));
    const Rational c = g.rational();
    const JetSystem s1 = jet_equations(r, {h1}, {0, 1}, {x0, y0}, order);
    const JetSystem s2 = jet_equations(r, {h2}, {0, 1}, {x0, y0}, order);
    const JetSystem sum = jet_equations(r, {h1 + lift(c) * h2}, {0, 1}, {x0, y0}, order);
    for (std::size_t i = 0; i < s1.alphas.size(); ++i) {
      for (const JetSystem* s : {&s1, &s2, &sum})
        if (!is_rational(s->rows[0][i])) return "jet row entry is not rational";
      if (sum.rows[0][i] != s1.rows[0][i] + s2.rows[0][i].scaled(c)) return "jet rows are not linear";
    }
    // gamma(t) - a = (t, p(x0 + t) - p(x0)).
    Univariate wx{0, 1}, wy{0, pc[1] + 2 * pc[2] * x0, pc[2]};
    for (unsigned k = 1; k <= order; ++k) {
      Rational total = 0;
      for (std::size_t i = 0; i < s1.alphas.size(); ++i) {
        Univariate q{1};
        for (unsigned e = 0; e < s1.alphas[i][0]; ++e) q = mul(q, wx);
        for (unsigned e = 0; e < s1.alphas[i][1]; ++e) q = mul(q, wy);
        if (k < q.size())
          total += s1.rows[0][i].constant_term() * factorial(k) * q[k] /
                   (factorial(s1.alphas[i][0]) * factorial(s1.alphas[i][1]));
      }
      if (total != 0) return "curve jet of order " + std::to_string(k) + " violates the equations of " + r.format(h1);
    }
    return {};
  }});

  out.push_back({"ordinal", [](Gen& g) -> std::string {
    auto ord = [&] {
      std::vector<OrdinalCNF::Term> t;
      const int n = g.integer(0, 3);
      for (int k = 0; k < n; ++k)
        t.emplace_back(static_cast<unsigned>(g.integer(0, 3)), static_cast<std::uint64_t>(g.integer(1, 4)));
      return OrdinalCNF::from_terms(t);
    };
    const OrdinalCNF a = ord(), b = ord(), c = ord();
    const std::string ctx = " on " + a.format() + ", " + b.format() + ", " + c.format();
    if (natural_sum(a, b) != natural_sum(b, a)) return "natural sum is not commutative" + ctx;
    if (natural_sum(natural_sum(a, b), c) != natural_sum(a, natural_sum(b, c))) return "natural sum is not associative" + ctx;
    if ((a + b) + c != a + (b + c)) return "ordinary sum is not associative" + ctx;
    if (a + OrdinalCNF() != a || OrdinalCNF() + a != a) return "0 is not neutral" + ctx;
    if (natural_sum(a, b) < a + b) return "natural sum is below the ordinary sum" + ctx;
    if (!(a < a + OrdinalCNF::finite(1))) return "a < a + 1 fails" + ctx;
    if (!b.is_zero() && !a.is_zero() && b.terms().front().first > a.terms().front().first && a + b != b)
      return "ordinary sum does not absorb lower terms" + ctx;
    const int rel = (a < b) + (a == b) + (a > b);
    if (rel != 1) return "comparison is not a strict total order" + ctx;
    if (a < b && b < c && !(a < c)) return "comparison is not transitive" + ctx;
    if (OrdinalCNF::parse(a.format()) != a) return "ordinal round-trip fails" + ctx;
    return {};
  }});

  out.push_back({"round-trip", [](Gen& g) -> std::string {
    DiffRing r = random_ring({"x", "y"});
    const DiffPoly f = g.poly(r, {0, 1}, 3, 3, 3, 5);
    const std::string text = r.format(f);
    const DiffPoly back = parse_poly(r, text);
    if (back != f) return mismatch(r, "parse(print(f)) != f for '" + text + "'", back, f);
    if (r.format(back) != text) return "printing is not stable for '" + text + "'";
    return {};
  }});

  return out;
}

}  // namespace

std::vector<std::string> property_suites() {
  std::vector<std::string> names;
  for (const auto& s : suites()) names.push_back(s.name);
  return names;
}

std::vector<PropResult> run_properties(std::uint64_t seed, std::size_t cases, const std::string& only) {
  std::vector<PropResult> results;
  std::uint64_t salt = 0;
  bool matched = only.empty();
  for (const auto& suite : suites()) {
    ++salt;
    if (!only.empty() && suite.name != only) continue;
    matched = true;
    PropResult res;
    res.suite = suite.name;
    res.cases = cases;
    Gen gen(seed * 0x9E3779B97F4A7C15ull + salt);
    for (std::size_t i = 0; i < cases; ++i) {
      std::string failure;
      try {
        failure = suite.run_case(gen);
      } catch (const Skip&) {
        ++res.skipped;
        continue;
      } catch (const Error& e) {
        failure = std::string("threw: ") + e.what();
      }
      if (failure.empty()) continue;
      if (res.failures.size() < kMaxReported)
        res.failures.push_back("case " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + failure);
      else
        break;
    }
    results.push_back(std::move(res));
  }
  if (!matched) throw Error("unknown property suite '" + only + "'");
  return results;
}

}  // namespace deltaforge::cli
