#include "deltaforge/kolchin.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace deltaforge {

namespace {

constexpr std::size_t kMaxLeadersPerVar = 20;
constexpr double kEnumerationBudget = 2e6;

Integer binomial(long n, unsigned k) {
  if (n < 0) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), k);
  return r;
}

bool dominates(const Exponents& e, const Exponents& l) {
  for (std::size_t k = 0; k < e.size(); ++k)
    if (e[k] < l[k]) return false;
  return true;
}

void check_table(const LeaderTable& t) {
  for (const auto& group : t.per_var) {
    if (group.size() > kMaxLeadersPerVar) throw LimitExceeded("too many leaders on one variable for inclusion-exclusion");
    for (std::size_t a = 0; a < group.size(); ++a) {
      if (group[a].size() != t.m) throw Error("leader exponent vector has the wrong length");
      for (std::size_t b = 0; b < group.size(); ++b)
        if (a != b && dominates(group[a], group[b])) throw Error("leaders of one variable must form an antichain");
    }
  }
}

void enumerate(const LeaderTable& t, const std::vector<Exponents>& group, Exponents& e, unsigned pos,
               unsigned budget, Integer& count) {
  if (pos == t.m) {
    for (const auto& l : group)
      if (dominates(e, l)) return;
    ++count;
    return;
  }
  for (unsigned v = 0; v <= budget; ++v) {
    e[pos] = v;
    enumerate(t, group, e, pos + 1, budget - v, count);
  }
  e[pos] = 0;
}

unsigned max_join(const std::vector<Exponents>& group, unsigned m) {
  unsigned best = 0;
  for (std::uint32_t s = 1; s < (1u << group.size()); ++s) {
    Exponents join(m, 0);
    for (std::size_t k = 0; k < group.size(); ++k)
      if (s >> k & 1u)
        for (unsigned j = 0; j < m; ++j) join[j] = std::max(join[j], group[k][j]);
    unsigned total = 0;
    for (auto v : join) total += v;
    best = std::max(best, total);
  }
  return best;
}

bool enumeration_cheap(const LeaderTable& t, unsigned h) {
  double points = 1;
  for (unsigned k = 1; k <= t.m; ++k) points = points * (h + k) / k;
  return points * static_cast<double>(std::max<std::size_t>(t.per_var.size(), 1)) <= kEnumerationBudget;
}

}  // namespace

Integer count_by_enumeration(const LeaderTable& t, unsigned h) {
  check_table(t);
  Integer count = 0;
  for (const auto& group : t.per_var) {
    Exponents e(t.m, 0);
    enumerate(t, group, e, 0, h, count);
  }
  return count;
}

Integer count_by_inclusion_exclusion(const LeaderTable& t, unsigned h) {
  check_table(t);
  Integer count = 0;
  for (const auto& group : t.per_var) {
    for (std::uint32_t s = 0; s < (1u << group.size()); ++s) {
      Exponents join(t.m, 0);
      unsigned size = 0;
      for (std::size_t k = 0; k < group.size(); ++k) {
        if (!(s >> k & 1u)) continue;
        ++size;
        for (unsigned j = 0; j < t.m; ++j) join[j] = std::max(join[j], group[k][j]);
      }
      long total = 0;
      for (auto v : join) total += v;
      if (static_cast<long>(h) < total) continue;
      const Integer term = binomial(static_cast<long>(h) - total + t.m, t.m);
      count += size % 2 ? -term : term;
    }
  }
  return count;
}

Integer free_derivative_count(const LeaderTable& t, unsigned h) {
  const Integer ie = count_by_inclusion_exclusion(t, h);
  if (enumeration_cheap(t, h) && count_by_enumeration(t, h) != ie)
    throw Error("free derivative count: enumeration and inclusion-exclusion disagree");
  return ie;
}

bool NumPolynomial::is_zero() const {
  return std::all_of(d.begin(), d.end(), [](const Integer& c) { return c == 0; });
}

Integer NumPolynomial::operator()(unsigned h) const {
  Integer v = 0;
  for (unsigned i = 0; i < d.size(); ++i) v += d[i] * binomial(static_cast<long>(h) + i, i);
  return v;
}

std::string NumPolynomial::format() const {
  std::vector<std::pair<Rational, std::vector<std::string>>> terms;
  for (unsigned i = static_cast<unsigned>(d.size()); i-- > 0;) {
    if (d[i] == 0) continue;
    std::vector<std::string> f;
    if (i > 0) f.push_back("C(h+" + std::to_string(i) + "," + std::to_string(i) + ")");
    terms.emplace_back(Rational(d[i]), std::move(f));
  }
  return format_terms(terms);
}

NumPolynomial kolchin_from_leaders(const LeaderTable& t) {
  check_table(t);
  NumPolynomial w;
  for (const auto& group : t.per_var) w.h0 = std::max(w.h0, max_join(group, t.m));
  const unsigned n = t.m + 1;
  // Rows: omega(h0 + a) = sum_i d_i C(h0 + a + i, i).
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (unsigned r = 0; r < n; ++r) {
    for (unsigned i = 0; i < n; ++i) a[r][i] = Rational(binomial(static_cast<long>(w.h0 + r + i), i));
    a[r][n] = Rational(count_by_inclusion_exclusion(t, w.h0 + r));
  }
  for (unsigned col = 0; col < n; ++col) {
    unsigned piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw Error("singular binomial system");
    std::swap(a[piv], a[col]);
    for (unsigned r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (unsigned k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  for (unsigned i = 0; i < n; ++i) {
    Rational c = a[i][n] / a[i][i];
    c.canonicalize();
    if (c.get_den() != 1) throw Error("numerical polynomial with a non-integral binomial coefficient");
    w.d.push_back(c.get_num());
  }
  for (unsigned h = w.h0; h <= w.h0 + t.m; ++h)
    if (enumeration_cheap(t, h) && count_by_enumeration(t, h) != w(h))
      throw Error("Kolchin polynomial disagrees with enumeration at h = " + std::to_string(h));
  return w;
}

LeaderTable leader_table(const DiffRing& ring, const CharsetCertificate& cert) {
  if (!cert.overall.is_holds()) throw Error("Kolchin polynomial needs a verified characteristic set");
  std::vector<unsigned> active;
  for (unsigned j = 0; j < ring.num_derivations(); ++j)
    if (mask_has(cert.lambda.mask(), j)) active.push_back(j);
  LeaderTable t;
  t.m = static_cast<unsigned>(active.size());
  t.per_var.resize(ring.variables().size());
  for (std::size_t i = 0; i < cert.lambda.size(); ++i) {
    const AlgInd& v = cert.lambda.leader(i).leader;
    if (!v.op.within(cert.lambda.mask())) throw Error("leader involves an inactive derivation");
    Exponents e;
    for (unsigned j : active) e.push_back(v.op.e[j]);
    t.per_var.at(v.var).push_back(std::move(e));
  }
  return t;
}

NumPolynomial kolchin_polynomial(const DiffRing& ring, const CharsetCertificate& cert) {
  return kolchin_from_leaders(leader_table(ring, cert));
}

TypeDim type_dim(const NumPolynomial& w) {
  for (unsigned i = static_cast<unsigned>(w.d.size()); i-- > 0;)
    if (w.d[i] != 0) return {i, w.d[i]};
  return {};
}

OrdinalCNF OrdinalCNF::from_terms(std::vector<Term> terms) {
  std::map<unsigned, std::uint64_t, std::greater<>> acc;
  for (const auto& [e, c] : terms) acc[e] += c;
  OrdinalCNF o;
  for (const auto& [e, c] : acc)
    if (c) o.terms_.emplace_back(e, c);
  return o;
}

OrdinalCNF operator+(const OrdinalCNF& a, const OrdinalCNF& b) {
  if (b.is_zero()) return a;
  const unsigned lead = b.terms_.front().first;
  OrdinalCNF out;
  std::uint64_t carry = 0;
  for (const auto& [e, c] : a.terms_) {
    if (e > lead)
      out.terms_.emplace_back(e, c);
    else if (e == lead)
      carry = c;
  }
  for (std::size_t k = 0; k < b.terms_.size(); ++k)
    out.terms_.emplace_back(b.terms_[k].first, b.terms_[k].second + (k == 0 ? carry : 0));
  return out;
}

OrdinalCNF natural_sum(const OrdinalCNF& a, const OrdinalCNF& b) {
  std::vector<OrdinalCNF::Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return OrdinalCNF::from_terms(std::move(t));
}

std::strong_ordering operator<=>(const OrdinalCNF& a, const OrdinalCNF& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (auto c = a.terms_[k].first <=> b.terms_[k].first; c != 0) return c;
    if (auto c = a.terms_[k].second <=> b.terms_[k].second; c != 0) return c;
  }
  return a.terms_.size() <=> b.terms_.size();
}

std::string OrdinalCNF::format() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    std::string t;
    if (e == 0) {
      t = std::to_string(c);
    } else {
      t = e == 1 ? "w" : "w^" + std::to_string(e);
      if (c != 1) t += "*" + std::to_string(c);
    }
    out += (out.empty() ? "" : " + ") + t;
  }
  return out;
}

OrdinalCNF OrdinalCNF::parse(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& what) {
    throw Error("ordinal: " + what + " at offset " + std::to_string(pos) + " in '" + std::string(text) + "'");
  };
  auto number = [&]() -> std::uint64_t {
    skip();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail("expected a number");
    std::uint64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (v > (UINT64_MAX - 9) / 10) fail("number too large");
      v = v * 10 + static_cast<std::uint64_t>(text[pos++] - '0');
    }
    return v;
  };
  OrdinalCNF total;
  do {
    skip();
    OrdinalCNF term;
    if (pos < text.size() && text[pos] == 'w') {
      ++pos;
      unsigned e = 1;
      skip();
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        e = static_cast<unsigned>(number());
      }
      std::uint64_t c = 1;
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        c = number();
      }
      term = from_terms({{e, c}});
    } else {
      term = finite(number());
    }
    total = total + term;
    skip();
  } while (pos < text.size() && text[pos] == '+' && ++pos);
  skip();
  if (pos < text.size()) fail("unexpected character");
  return total;
}

RankBounds u_rank_bounds(unsigned tau, const Integer& d, const std::optional<std::vector<unsigned>>& gr) {
  if (d < 0) throw Error("Delta-dimension must be nonnegative");
  RankBounds b;
  const Integer up = d + 1;
  if (!up.fits_ulong_p()) throw Error("Delta-dimension too large for an ordinal coefficient");
  b.upper = OrdinalCNF::from_terms({{tau, up.get_ui()}});
  if (gr) {
    const unsigned m = static_cast<unsigned>(gr->size());
    std::vector<OrdinalCNF::Term> terms;
    for (unsigned i = 0; i < m; ++i) terms.emplace_back(m - 1 - i, (*gr)[i]);
    b.lower = OrdinalCNF::from_terms(std::move(terms));
  }
  return b;
}

namespace {

DerivOp op_from(const Exponents& e) {
  DerivOp op;
  for (std::size_t j = 0; j < e.size(); ++j) op.e[j] = static_cast<std::uint16_t>(e[j]);
  return op;
}

FamilyReport build_family(unsigned m, std::vector<Exponents> exps) {
  if (m == 0 || m > kMaxDerivations) throw Error("family needs 1 to 8 derivations");
  // Keep the minimal elements: a derivative of another generator is redundant.
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  std::vector<Exponents> minimal;
  for (const auto& e : exps) {
    bool redundant = false;
    for (const auto& f : exps)
      if (f != e && dominates(e, f)) redundant = true;
    if (!redundant) minimal.push_back(e);
  }
  FamilyReport rep{DiffRing(BaseRing(m), {"x"}), {}, {}, {}, {}, {}, false, {}, {}};
  for (const auto& e : minimal) rep.system.push_back(rep.ring.var(0, op_from(e)));
  AutoSetResult set = make_autoreduced(rep.ring, rep.system);
  if (!set.ok()) throw Error("family system is not autoreduced: " + set.violation->message);
  CharsetCertificate cert = is_charset_of_prime(rep.ring, *set.set);
  rep.charset = cert.overall;
  if (!cert.overall.is_holds()) throw Error("family system failed certification: " + cert.overall.detail);
  rep.system = set.set->elements();
  rep.omega = kolchin_polynomial(rep.ring, cert);
  rep.td = type_dim(rep.omega);
  return rep;
}

}  // namespace

FamilyReport gr_family(const std::vector<unsigned>& r) {
  const unsigned m = static_cast<unsigned>(r.size());
  std::vector<Exponents> exps;
  for (unsigned k = 0; k < m; ++k) {
    Exponents e(m, 0);
    for (unsigned j = 0; j < k; ++j) e[j] = r[j];
    e[k] = k + 1 < m ? r[k] + 1 : r[k];
    exps.push_back(std::move(e));
  }
  FamilyReport rep = build_family(m, std::move(exps));
  rep.claimed = TypeDim{};
  for (unsigned k = 0; k < m; ++k) {
    if (r[k] > 0) {
      rep.claimed = TypeDim{m - 1 - k, r[k]};
      break;
    }
  }
  rep.claim_holds = rep.claimed->tau == rep.td.tau && rep.claimed->d == rep.td.d;
  rep.bounds = u_rank_bounds(rep.td.tau, rep.td.d, r);
  return rep;
}

FamilyReport type_dim_family(unsigned m, unsigned i, unsigned n) {
  if (i >= m) throw Error("type_dim family needs i < m");
  if (n == 0) throw Error("type_dim family needs n >= 1");
  std::vector<Exponents> exps;
  const unsigned lead = m - i - 1;  // 0-based index of delta_{m-i}
  for (unsigned j = 0; j < lead; ++j) {
    Exponents e(m, 0);
    e[j] = 1;
    exps.push_back(std::move(e));
  }
  Exponents last(m, 0);
  last[lead] = n;
  exps.push_back(std::move(last));
  FamilyReport rep = build_family(m, std::move(exps));
  rep.claimed = TypeDim{i, n};
  rep.claim_holds = rep.td.tau == i && rep.td.d == n;
  rep.bounds = u_rank_bounds(rep.td.tau, rep.td.d);
  rep.known_u = OrdinalCNF::from_terms({{i, n}});
  return rep;
}

}  // namespace deltaforge
