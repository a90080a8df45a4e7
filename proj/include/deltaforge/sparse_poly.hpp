#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <type_traits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace deltaforge {

using Rational = mpq_class;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

template <class Var, class Coeff>
class SparsePoly;
template <class Var, class Coeff>
bool is_zero(const SparsePoly<Var, Coeff>& p) {
  return p.is_zero();
}

/// Sparse multivariate polynomial with exact coefficients.
///
/// A monomial is a list of (variable, power) pairs sorted by decreasing
/// variable; monomials are ordered lexicographically on that list, so the
/// greatest monomial starts with the highest variable at its highest power.
/// `Var` must be totally ordered by `operator<`. `Coeff` must provide ring
/// operations and an `is_zero` overload.
template <class Var, class Coeff>
class SparsePoly {
 public:
  using Factor = std::pair<Var, std::uint32_t>;
  using Monomial = std::vector<Factor>;

  struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
      const std::size_t n = std::min(a.size(), b.size());
      for (std::size_t k = 0; k < n; ++k) {
        if (a[k].first < b[k].first) return true;
        if (b[k].first < a[k].first) return false;
        if (a[k].second != b[k].second) return a[k].second < b[k].second;
      }
      return a.size() < b.size();
    }
  };

  using Terms = std::map<Monomial, Coeff, MonomialLess>;

  SparsePoly() = default;
  explicit SparsePoly(Coeff c) {
    if (!deltaforge::is_zero(c)) terms_.emplace(Monomial{}, std::move(c));
  }
  static SparsePoly constant(Coeff c) { return SparsePoly(std::move(c)); }
  static SparsePoly variable(const Var& v, std::uint32_t power = 1) {
    SparsePoly p;
    if (power == 0)
      p.terms_.emplace(Monomial{}, Coeff(1));
    else
      p.terms_.emplace(Monomial{{v, power}}, Coeff(1));
    return p;
  }
  static SparsePoly term(Coeff c, Monomial m) {
    SparsePoly p;
    p.add_term(std::move(m), std::move(c));
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  /// Constant term (zero if absent).
  Coeff constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  /// Adds c*m in place, dropping the term if it cancels.
  void add_term(Monomial m, Coeff c) {
    if (deltaforge::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (deltaforge::is_zero(it->second)) terms_.erase(it);
    }
  }

  SparsePoly& operator+=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  SparsePoly& operator-=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  SparsePoly operator-() const {
    SparsePoly r;
    for (const auto& [m, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), m, -c);
    return r;
  }
  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }

  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (j->first < i->first) {
        r.push_back(*i++);
      } else if (i->first < j->first) {
        r.push_back(*j++);
      } else {
        r.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    r.insert(r.end(), i, a.end());
    r.insert(r.end(), j, b.end());
    return r;
  }

  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    SparsePoly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(multiply(ma, mb), ca * cb);
    return r;
  }
  SparsePoly& operator*=(const SparsePoly& o) { return *this = *this * o; }

  SparsePoly scaled(const Coeff& c) const {
    SparsePoly r;
    if (deltaforge::is_zero(c)) return r;
    for (const auto& [m, k] : terms_) r.add_term(m, k * c);
    return r;
  }
  SparsePoly times_monomial(const Monomial& mono) const {
    SparsePoly r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(multiply(m, mono), c);
    return r;
  }

  SparsePoly pow(std::uint32_t e) const {
    SparsePoly result(Coeff(1));
    SparsePoly base = *this;
    while (e) {
      if (e & 1u) result *= base;
      e >>= 1u;
      if (e) base *= base;
    }
    return result;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const SparsePoly& a, const SparsePoly& b) { return !(a == b); }
  friend bool operator<(const SparsePoly& a, const SparsePoly& b) {
    return std::lexicographical_compare(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                                        b.terms_.end(), [](const auto& x, const auto& y) {
                                          if (MonomialLess{}(x.first, y.first)) return true;
                                          if (MonomialLess{}(y.first, x.first)) return false;
                                          return x.second < y.second;
                                        });
  }

  static std::uint32_t power_of(const Monomial& m, const Var& v) {
    for (const auto& [w, e] : m)
      if (!(w < v) && !(v < w)) return e;
    return 0;
  }

  std::uint32_t degree_in(const Var& v) const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, power_of(m, v));
    return d;
  }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) {
      std::uint32_t s = 0;
      for (const auto& f : m) s += f.second;
      d = std::max(d, s);
    }
    return d;
  }

  /// Highest variable occurring, if any.
  const Var* max_variable() const {
    if (terms_.empty()) return nullptr;
    const Monomial& top = terms_.rbegin()->first;
    return top.empty() ? nullptr : &top.front().first;
  }

  std::set<Var> variables() const {
    std::set<Var> out;
    for (const auto& [m, c] : terms_)
      for (const auto& f : m) out.insert(f.first);
    return out;
  }

  /// Coefficient of v^k when viewed as a polynomial in v.
  SparsePoly coefficient(const Var& v, std::uint32_t k) const {
    SparsePoly r;
    for (const auto& [m, c] : terms_) {
      if (power_of(m, v) != k) continue;
      Monomial rest;
      rest.reserve(m.size());
      for (const auto& f : m)
        if (f.first < v || v < f.first) rest.push_back(f);
      r.terms_.emplace(std::move(rest), c);
    }
    return r;
  }

  SparsePoly partial(const Var& v) const {
    SparsePoly r;
    for (const auto& [m, c] : terms_) {
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k].first < v || v < m[k].first) continue;
        Monomial d = m;
        const std::uint32_t e = d[k].second;
        if (e == 1)
          d.erase(d.begin() + static_cast<std::ptrdiff_t>(k));
        else
          d[k].second = e - 1;
        r.add_term(std::move(d), c * Coeff(static_cast<long>(e)));
        break;
      }
    }
    return r;
  }

  template <class F>
  SparsePoly map_coefficients(F&& f) const {
    SparsePoly r;
    for (const auto& [m, c] : terms_) r.add_term(m, f(c));
    return r;
  }

 private:
  Terms terms_;
};

/// Derivation on a polynomial ring determined by the images of variables and
/// of coefficients: D(c*m) = D_coeff(c)*m + c * sum_v dm/dv * D(v).
template <class P, class CoeffMap, class VarMap>
P apply_derivation(const P& p, CoeffMap&& on_coeff, VarMap&& on_var) {
  P out;
  for (const auto& [m, c] : p.terms()) {
    auto dc = on_coeff(c);
    if (!is_zero(dc)) out.add_term(m, std::move(dc));
    for (std::size_t k = 0; k < m.size(); ++k) {
      const P image = on_var(m[k].first);
      if (image.is_zero()) continue;
      typename P::Monomial rest = m;
      const std::uint32_t e = rest[k].second;
      if (e == 1)
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      else
        rest[k].second = e - 1;
      using C = std::decay_t<decltype(c)>;
      const C factor = c * C(static_cast<long>(e));
      for (const auto& [mi, ci] : image.terms())
        out.add_term(P::multiply(rest, mi), factor * ci);
    }
  }
  return out;
}

/// Ring homomorphism sending each variable to a polynomial (possibly over a
/// different ring type R) and each coefficient through `on_coeff`.
template <class R, class P, class CoeffMap, class VarMap>
R substitute(const P& p, CoeffMap&& on_coeff, VarMap&& on_var) {
  R out;
  std::map<typename P::Factor, R> powers;
  for (const auto& [m, c] : p.terms()) {
    R t = on_coeff(c);
    for (const auto& f : m) {
      auto it = powers.find(f);
      if (it == powers.end()) it = powers.emplace(f, on_var(f.first).pow(f.second)).first;
      t = t * it->second;
    }
    out += t;
  }
  return out;
}

}  // namespace deltaforge
