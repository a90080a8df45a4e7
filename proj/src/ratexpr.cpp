#include "deltaforge/ratexpr.hpp"

namespace deltaforge {

namespace {

// Common monomial factor of all terms of p with the single monomial m.
DiffPoly::Monomial monomial_gcd(const DiffPoly& p, DiffPoly::Monomial m) {
  for (const auto& [mono, c] : p.terms()) {
    DiffPoly::Monomial kept;
    for (const auto& [v, e] : m) {
      const std::uint32_t other = DiffPoly::power_of(mono, v);
      if (other) kept.emplace_back(v, std::min(e, other));
    }
    m = std::move(kept);
    if (m.empty()) break;
  }
  return m;
}

DiffPoly divide_by_monomial(const DiffPoly& p, const DiffPoly::Monomial& m) {
  DiffPoly out;
  for (const auto& [mono, c] : p.terms()) {
    DiffPoly::Monomial rest;
    for (const auto& [v, e] : mono) {
      const std::uint32_t sub = DiffPoly::power_of(m, v);
      if (e > sub) rest.emplace_back(v, e - sub);
    }
    out.add_term(std::move(rest), c);
  }
  return out;
}

bool rational_single_term(const DiffPoly& p, Rational& coeff, DiffPoly::Monomial& mono) {
  if (p.size() != 1) return false;
  const auto& [m, c] = *p.terms().begin();
  if (!is_rational(c)) return false;
  coeff = c.constant_term();
  mono = m;
  return true;
}

}  // namespace

RatExpr::RatExpr(DiffPoly num, DiffPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error("zero denominator");
  normalize();
}

void RatExpr::normalize() {
  if (num_.is_zero()) {
    den_ = lift(1);
    return;
  }
  Rational c;
  DiffPoly::Monomial m;
  if (rational_single_term(den_, c, m)) {
    const DiffPoly::Monomial g = monomial_gcd(num_, m);
    num_ = divide_by_monomial(num_, g).scaled(BaseElem(Rational(1) / c));
    den_ = divide_by_monomial(DiffPoly::term(BaseElem(Rational(1)), m), g);
    return;
  }
  if (num_ == den_) {
    num_ = den_ = lift(1);
  } else if (num_ == -den_) {
    num_ = lift(-1);
    den_ = lift(1);
  }
}

RatExpr& RatExpr::operator+=(const RatExpr& o) {
  if (den_ == o.den_) {
    num_ += o.num_;
  } else {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RatExpr& RatExpr::operator*=(const RatExpr& o) {
  if (den_ == o.num_ && !den_.is_zero()) {
    den_ = o.den_;
  } else if (num_ == o.den_) {
    num_ = o.num_;
  } else {
    num_ *= o.num_;
    den_ *= o.den_;
  }
  normalize();
  return *this;
}

RatExpr RatExpr::inverse() const {
  if (num_.is_zero()) throw Error("inverse of zero");
  return RatExpr(den_, num_);
}

RatExpr RatExpr::pow(std::uint32_t e) const {
  RatExpr r(lift(1));
  for (std::uint32_t k = 0; k < e; ++k) r *= *this;
  return r;
}

RatExpr apply_delta(const DiffRing& ring, unsigned j, const RatExpr& r) {
  const DiffPoly dn = apply_delta(ring, j, r.num());
  if (r.den() == lift(1)) return RatExpr(dn);
  const DiffPoly dd = apply_delta(ring, j, r.den());
  return RatExpr(dn * r.den() - r.num() * dd, r.den() * r.den());
}

RatExpr partial(const RatExpr& r, const AlgInd& v) {
  const DiffPoly dn = r.num().partial(v);
  if (r.den() == lift(1)) return RatExpr(dn);
  return RatExpr(dn * r.den() - r.num() * r.den().partial(v), r.den() * r.den());
}

RatExpr substitute_rat(const DiffRing& ring, const DiffPoly& f, const std::map<std::uint32_t, RatExpr>& images) {
  std::map<AlgInd, RatExpr> cache;
  return substitute<RatExpr>(
      f, [](const BaseElem& c) { return RatExpr(c); },
      [&](const AlgInd& v) -> RatExpr {
        auto img = images.find(v.var);
        if (img == images.end()) return RatExpr(DiffPoly::variable(v));
        auto it = cache.find(v);
        if (it == cache.end()) {
          RatExpr r = img->second;
          for (unsigned j = 0; j < kMaxDerivations; ++j)
            for (unsigned k = 0; k < v.op.e[j]; ++k) r = apply_delta(ring, j, r);
          it = cache.emplace(v, std::move(r)).first;
        }
        return it->second;
      });
}

RatExpr substitute_rat(const DiffRing& ring, const RatExpr& r, const std::map<std::uint32_t, RatExpr>& images) {
  return substitute_rat(ring, r.num(), images) * substitute_rat(ring, r.den(), images).inverse();
}

DiffPoly substitute_indeterminates(const DiffPoly& f, const std::map<AlgInd, DiffPoly>& images) {
  return substitute<DiffPoly>(
      f, [](const BaseElem& c) { return DiffPoly(c); },
      [&](const AlgInd& v) {
        auto it = images.find(v);
        return it == images.end() ? DiffPoly::variable(v) : it->second;
      });
}

RatExpr substitute_indeterminates(const RatExpr& r, const std::map<AlgInd, DiffPoly>& images) {
  return RatExpr(substitute_indeterminates(r.num(), images), substitute_indeterminates(r.den(), images));
}

std::string format(const DiffRing& ring, const RatExpr& r) {
  if (r.den() == lift(1)) return ring.format(r.num());
  Rational c;
  DiffPoly::Monomial m;
  if (!rational_single_term(r.den(), c, m) || c != 1)
    return "(" + ring.format(r.num()) + ")/(" + ring.format(r.den()) + ")";
  std::string out;
  for (auto it = r.num().terms().rbegin(); it != r.num().terms().rend(); ++it) {
    for (auto ct = it->second.terms().rbegin(); ct != it->second.terms().rend(); ++ct) {
      const DiffPoly t = DiffPoly::term(BaseElem::term(ct->second, ct->first), it->first);
      const DiffPoly::Monomial g = monomial_gcd(t, m);
      const DiffPoly tn = divide_by_monomial(t, g);
      const DiffPoly td = divide_by_monomial(DiffPoly::term(BaseElem(Rational(1)), m), g);
      std::string s = ring.format(tn);
      if (td != lift(1)) {
        const std::string d = ring.format(td);
        s += d.find('*') == std::string::npos ? "/" + d : "/(" + d + ")";
      }
      if (out.empty())
        out = s;
      else if (s[0] == '-')
        out += " - " + s.substr(1);
      else
        out += " + " + s;
    }
  }
  return out;
}

}  // namespace deltaforge
