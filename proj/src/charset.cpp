#include "deltaforge/charset.hpp"

namespace deltaforge {

std::string to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Holds: return "Holds";
    case Verdict::Kind::Fails: return "Fails";
    case Verdict::Kind::Unknown: return "Unknown";
  }
  return "?";
}

std::string to_string(PrimalityStage s) {
  switch (s) {
    case PrimalityStage::Linear: return "linear";
    case PrimalityStage::Quadratic: return "quadratic";
    case PrimalityStage::None: return "none";
  }
  return "?";
}

Verdict combine(const std::vector<Verdict>& parts) {
  for (const auto& v : parts)
    if (v.is_fails()) return v;
  for (const auto& v : parts)
    if (v.is_unknown()) return v;
  return Verdict::holds();
}

std::vector<DeltaPair> delta_pairs(const AutoSet& lambda) {
  std::vector<DeltaPair> out;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = i + 1; j < lambda.size(); ++j) {
      const AlgInd& a = lambda.leader(i).leader;
      const AlgInd& b = lambda.leader(j).leader;
      if (a.var != b.var) continue;
      const DerivOp v = DerivOp::join(a.op, b.op);
      const DerivOp ti = v - a.op;
      const DerivOp tj = v - b.op;
      if (!ti.within(lambda.mask()) || !tj.within(lambda.mask())) continue;
      out.push_back({i, j, ti, tj, AlgInd{a.var, v}});
    }
  }
  return out;
}

CoherenceReport coherence_check(const DiffRing& ring, const AutoSet& lambda, const ReduceOptions& opts) {
  CoherenceReport report;
  std::vector<Verdict> verdicts;
  for (const DeltaPair& p : delta_pairs(lambda)) {
    PairCheck pc{p, {}, {}, Verdict::holds()};
    pc.delta = lambda.separant(p.j) * apply_op(ring, p.theta_i, lambda[p.i]) -
               lambda.separant(p.i) * apply_op(ring, p.theta_j, lambda[p.j]);
    const std::string label = "pair (" + std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ") at " +
                              ring.format(p.v);
    try {
      pc.remainder = ritt_reduce(ring, pc.delta, lambda, opts).remainder;
      bool reduced = true;
      for (std::size_t k = 0; k < lambda.size(); ++k)
        if (is_reduced(pc.remainder, lambda[k], lambda.mask()) != Reducedness::Fully) reduced = false;
      if (pc.remainder.is_zero())
        pc.verdict = Verdict::holds();
      else if (reduced)
        pc.verdict = Verdict::fails(pc.remainder, label + ": Delta-polynomial reduces to " + ring.format(pc.remainder));
      else
        pc.verdict = Verdict::unknown(label + ": remainder is not fully reduced");
    } catch (const LimitExceeded& e) {
      pc.verdict = Verdict::unknown(label + ": " + e.what());
    }
    verdicts.push_back(pc.verdict);
    report.pairs.push_back(std::move(pc));
  }
  report.verdict = combine(verdicts);
  if (report.verdict.is_holds())
    report.verdict.detail = report.pairs.empty() ? "no Delta-pairs" : "every Delta-polynomial reduces to 0";
  return report;
}

namespace {

// Coefficient constants and differential indeterminates flattened into one
// polynomial ring; indeterminates rank above constants.
struct FlatVar {
  bool diff = false;
  AlgInd v;
  ConstIndex c = 0;

  friend bool operator<(const FlatVar& a, const FlatVar& b) {
    if (a.diff != b.diff) return !a.diff;
    if (a.diff) return a.v < b.v;
    return a.c < b.c;
  }
};

using FlatPoly = SparsePoly<FlatVar, Rational>;

FlatPoly flatten(const DiffPoly& p) {
  FlatPoly out;
  for (const auto& [m, coef] : p.terms()) {
    for (const auto& [cm, q] : coef.terms()) {
      FlatPoly::Monomial mono;
      for (const auto& [v, e] : m) mono.emplace_back(FlatVar{true, v, 0}, e);
      for (const auto& [c, e] : cm) mono.emplace_back(FlatVar{false, {}, c}, e);
      out.add_term(std::move(mono), q);
    }
  }
  return out;
}

DiffPoly unflatten(const FlatPoly& p) {
  DiffPoly out;
  for (const auto& [m, q] : p.terms()) {
    DiffPoly::Monomial dm;
    BaseElem::Monomial cm;
    for (const auto& [fv, e] : m) {
      if (fv.diff)
        dm.emplace_back(fv.v, e);
      else
        cm.emplace_back(fv.c, e);
    }
    out += DiffPoly::term(BaseElem::term(q, std::move(cm)), std::move(dm));
  }
  return out;
}

std::optional<Rational> rational_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
  return Rational(sqrt(mpz_class(q.get_num())), sqrt(mpz_class(q.get_den())));
}

std::optional<FlatPoly::Monomial> divide_monomial(const FlatPoly::Monomial& a, const FlatPoly::Monomial& b) {
  FlatPoly::Monomial out;
  std::size_t j = 0;
  for (const auto& [v, e] : a) {
    std::uint32_t sub = 0;
    if (j < b.size() && !(b[j].first < v) && !(v < b[j].first)) sub = b[j++].second;
    if (sub > e) return std::nullopt;
    if (e > sub) out.emplace_back(v, e - sub);
  }
  if (j != b.size()) return std::nullopt;
  return out;
}

std::uint32_t monomial_degree(const FlatPoly::Monomial& m) {
  std::uint32_t d = 0;
  for (const auto& f : m) d += f.second;
  return d;
}

}  // namespace

std::optional<DiffPoly> exact_sqrt(const DiffPoly& input) {
  const FlatPoly p = flatten(input);
  if (p.is_zero()) return DiffPoly();
  const auto& [lead_m, lead_c] = *p.terms().rbegin();
  FlatPoly::Monomial half;
  for (const auto& [v, e] : lead_m) {
    if (e % 2) return std::nullopt;
    half.emplace_back(v, e / 2);
  }
  const auto c0 = rational_sqrt(lead_c);
  if (!c0) return std::nullopt;
  const FlatPoly t0 = FlatPoly::term(*c0, half);
  const FlatPoly::Monomial& lowest = p.terms().begin()->first;
  const std::uint32_t max_deg = p.total_degree() / 2;
  FlatPoly root = t0;
  for (std::size_t step = 0;; ++step) {
    if (step > 100000) throw LimitExceeded("square-root extraction exceeded its step budget");
    const FlatPoly rem = p - root * root;
    if (rem.is_zero()) return unflatten(root);
    const auto& [lm, lc] = *rem.terms().rbegin();
    auto qm = divide_monomial(lm, half);
    if (!qm || monomial_degree(*qm) > max_deg) return std::nullopt;
    if (FlatPoly::MonomialLess{}(FlatPoly::multiply(*qm, *qm), lowest)) return std::nullopt;
    if (!FlatPoly::MonomialLess{}(*qm, half)) return std::nullopt;
    root += FlatPoly::term(lc / (2 * *c0), *qm);
  }
}

PrimalityReport primality_check(const DiffRing& ring, const AutoSet& lambda) {
  PrimalityReport r;
  bool linear = true;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (lambda.leader(i).degree != 1) linear = false;
  if (linear) {
    r.stage = PrimalityStage::Linear;
    r.verdict = Verdict::holds("every leader occurs linearly");
    return r;
  }
  if (lambda.size() == 1 && lambda.leader(0).degree == 2) {
    r.stage = PrimalityStage::Quadratic;
    const DiffPoly& f = lambda[0];
    const AlgInd v = lambda.leader(0).leader;
    const DiffPoly a = f.coefficient(v, 2);
    const DiffPoly b = f.coefficient(v, 1);
    const DiffPoly c = f.coefficient(v, 0);
    r.discriminant = b * b - lift(4) * a * c;
    std::optional<DiffPoly> root;
    try {
      root = exact_sqrt(*r.discriminant);
    } catch (const LimitExceeded& e) {
      r.stage = PrimalityStage::None;
      r.verdict = Verdict::unknown(e.what());
      return r;
    }
    if (!root) {
      r.verdict = Verdict::holds("discriminant " + ring.format(*r.discriminant) + " is not a square");
      return r;
    }
    const DiffPoly lin = lift(2) * a * DiffPoly::variable(v) + b;
    r.factors = {lin - *root, lin + *root};
    r.verdict = Verdict::fails(r.factors[0], "4*(" + ring.format(a) + ")*f = (" + ring.format(r.factors[0]) +
                                                 ")*(" + ring.format(r.factors[1]) + ")");
    return r;
  }
  r.verdict = Verdict::unknown("primality oracle limit");
  return r;
}

Verdict no_reduced_element_check(const PrimalityReport& primality) {
  if (!primality.verdict.is_holds()) return Verdict::unknown("primality was not established");
  switch (primality.stage) {
    case PrimalityStage::Linear:
      return Verdict::holds("non-leader indeterminates are algebraically independent at the generic point");
    case PrimalityStage::Quadratic:
      return Verdict::holds("a reduced member would be a proper factor of an irreducible element");
    case PrimalityStage::None: break;
  }
  return Verdict::unknown("primality oracle limit");
}

CharsetCertificate is_charset_of_prime(const DiffRing& ring, const AutoSet& lambda, const ReduceOptions& opts) {
  CharsetCertificate cert;
  cert.lambda = lambda;
  cert.coherence = coherence_check(ring, lambda, opts);
  cert.primality = primality_check(ring, lambda);
  cert.no_reduced_element = no_reduced_element_check(cert.primality);
  cert.overall = combine({cert.coherence.verdict, cert.primality.verdict, cert.no_reduced_element});
  return cert;
}

Membership ideal_membership(const DiffRing& ring, const DiffPoly& g, const CharsetCertificate& cert) {
  if (!cert.overall.is_holds()) throw Error("ideal membership needs a verified characteristic set");
  return ritt_reduce(ring, g, cert.lambda).remainder.is_zero() ? Membership::Member : Membership::Nonmember;
}

}  // namespace deltaforge
