#include "deltaforge/reduction.hpp"

#include <algorithm>

namespace deltaforge {

std::string to_string(Reducedness r) {
  switch (r) {
    case Reducedness::Fully: return "fully";
    case Reducedness::PartiallyOnly: return "partially_only";
    case Reducedness::No: return "no";
  }
  return "?";
}

namespace {

bool is_proper_derivative(const AlgInd& w, const AlgInd& v, DerivMask mask) {
  return w.is_derivative_of(v) && !(w == v) && (w.op - v.op).within(mask);
}

}  // namespace

Reducedness is_reduced(const DiffPoly& g, const DiffPoly& f, DerivMask mask) {
  const LeaderData lf = leader_data(f);
  for (const auto& w : g.variables())
    if (is_proper_derivative(w, lf.leader, mask)) return Reducedness::No;
  return g.degree_in(lf.leader) < lf.degree ? Reducedness::Fully : Reducedness::PartiallyOnly;
}

DiffPoly AutoSet::h_product() const {
  DiffPoly h = lift(1);
  for (std::size_t i = 0; i < elems_.size(); ++i) h = h * inits_[i] * seps_[i];
  return h;
}

struct AutoSetBuilder {
  static AutoSet build(std::vector<DiffPoly> fs, DerivMask mask) {
    AutoSet s;
    s.mask_ = mask;
    for (auto& f : fs) {
      s.leaders_.push_back(leader_data(f));
      s.seps_.push_back(separant(f));
      s.inits_.push_back(initial(f));
      s.elems_.push_back(std::move(f));
    }
    return s;
  }
};

AutoSetResult make_autoreduced(const DiffRing& ring, std::vector<DiffPoly> fs, DerivMask mask) {
  for (const auto& f : fs)
    if (is_base_element(f)) throw Error("autoreduced sets cannot contain base elements (" + ring.format(f) + ")");
  std::stable_sort(fs.begin(), fs.end(),
                   [](const DiffPoly& a, const DiffPoly& b) { return compare_rank(a, b) < 0; });
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (compare_rank(fs[i - 1], fs[i]) == 0)
      throw Error("duplicate rank: " + ring.format(fs[i - 1]) + " and " + ring.format(fs[i]));
  AutoSetResult result;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      if (i == j) continue;
      const Reducedness r = is_reduced(fs[i], fs[j], mask);
      if (r != Reducedness::Fully) {
        result.violation = AutoViolation{
            i, j, r, ring.format(fs[i]) + " is not reduced with respect to " + ring.format(fs[j])};
        return result;
      }
    }
  }
  result.set = AutoSetBuilder::build(std::move(fs), mask);
  return result;
}

AutoSet require_autoreduced(const DiffRing& ring, std::vector<DiffPoly> fs, DerivMask mask) {
  AutoSetResult r = make_autoreduced(ring, std::move(fs), mask);
  if (!r.ok()) throw Error("not autoreduced: " + r.violation->message);
  return std::move(*r.set);
}

std::weak_ordering compare_autosets(const AutoSet& a, const AutoSet& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = compare_rank(a[i], b[i]);
    if (c != 0) return c;
  }
  if (a.size() == b.size()) return std::weak_ordering::equivalent;
  return a.size() > b.size() ? std::weak_ordering::less : std::weak_ordering::greater;
}

namespace {

struct Reducer {
  const DiffRing& ring;
  const AutoSet& lambda;
  const ReduceOptions& opts;
  ReductionCert cert;
  std::size_t steps = 0;

  void tick() {
    if (++steps > opts.max_steps) throw LimitExceeded("reduction exceeded its step budget");
  }

  void scale_quotients(const DiffPoly& m) {
    for (auto& t : cert.combination) t.quotient *= m;
  }

  std::optional<std::size_t> pick(const std::vector<std::size_t>& candidates) const {
    if (candidates.empty()) return std::nullopt;
    return opts.tie == TieBreak::LowestIndex ? candidates.front() : candidates.back();
  }

  // Highest indeterminate of g that is a proper derivative of some leader.
  bool partial_step(DiffPoly& g) {
    const auto vars = g.variables();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      std::vector<std::size_t> cands;
      for (std::size_t i = 0; i < lambda.size(); ++i)
        if (is_proper_derivative(*it, lambda.leader(i).leader, lambda.mask())) cands.push_back(i);
      if (auto i = pick(cands)) {
        const AlgInd w = *it;
        const DerivOp theta = w.op - lambda.leader(*i).leader.op;
        const DiffPoly tf = apply_op(ring, theta, lambda[*i]);
        const DiffPoly& s = lambda.separant(*i);
        for (std::uint32_t d = g.degree_in(w); d > 0; d = g.degree_in(w)) {
          tick();
          const DiffPoly q = g.coefficient(w, d) * DiffPoly::variable(w, d - 1);
          g = s * g - q * tf;
          scale_quotients(s);
          cert.combination.push_back({q, theta, *i});
          ++cert.sep_exp[*i];
        }
        return true;
      }
    }
    return false;
  }

  bool full_step(DiffPoly& g) {
    const auto vars = g.variables();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      std::vector<std::size_t> cands;
      for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda.leader(i).leader == *it && g.degree_in(*it) >= lambda.leader(i).degree) cands.push_back(i);
      if (auto i = pick(cands)) {
        const AlgInd v = *it;
        const unsigned df = lambda.leader(*i).degree;
        const DiffPoly& init = lambda.initial(*i);
        for (std::uint32_t d = g.degree_in(v); d >= df; d = g.degree_in(v)) {
          tick();
          const DiffPoly q = g.coefficient(v, d) * DiffPoly::variable(v, d - df);
          g = init * g - q * lambda[*i];
          scale_quotients(init);
          cert.combination.push_back({q, DerivOp{}, *i});
          ++cert.init_exp[*i];
        }
        return true;
      }
    }
    return false;
  }
};

}  // namespace

ReductionCert ritt_reduce(const DiffRing& ring, const DiffPoly& g, const AutoSet& lambda,
                          const ReduceOptions& opts) {
  Reducer r{ring, lambda, opts, {}, 0};
  r.cert.sep_exp.assign(lambda.size(), 0);
  r.cert.init_exp.assign(lambda.size(), 0);
  DiffPoly cur = g;
  while (r.partial_step(cur)) {
  }
  while (r.full_step(cur)) {
  }
  r.cert.remainder = std::move(cur);
  return std::move(r.cert);
}

bool verify_certificate(const DiffRing& ring, const DiffPoly& g, const AutoSet& lambda,
                        const ReductionCert& cert) {
  if (cert.sep_exp.size() != lambda.size() || cert.init_exp.size() != lambda.size()) return false;
  DiffPoly lhs = g;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    lhs = lhs * lambda.separant(i).pow(cert.sep_exp[i]) * lambda.initial(i).pow(cert.init_exp[i]);
  DiffPoly rhs = cert.remainder;
  for (const auto& t : cert.combination) {
    if (t.index >= lambda.size()) return false;
    rhs += t.quotient * apply_op(ring, t.theta, lambda[t.index]);
  }
  return lhs == rhs;
}

}  // namespace deltaforge
