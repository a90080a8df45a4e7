#include "deltaforge/axioms.hpp"

#include <algorithm>

namespace deltaforge {

namespace {

struct Certified {
  std::optional<CharsetCertificate> cert;
  Verdict verdict;
};

Certified certify(const DiffRing& ring, const std::vector<DiffPoly>& fs, DerivMask mask, const ReduceOptions& opts,
                  const std::string& name) {
  AutoSetResult r = make_autoreduced(ring, fs, mask);
  if (!r.ok()) {
    return {std::nullopt, Verdict::fails(std::nullopt, name + " is not autoreduced: " + r.violation->message)};
  }
  CharsetCertificate c = is_charset_of_prime(ring, *r.set, opts);
  Verdict v = c.overall;
  if (!v.is_holds()) v.detail = name + ": " + v.detail;
  return {std::move(c), std::move(v)};
}

void check_members(const DiffRing& ring, AxiomInstance& inst, const CharsetCertificate& gamma,
                   const ReduceOptions& opts) {
  try {
    for (auto& m : inst.members) m.remainder = ritt_reduce(ring, m.poly, gamma.lambda, opts).remainder;
  } catch (const LimitExceeded& e) {
    inst.containment = Verdict::unknown(e.what());
    return;
  }
  for (const auto& m : inst.members) {
    if (!m.remainder.is_zero()) {
      inst.containment = Verdict::fails(m.remainder, m.label + " reduces to " + ring.format(m.remainder));
      return;
    }
  }
  inst.containment = Verdict::holds(inst.members.empty() ? "no equations to contain" : "every equation reduces to 0");
}

void finish(AxiomInstance& inst, const std::string& condition) {
  inst.overall = combine({inst.lambda_charset, inst.gamma_charset, inst.containment});
  if (inst.overall.is_holds()) inst.condition = condition;
}

}  // namespace

AxiomInstance dcf_instance(const DiffRing& ring, const std::vector<DiffPoly>& lambda,
                           const std::vector<DiffPoly>& gamma, const Partition& part,
                           const std::vector<std::uint32_t>& xblock, const UBlock& u, const ReduceOptions& opts) {
  if (part.r() != 1) throw Error("dcf instances use exactly one distinguished derivation");
  const unsigned d = part.dist[0];
  AxiomInstance inst;
  inst.kind = "dcf";
  inst.lambda = lambda;
  inst.gamma = gamma;
  for (const auto& f : lambda)
    for (const auto& v : f.variables())
      if (std::find(xblock.begin(), xblock.end(), v.var) == xblock.end())
        throw Error("Lambda must only involve the x-block: " + ring.format(f));

  Certified lc = certify(ring, lambda, part.delta, opts, "Lambda");
  Certified gc = certify(ring, gamma, part.delta, opts, "Gamma");
  inst.lambda_charset = lc.verdict;
  inst.gamma_charset = gc.verdict;
  if (!gc.verdict.is_holds()) {
    inst.containment = Verdict::unknown("Gamma is not a certified characteristic set");
  } else {
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      inst.members.push_back({"f" + std::to_string(k + 1), lambda[k], {}});
      inst.members.push_back({"d(f" + std::to_string(k + 1) + ")", d_op(ring, lambda[k], d, part.delta, u), {}});
    }
    check_members(ring, inst, *gc.cert, opts);
  }
  std::string block;
  for (auto x : xblock) block += (block.empty() ? "" : ", ") + ring.variables()[x];
  finish(inst, "exists a = (" + block + ") with a in V*(Lambda) and (a, d" + std::to_string(d + 1) +
                   "(a)) in V*(Gamma)");
  return inst;
}

AxiomInstance dcfa_instance(const DiffRing& ring, const std::vector<DiffPoly>& lambda,
                            const std::vector<DiffPoly>& gamma, const std::vector<std::uint32_t>& xblock,
                            const std::vector<std::uint32_t>& yblock, const ReduceOptions& opts) {
  if (!ring.base().has_sigma()) throw Error("dcfa instances need a sigma table");
  if (xblock.size() != yblock.size()) throw Error("y-block arity does not match the x-block");
  std::map<std::uint32_t, std::uint32_t> to_y;
  for (std::size_t k = 0; k < xblock.size(); ++k) to_y[xblock[k]] = yblock[k];
  for (const auto& f : lambda)
    for (const auto& v : f.variables())
      if (!to_y.count(v.var)) throw Error("Lambda must only involve the x-block: " + ring.format(f));

  AxiomInstance inst;
  inst.kind = "dcfa";
  inst.lambda = lambda;
  inst.gamma = gamma;
  const DerivMask all = all_derivations(ring.num_derivations());
  Certified lc = certify(ring, lambda, all, opts, "Lambda");
  Certified gc = certify(ring, gamma, all, opts, "Gamma");
  inst.lambda_charset = lc.verdict;
  inst.gamma_charset = gc.verdict;
  if (!gc.verdict.is_holds()) {
    inst.containment = Verdict::unknown("Gamma is not a certified characteristic set");
  } else {
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      inst.members.push_back({"f" + std::to_string(k + 1), lambda[k], {}});
      inst.members.push_back(
          {"f" + std::to_string(k + 1) + "^sigma", rename_variables(coeff_twist_sigma(ring, lambda[k]), to_y), {}});
    }
    check_members(ring, inst, *gc.cert, opts);
  }
  inst.unchecked = {"projection of V*(Gamma) onto x contains a Delta-open subset O of V(Lambda)",
                    "projection of V*(Gamma) onto y contains a Delta-open subset Q of V(Lambda^sigma)"};
  finish(inst, "exists a with (a, sigma(a)) in V*(Gamma)");
  return inst;
}

namespace {

Verdict matrix_zero(const BaseRing& base, const BaseMatrix& m, const std::string& what) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!m(r, c).is_zero())
        return Verdict::fails(lift(m(r, c)), what + " entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                                 "): " + base.format(m(r, c)));
  return Verdict::holds();
}

}  // namespace

std::vector<IdentityCheck> dsm_identities(const DiffRing& ring, const DSMSystem& s) {
  const BaseRing& base = ring.base();
  if (!base.has_sigma()) throw Error("dsm-check needs a sigma table");
  const unsigned m = base.num_derivations();
  if (s.a.size() != m) throw Error("dsm-check needs one matrix per derivation (" + std::to_string(m) + ")");
  const std::size_t n = s.b.rows();
  auto check_size = [&](const BaseMatrix& x, const std::string& name) {
    if (x.rows() != n || x.cols() != n) throw Error("matrix " + name + " must be " + std::to_string(n) + "x" +
                                                     std::to_string(n));
  };
  check_size(s.b, "B");
  check_size(s.b_inv, "B^-1");
  for (unsigned i = 0; i < m; ++i) check_size(s.a[i], "A" + std::to_string(i + 1));
  const BaseMatrix id = BaseMatrix::identity(n, BaseElem(Rational(1)));
  if (!(s.b * s.b_inv == id)) throw Error("declared B^-1 is not an inverse of B");

  auto delta = [&](unsigned j, const BaseMatrix& x) {
    return x.map([&](const BaseElem& e) { return apply_delta_base(base, j, e); });
  };
  auto sigma = [&](const BaseMatrix& x) { return x.map([&](const BaseElem& e) { return apply_sigma_base(base, e); }); };

  std::vector<IdentityCheck> out;
  auto add = [&](std::string label, const BaseMatrix& residue) {
    out.push_back({label, matrix_zero(base, residue, label)});
  };
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = i + 1; j < m; ++j)
      add("uset(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
          delta(j, s.a[i]) - delta(i, s.a[j]) - (s.a[i] * s.a[j] - s.a[j] * s.a[i]));
  for (unsigned i = 0; i < m; ++i) {
    const std::string k = std::to_string(i + 1);
    add("useg(" + k + ")", s.b * sigma(s.a[i]) - delta(i, s.b) - s.a[i] * s.b);
    add("usec(" + k + ")", s.b_inv * s.a[i] - delta(i, s.b_inv) - sigma(s.a[i]) * s.b_inv);
    add("dinv(" + k + ")", delta(i, s.b_inv) + s.b_inv * delta(i, s.b) * s.b_inv);
  }
  return out;
}

std::string JetSystem::format_row(const BaseRing& base, std::size_t i) const {
  std::vector<std::pair<Rational, std::vector<std::string>>> terms;
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    const BaseElem& c = rows.at(i)[k];
    for (auto it = c.terms().rbegin(); it != c.terms().rend(); ++it) {
      std::vector<std::string> factors;
      for (const auto& [idx, e] : it->first)
        factors.push_back(base.constant_names()[idx] + (e > 1 ? "^" + std::to_string(e) : ""));
      factors.push_back(unknowns[k]);
      terms.emplace_back(it->second, std::move(factors));
    }
  }
  return format_terms(terms) + " = 0";
}

namespace {

// Multi-indices of total order `order` over n variables, first variable highest.
void multi_indices(unsigned n, unsigned order, std::vector<unsigned>& cur, std::size_t pos,
                   std::vector<std::vector<unsigned>>& out) {
  if (pos + 1 == n) {
    cur[pos] = order;
    out.push_back(cur);
    return;
  }
  for (unsigned e = order + 1; e-- > 0;) {
    cur[pos] = e;
    multi_indices(n, order - e, cur, pos + 1, out);
  }
}

}  // namespace

JetSystem jet_equations(const DiffRing& ring, const std::vector<DiffPoly>& gens,
                        const std::vector<std::uint32_t>& xblock, const std::vector<Rational>& a, unsigned r) {
  if (a.size() != xblock.size()) throw Error("point arity does not match the variables");
  std::map<std::uint32_t, Rational> point;
  for (std::size_t k = 0; k < xblock.size(); ++k) point[xblock[k]] = a[k];
  for (const auto& f : gens) {
    if (max_order(f) > 0) throw Error("jet equations need algebraic generators: " + ring.format(f));
    if (!evaluate_at(f, point).is_zero()) throw Error("point is not on the variety: " + ring.format(f) + " != 0");
  }

  JetSystem sys;
  bool short_names = true;
  for (auto x : xblock) short_names = short_names && ring.variables()[x].size() == 1;
  for (unsigned order = 1; order <= r && !xblock.empty(); ++order) {
    std::vector<unsigned> cur(xblock.size());
    multi_indices(static_cast<unsigned>(xblock.size()), order, cur, 0, sys.alphas);
  }
  for (const auto& alpha : sys.alphas) {
    std::string name = "u_";
    bool first = true;
    for (std::size_t k = 0; k < alpha.size(); ++k)
      for (unsigned e = 0; e < alpha[k]; ++e) {
        if (!first && !short_names) name += ".";
        name += ring.variables()[xblock[k]];
        first = false;
      }
    sys.unknowns.push_back(std::move(name));
  }
  for (const auto& f : gens) {
    std::vector<BaseElem> row;
    for (const auto& alpha : sys.alphas) {
      DiffPoly p = f;
      for (std::size_t k = 0; k < alpha.size() && !p.is_zero(); ++k)
        for (unsigned e = 0; e < alpha[k]; ++e) p = p.partial(AlgInd{xblock[k], {}});
      row.push_back(evaluate_at(p, point));
    }
    sys.rows.push_back(std::move(row));
  }
  return sys;
}

}  // namespace deltaforge
