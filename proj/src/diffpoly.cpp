#include "deltaforge/diffpoly.hpp"

#include <set>

namespace deltaforge {

DiffRing::DiffRing(BaseRing base, std::vector<std::string> vars) : base_(std::move(base)) {
  for (auto& v : vars) add_variable(std::move(v));
}

std::optional<std::uint32_t> DiffRing::find_variable(std::string_view name) const {
  for (std::size_t k = 0; k < vars_.size(); ++k)
    if (vars_[k] == name) return static_cast<std::uint32_t>(k);
  return std::nullopt;
}

std::uint32_t DiffRing::add_variable(std::string name) {
  if (find_variable(name) || base_.find_constant(name))
    throw Error("name '" + name + "' is already declared");
  vars_.push_back(std::move(name));
  return static_cast<std::uint32_t>(vars_.size() - 1);
}

std::uint32_t DiffRing::ensure_variable(std::string name) {
  if (auto k = find_variable(name)) return *k;
  return add_variable(std::move(name));
}

std::uint32_t DiffRing::variable_index(std::string_view name) const {
  if (auto k = find_variable(name)) return *k;
  throw Error("unknown variable '" + std::string(name) + "'");
}

DiffPoly DiffRing::var(std::uint32_t index, DerivOp op) const {
  if (index >= vars_.size()) throw Error("variable index out of range");
  return DiffPoly::variable(AlgInd{index, op});
}

DiffPoly DiffRing::var(std::string_view name, DerivOp op) const { return var(variable_index(name), op); }

DiffPoly DiffRing::constant(std::string_view name) const {
  auto c = base_.find_constant(name);
  if (!c) throw Error("unknown constant '" + std::string(name) + "'");
  return DiffPoly(base_.constant(*c));
}

std::string DiffRing::format(const AlgInd& v) const {
  std::string name = v.var < vars_.size() ? vars_[v.var] : "x#" + std::to_string(v.var);
  if (v.op.is_identity()) return name;
  std::string out;
  for (unsigned j = 0; j < kMaxDerivations; ++j) {
    if (v.op.e[j] == 0) continue;
    if (!out.empty()) out += '*';
    out += 'd' + std::to_string(j + 1);
    if (v.op.e[j] != 1) out += '^' + std::to_string(v.op.e[j]);
  }
  return out + '(' + name + ')';
}

std::string DiffRing::format(const DiffPoly& p) const {
  std::vector<std::pair<Rational, std::vector<std::string>>> terms;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    std::vector<std::string> diff_factors;
    for (const auto& [v, e] : it->first) {
      std::string s = format(v);
      if (e != 1) s += '^' + std::to_string(e);
      diff_factors.push_back(std::move(s));
    }
    const BaseElem& coef = it->second;
    for (auto ct = coef.terms().rbegin(); ct != coef.terms().rend(); ++ct) {
      std::vector<std::string> factors;
      for (const auto& [idx, e] : ct->first) {
        std::string s = base_.constant_names().at(idx);
        if (e != 1) s += '^' + std::to_string(e);
        factors.push_back(std::move(s));
      }
      factors.insert(factors.end(), diff_factors.begin(), diff_factors.end());
      terms.emplace_back(ct->second, std::move(factors));
    }
  }
  return format_terms(terms);
}

DiffPoly apply_delta(const DiffRing& ring, unsigned j, const DiffPoly& f) {
  if (j >= ring.num_derivations()) throw Error("derivation index out of range");
  return apply_derivation(
      f, [&](const BaseElem& c) { return apply_delta_base(ring.base(), j, c); },
      [&](const AlgInd& v) { return DiffPoly::variable(AlgInd{v.var, v.op + DerivOp::unit(j)}); });
}

DiffPoly apply_op(const DiffRing& ring, const DerivOp& op, const DiffPoly& f) {
  DiffPoly r = f;
  for (unsigned j = 0; j < kMaxDerivations; ++j)
    for (unsigned k = 0; k < op.e[j]; ++k) r = apply_delta(ring, j, r);
  return r;
}

bool is_base_element(const DiffPoly& f) { return f.max_variable() == nullptr; }

LeaderData leader_data(const DiffPoly& f) {
  if (is_base_element(f)) throw Error("base elements have no leader");
  const auto& top = f.terms().rbegin()->first.front();
  return LeaderData{top.first, top.first.order(), top.second};
}

std::optional<AlgInd> leader(const DiffPoly& f) {
  if (const AlgInd* v = f.max_variable()) return *v;
  return std::nullopt;
}

std::weak_ordering compare_rank(const DiffPoly& f, const DiffPoly& g) {
  const bool fb = is_base_element(f);
  const bool gb = is_base_element(g);
  if (fb || gb) {
    if (fb && gb) return std::weak_ordering::equivalent;
    return fb ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  const LeaderData a = leader_data(f);
  const LeaderData b = leader_data(g);
  if (a.leader < b.leader) return std::weak_ordering::less;
  if (b.leader < a.leader) return std::weak_ordering::greater;
  return a.degree <=> b.degree;
}

DiffPoly separant(const DiffPoly& f) { return f.partial(leader_data(f).leader); }

DiffPoly initial(const DiffPoly& f) {
  const LeaderData d = leader_data(f);
  return f.coefficient(d.leader, d.degree);
}

DiffPoly formal_partial(const DiffPoly& f, const AlgInd& v) { return f.partial(v); }

DiffPoly coeff_twist(const DiffRing& ring, const DiffPoly& f, unsigned derivation) {
  return f.map_coefficients([&](const BaseElem& c) { return apply_delta_base(ring.base(), derivation, c); });
}

DiffPoly coeff_twist_sigma(const DiffRing& ring, const DiffPoly& f) {
  if (!ring.base().has_sigma()) throw Error("no sigma table declared");
  return f.map_coefficients([&](const BaseElem& c) { return apply_sigma_base(ring.base(), c); });
}

DiffPoly substitute_variables(const DiffRing& ring, const DiffPoly& f,
                              const std::map<std::uint32_t, DiffPoly>& images) {
  std::map<AlgInd, DiffPoly> cache;
  return substitute<DiffPoly>(
      f, [](const BaseElem& c) { return DiffPoly(c); },
      [&](const AlgInd& v) -> DiffPoly {
        auto img = images.find(v.var);
        if (img == images.end()) return DiffPoly::variable(v);
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, apply_op(ring, v.op, img->second)).first;
        return it->second;
      });
}

DiffPoly rename_variables(const DiffPoly& f, const std::map<std::uint32_t, std::uint32_t>& rename) {
  DiffPoly out;
  for (const auto& [m, c] : f.terms()) {
    DiffPoly::Monomial mono;
    DiffPoly t = DiffPoly::term(c, {});
    for (const auto& [v, e] : m) {
      auto it = rename.find(v.var);
      AlgInd w = it == rename.end() ? v : AlgInd{it->second, v.op};
      t = t * DiffPoly::variable(w, e);
    }
    out += t;
  }
  return out;
}

unsigned max_order(const DiffPoly& f) {
  unsigned o = 0;
  for (const auto& v : f.variables()) o = std::max(o, v.order());
  return o;
}

bool uses_only(const DiffPoly& f, DerivMask mask) {
  for (const auto& v : f.variables())
    if (!v.op.within(mask)) return false;
  return true;
}

BaseElem evaluate_at(const DiffPoly& f, const std::map<std::uint32_t, Rational>& point) {
  return substitute<BaseElem>(
      f, [](const BaseElem& c) { return c; },
      [&](const AlgInd& v) -> BaseElem {
        if (!v.op.is_identity()) throw Error("cannot evaluate a derivative at a point");
        auto it = point.find(v.var);
        if (it == point.end()) throw Error("point does not assign every variable");
        return BaseElem(it->second);
      });
}

}  // namespace deltaforge
