#include "deltaforge/prolong.hpp"

#include <algorithm>

namespace deltaforge {

Partition Partition::from_distinguished(unsigned m, std::vector<unsigned> distinguished) {
  if (distinguished.empty()) throw Error("at least one distinguished derivation is required");
  std::sort(distinguished.begin(), distinguished.end());
  for (std::size_t k = 0; k < distinguished.size(); ++k) {
    if (distinguished[k] >= m) throw Error("derivation d" + std::to_string(distinguished[k] + 1) + " is not declared");
    if (k && distinguished[k] == distinguished[k - 1])
      throw Error("derivation d" + std::to_string(distinguished[k] + 1) + " listed twice");
  }
  Partition p;
  p.m = m;
  p.delta = all_derivations(m);
  for (unsigned d : distinguished) p.delta &= ~(1u << d);
  p.dist = std::move(distinguished);
  return p;
}

std::string Partition::describe() const {
  auto list = [](const std::vector<unsigned>& v) {
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", d" : "d") + std::to_string(v[k] + 1);
    return s + "}";
  };
  std::vector<unsigned> d;
  for (unsigned j = 0; j < m; ++j)
    if (mask_has(delta, j)) d.push_back(j);
  return "D = " + list(dist) + ", Delta = " + list(d);
}

std::string u_name(unsigned d, std::string_view x) { return "u" + std::to_string(d + 1) + "_" + std::string(x); }

UBlock ensure_u_block(DiffRing& ring, unsigned d, const std::vector<std::uint32_t>& xblock) {
  UBlock block;
  for (std::uint32_t x : xblock) {
    const std::string name = u_name(d, ring.variables().at(x));
    for (std::uint32_t y : xblock)
      if (ring.variables()[y] == name) throw Error("u-block name '" + name + "' collides with an x-block variable");
    block[x] = ring.ensure_variable(name);
  }
  return block;
}

DiffPoly tangent_form(const DiffPoly& f, DerivMask delta, const UBlock& u) {
  DiffPoly out;
  for (const AlgInd& v : f.variables()) {
    if (!v.op.within(delta)) throw Error("polynomial involves a derivative outside Delta");
    auto it = u.find(v.var);
    if (it == u.end()) throw Error("polynomial involves an indeterminate outside the x-block");
    out += f.partial(v) * DiffPoly::variable(AlgInd{it->second, v.op});
  }
  return out;
}

DiffPoly d_op(const DiffRing& ring, const DiffPoly& f, unsigned d, DerivMask delta, const UBlock& u) {
  if (mask_has(delta, d)) throw Error("d_op needs a distinguished derivation");
  return tangent_form(f, delta, u) + coeff_twist(ring, f, d);
}

std::vector<DiffPoly> ProlongedSystem::all() const {
  std::vector<DiffPoly> out = generators;
  for (const auto& eqs : equations) out.insert(out.end(), eqs.begin(), eqs.end());
  return out;
}

ProlongedSystem prolongation_equations(DiffRing& ring, const std::vector<DiffPoly>& gens, const Partition& part,
                                       const std::vector<std::uint32_t>& xblock) {
  ProlongedSystem sys;
  sys.generators = gens;
  sys.part = part;
  for (unsigned d : part.dist) sys.blocks.push_back(ensure_u_block(ring, d, xblock));
  for (std::size_t i = 0; i < part.dist.size(); ++i) {
    std::vector<DiffPoly> eqs;
    for (const auto& f : gens) {
      if (!coeff_twist(ring, f, part.dist[i]).is_zero()) sys.twist_free = false;
      eqs.push_back(d_op(ring, f, part.dist[i], part.delta, sys.blocks[i]));
    }
    sys.equations.push_back(std::move(eqs));
  }
  return sys;
}

std::vector<DiffPoly> tau_of_map(const DiffRing& ring, const std::vector<DiffPoly>& f, const Partition& part,
                                 const std::vector<UBlock>& blocks) {
  if (blocks.size() != part.dist.size()) throw Error("one u-block per distinguished derivation is required");
  std::vector<DiffPoly> out = f;
  for (std::size_t i = 0; i < part.dist.size(); ++i)
    for (const auto& fk : f) out.push_back(d_op(ring, fk, part.dist[i], part.delta, blocks[i]));
  return out;
}

std::vector<DiffPoly> sharp_system(const DiffRing& ring, const Partition& part,
                                   const std::vector<std::uint32_t>& xblock,
                                   const std::vector<std::vector<DiffPoly>>& s) {
  if (s.size() != part.dist.size()) throw Error("section needs one tuple per distinguished derivation");
  std::vector<DiffPoly> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].size() != xblock.size())
      throw Error("section tuple " + std::to_string(i + 1) + " has arity " + std::to_string(s[i].size()) +
                  ", expected " + std::to_string(xblock.size()));
    for (std::size_t k = 0; k < xblock.size(); ++k)
      out.push_back(ring.var(xblock[k], DerivOp::unit(part.dist[i])) - s[i][k]);
  }
  return out;
}

DiffPoly nabla_substitute(const DiffRing& ring, const DiffPoly& p, const Partition& part,
                          const std::vector<UBlock>& blocks) {
  std::map<std::uint32_t, DiffPoly> images;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (const auto& [x, u] : blocks[i]) images[u] = ring.var(x, DerivOp::unit(part.dist.at(i)));
  return substitute_variables(ring, p, images);
}

DiffPoly substitute_section(const DiffRing& ring, const DiffPoly& p, const UBlock& block,
                            const std::vector<std::uint32_t>& xblock, const std::vector<DiffPoly>& s_i) {
  if (s_i.size() != xblock.size()) throw Error("section arity does not match the x-block");
  std::map<std::uint32_t, DiffPoly> images;
  for (std::size_t k = 0; k < xblock.size(); ++k) images[block.at(xblock[k])] = s_i[k];
  return substitute_variables(ring, p, images);
}

}  // namespace deltaforge
