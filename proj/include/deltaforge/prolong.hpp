#pragma once

#include <map>
#include <string>
#include <vector>

#include "deltaforge/diffpoly.hpp"

namespace deltaforge {

/// Split of the m derivations into retained ones (Delta) and distinguished
/// ones (D_1..D_r).
struct Partition {
  unsigned m = 0;
  DerivMask delta = 0;
  std::vector<unsigned> dist;  // 0-based, increasing

  /// Delta is the complement of `distinguished`. Throws on out-of-range or
  /// repeated indices, or when nothing is distinguished.
  static Partition from_distinguished(unsigned m, std::vector<unsigned> distinguished);

  std::size_t r() const { return dist.size(); }
  /// e.g. "D = {d2}, Delta = {d1}"
  std::string describe() const;
};

/// Fresh indeterminate name for the D-block over x: "u<D>_<x>" (D 1-based).
std::string u_name(unsigned d, std::string_view x);

/// Maps x-block variable indices to the matching u-block indices.
using UBlock = std::map<std::uint32_t, std::uint32_t>;

/// Declares (or reuses) the u-block for D over `xblock`. Throws if a u-name
/// coincides with an x-block name.
UBlock ensure_u_block(DiffRing& ring, unsigned d, const std::vector<std::uint32_t>& xblock);

/// d_Delta f_x u = sum over theta x_i of df/d(theta x_i) * theta u_i.
DiffPoly tangent_form(const DiffPoly& f, DerivMask delta, const UBlock& u);

/// d_{D/Delta} f = tangent_form + f^D. Throws if f mentions a derivative
/// outside Delta or an indeterminate outside the x-block.
DiffPoly d_op(const DiffRing& ring, const DiffPoly& f, unsigned d, DerivMask delta, const UBlock& u);

struct ProlongedSystem {
  std::vector<DiffPoly> generators;
  Partition part;
  std::vector<UBlock> blocks;                     // one per distinguished derivation
  std::vector<std::vector<DiffPoly>> equations;   // equations[i][k] = d_{D_i} generators[k]
  bool twist_free = true;                         // every f^D vanished

  std::vector<DiffPoly> all() const;
};

ProlongedSystem prolongation_equations(DiffRing& ring, const std::vector<DiffPoly>& gens, const Partition& part,
                                       const std::vector<std::uint32_t>& xblock);

/// (f, d_{D_1} f, ..., d_{D_r} f) for a tuple f of Delta-polynomials.
std::vector<DiffPoly> tau_of_map(const DiffRing& ring, const std::vector<DiffPoly>& f, const Partition& part,
                                 const std::vector<UBlock>& blocks);

/// {D_i x_k - s[i][k]}.
std::vector<DiffPoly> sharp_system(const DiffRing& ring, const Partition& part,
                                   const std::vector<std::uint32_t>& xblock,
                                   const std::vector<std::vector<DiffPoly>>& s);

/// Replaces every theta u_{i,k} by theta D_i x_k.
DiffPoly nabla_substitute(const DiffRing& ring, const DiffPoly& p, const Partition& part,
                          const std::vector<UBlock>& blocks);

/// Replaces the u-block of D_i by the tuple s_i (extended to Delta-derivatives).
DiffPoly substitute_section(const DiffRing& ring, const DiffPoly& p, const UBlock& block,
                            const std::vector<std::uint32_t>& xblock, const std::vector<DiffPoly>& s_i);

}  // namespace deltaforge
