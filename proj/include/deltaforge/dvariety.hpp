#pragma once

#include <string>
#include <vector>

#include "deltaforge/charset.hpp"
#include "deltaforge/prolong.hpp"
#include "deltaforge/ratexpr.hpp"

namespace deltaforge {

/// Affine relative D-variety: generators of I(V), a partition and a section
/// s = (Id, s_1, ..., s_r) given by Delta-polynomial tuples in the x-block.
struct RelDVar {
  std::vector<DiffPoly> generators;
  Partition part;
  std::vector<std::uint32_t> xblock;
  std::vector<std::vector<DiffPoly>> section;  // section[i][k] for D_i and x_k
};

struct Residue {
  std::string label;  // which generator / pair / component
  DiffPoly value;     // reduced modulo the generators
};

struct DVarReport {
  Verdict verdict;
  std::vector<Residue> residues;  // every residue, zero or not
};

/// d_{D_i} f (x, s_i(x)) reduces to 0 modulo the generators for all f, i.
DVarReport section_valid(const DiffRing& ring, const RelDVar& v);

/// d_{D_i} s_j (x, s_i(x)) - d_{D_j} s_i (x, s_j(x)) reduces to 0 for i < j.
DVarReport integrability_check(const DiffRing& ring, const RelDVar& v);

using BaseMatrix = Matrix<BaseElem>;

/// D_i A_j - D_j A_i - [A_i, A_j] = 0 for all i < j.
Verdict linear_integrability(const DiffRing& ring, const Partition& part, const std::vector<BaseMatrix>& a);

struct GroupFactor {
  enum class Kind { Ga, Gm, GL };
  Kind kind = Kind::Ga;
  unsigned n = 1;

  std::size_t dim() const { return kind == Kind::GL ? n * n : 1; }
  std::string name() const;
};

using Tuple = std::vector<RatExpr>;

/// Finite product of catalog groups acting on coordinate tuples. The group
/// laws are defined over the rationals.
class GroupExpr {
 public:
  GroupExpr() = default;
  explicit GroupExpr(std::vector<GroupFactor> factors);

  const std::vector<GroupFactor>& factors() const { return factors_; }
  std::size_t dim() const;
  std::string describe() const;

  Tuple identity() const;
  Tuple mul(const Tuple& g, const Tuple& h) const;
  Tuple inverse(const Tuple& g) const;
  /// d(lambda^g)_h v: derivative of y -> g*y at h, applied to v.
  Tuple d_left(const Tuple& g, const Tuple& h, const Tuple& v) const;
  /// d(rho^h)_g u: derivative of x -> x*h at g, applied to u.
  Tuple d_right(const Tuple& g, const Tuple& h, const Tuple& u) const;
  /// d(lambda^{g^-1} o rho^{g^-1})_g w.
  Tuple d_conj(const Tuple& g, const Tuple& w) const;

 private:
  std::vector<GroupFactor> factors_;
};

/// Point of tau G: base coordinates and one tangent block per D_i.
struct TauPoint {
  Tuple base;
  std::vector<Tuple> u;

  Tuple flatten() const;
};

TauPoint tau_identity(const GroupExpr& g, const Partition& part);
TauPoint tau_mul(const GroupExpr& g, const TauPoint& a, const TauPoint& b);
TauPoint tau_inverse(const DiffRing& ring, const GroupExpr& g, const Partition& part, const TauPoint& a);
/// (g, D_1 g, ..., D_r g).
TauPoint nabla_point(const DiffRing& ring, const Partition& part, const Tuple& g);
/// (g, s_1(g), ..., s_r(g)) with s given over `coords`.
TauPoint section_point(const DiffRing& ring, const std::vector<std::uint32_t>& coords,
                       const std::vector<std::vector<DiffPoly>>& s, const Tuple& g);

Tuple coordinate_tuple(const DiffRing& ring, const std::vector<std::uint32_t>& coords);

/// A group with coordinates and a section into its relative prolongation.
struct GroupSection {
  GroupExpr group;
  std::vector<std::uint32_t> coords;
  Partition part;
  std::vector<std::vector<DiffPoly>> s;  // s[i] over coords
};

void validate(const DiffRing& ring, const GroupSection& gs);

/// l_s(g) = nabla(g) * s(g)^{-1} at the generic point.
TauPoint log_derivative(const DiffRing& ring, const GroupSection& gs);

/// l_s(gh) = l_s(g) * (u l_s(h) u^{-1}) with u = s(g), on two generic blocks.
/// The ring is extended with a fresh coordinate block for h.
Verdict crossed_hom_check(DiffRing ring, const GroupSection& gs);

/// Substituting D_i g = s_i(g) into l_s(g) gives the identity of tau G.
Verdict kernel_law_check(const DiffRing& ring, const GroupSection& gs);

/// Integrability of the section on the group's generic chart.
DVarReport group_integrability(const DiffRing& ring, const GroupSection& gs);

bool equal_tuples(const Tuple& a, const Tuple& b);

}  // namespace deltaforge
