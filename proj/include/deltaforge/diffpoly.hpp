#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltaforge/base_ring.hpp"

namespace deltaforge {

/// Bitmask over derivation indices (bit j set <=> delta_{j+1} is included).
using DerivMask = std::uint32_t;

inline DerivMask all_derivations(unsigned m) { return m >= 32 ? ~0u : ((1u << m) - 1u); }
inline bool mask_has(DerivMask mask, unsigned j) { return (mask >> j) & 1u; }

/// Derivative operator delta_1^{e_1} ... delta_m^{e_m}; element of the
/// commutative monoid of derivative operators.
struct DerivOp {
  std::array<std::uint16_t, kMaxDerivations> e{};

  static DerivOp unit(unsigned j, std::uint16_t power = 1) {
    DerivOp op;
    op.e.at(j) = power;
    return op;
  }

  unsigned order() const {
    unsigned s = 0;
    for (auto x : e) s += x;
    return s;
  }
  bool is_identity() const { return order() == 0; }

  /// Componentwise <=: `*this` divides `other` in the monoid.
  bool divides(const DerivOp& other) const {
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] > other.e[k]) return false;
    return true;
  }
  /// Only derivations in `mask` occur.
  bool within(DerivMask mask) const {
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] != 0 && !mask_has(mask, static_cast<unsigned>(k))) return false;
    return true;
  }

  friend DerivOp operator+(DerivOp a, const DerivOp& b) {
    for (std::size_t k = 0; k < a.e.size(); ++k) a.e[k] = static_cast<std::uint16_t>(a.e[k] + b.e[k]);
    return a;
  }
  /// Requires b.divides(a).
  friend DerivOp operator-(DerivOp a, const DerivOp& b) {
    for (std::size_t k = 0; k < a.e.size(); ++k) a.e[k] = static_cast<std::uint16_t>(a.e[k] - b.e[k]);
    return a;
  }
  static DerivOp join(const DerivOp& a, const DerivOp& b) {
    DerivOp r;
    for (std::size_t k = 0; k < r.e.size(); ++k) r.e[k] = std::max(a.e[k], b.e[k]);
    return r;
  }

  friend bool operator==(const DerivOp&, const DerivOp&) = default;
};

/// Algebraic indeterminate theta x_i. Ordered by the canonical (orderly)
/// ranking: (order, i, e_m, ..., e_1) lexicographically.
struct AlgInd {
  std::uint32_t var = 0;
  DerivOp op;

  unsigned order() const { return op.order(); }

  friend bool operator==(const AlgInd&, const AlgInd&) = default;
  friend bool operator<(const AlgInd& a, const AlgInd& b) {
    const unsigned oa = a.order();
    const unsigned ob = b.order();
    if (oa != ob) return oa < ob;
    if (a.var != b.var) return a.var < b.var;
    for (std::size_t k = a.op.e.size(); k-- > 0;)
      if (a.op.e[k] != b.op.e[k]) return a.op.e[k] < b.op.e[k];
    return false;
  }

  /// `this` is a derivative of `other` (same variable, other.op divides op).
  bool is_derivative_of(const AlgInd& other) const {
    return var == other.var && other.op.divides(op);
  }
};

using DiffPoly = SparsePoly<AlgInd, BaseElem>;

/// Differential polynomial ring: a base ring together with named differential
/// indeterminates. Variables may be appended (fresh prolongation blocks); the
/// index of a variable never changes once assigned.
class DiffRing {
 public:
  DiffRing() = default;
  explicit DiffRing(BaseRing base, std::vector<std::string> vars = {});

  const BaseRing& base() const { return base_; }
  BaseRing& mutable_base() { return base_; }
  unsigned num_derivations() const { return base_.num_derivations(); }
  const std::vector<std::string>& variables() const { return vars_; }
  std::optional<std::uint32_t> find_variable(std::string_view name) const;
  std::uint32_t add_variable(std::string name);
  std::uint32_t ensure_variable(std::string name);
  std::uint32_t variable_index(std::string_view name) const;

  DiffPoly var(std::uint32_t index, DerivOp op = {}) const;
  DiffPoly var(std::string_view name, DerivOp op = {}) const;
  DiffPoly constant(std::string_view name) const;

  std::string format(const AlgInd& v) const;
  std::string format(const DiffPoly& p) const;

 private:
  BaseRing base_;
  std::vector<std::string> vars_;
};

inline DiffPoly lift(const BaseElem& c) { return DiffPoly(c); }
inline DiffPoly lift(const Rational& q) { return DiffPoly(BaseElem(q)); }
inline DiffPoly lift(long q) { return DiffPoly(BaseElem(Rational(q))); }

/// delta_j f (0-based j), acting on coefficients through the base table.
DiffPoly apply_delta(const DiffRing& ring, unsigned j, const DiffPoly& f);
/// theta f for a derivative operator theta.
DiffPoly apply_op(const DiffRing& ring, const DerivOp& op, const DiffPoly& f);

bool is_base_element(const DiffPoly& f);

struct LeaderData {
  AlgInd leader;
  unsigned order;
  unsigned degree;
};

/// Throws Error for base elements.
LeaderData leader_data(const DiffPoly& f);
std::optional<AlgInd> leader(const DiffPoly& f);

/// Rank comparison; base elements rank below everything else and tie with
/// each other.
std::weak_ordering compare_rank(const DiffPoly& f, const DiffPoly& g);

DiffPoly separant(const DiffPoly& f);
DiffPoly initial(const DiffPoly& f);

DiffPoly formal_partial(const DiffPoly& f, const AlgInd& v);

/// f^D: apply the derivation D (0-based index) to the coefficients only.
DiffPoly coeff_twist(const DiffRing& ring, const DiffPoly& f, unsigned derivation);
/// f^sigma: apply the endomorphism to the coefficients only.
DiffPoly coeff_twist_sigma(const DiffRing& ring, const DiffPoly& f);

/// Replaces every theta x_k with theta(images[k]) for k in `images`; other
/// indeterminates are kept.
DiffPoly substitute_variables(const DiffRing& ring, const DiffPoly& f,
                              const std::map<std::uint32_t, DiffPoly>& images);

/// Renames variables (theta x_k -> theta y_{rename[k]}).
DiffPoly rename_variables(const DiffPoly& f, const std::map<std::uint32_t, std::uint32_t>& rename);

/// Highest derivative order occurring (0 for base elements).
unsigned max_order(const DiffPoly& f);

/// True if every derivative operator in f only involves derivations in mask.
bool uses_only(const DiffPoly& f, DerivMask mask);

/// Evaluates every coefficient under `rational point` substitution of
/// order-zero indeterminates; derivatives must be absent.
BaseElem evaluate_at(const DiffPoly& f, const std::map<std::uint32_t, Rational>& point);

}  // namespace deltaforge
