#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltaforge/charset.hpp"

namespace deltaforge {

using Integer = mpz_class;
using Exponents = std::vector<unsigned>;  // one entry per active derivation

/// Leader exponent vectors grouped by variable. Each group must be an
/// antichain under the componentwise order.
struct LeaderTable {
  unsigned m = 0;
  std::vector<std::vector<Exponents>> per_var;
};

/// Lattice points e with |e| <= h below no leader, counted one by one.
Integer count_by_enumeration(const LeaderTable& t, unsigned h);
/// Same count as an alternating sum of binomials over leader joins.
Integer count_by_inclusion_exclusion(const LeaderTable& t, unsigned h);
/// Inclusion-exclusion, cross-checked by enumeration when that is cheap.
Integer free_derivative_count(const LeaderTable& t, unsigned h);

/// omega(h) = sum_i d[i] * C(h + i, i), valid for h >= h0.
struct NumPolynomial {
  std::vector<Integer> d;
  unsigned h0 = 0;

  bool is_zero() const;
  Integer operator()(unsigned h) const;
  /// `2*C(h+1,1) - 1`; `0` for the zero polynomial.
  std::string format() const;
};

/// Exact binomial-basis coefficients from m+1 values past the threshold,
/// compared with enumeration up to h0 + m.
NumPolynomial kolchin_from_leaders(const LeaderTable& t);

/// Leaders of a verified characteristic set, over its active derivations.
/// Every variable of the ring is counted. Throws unless cert.overall holds.
LeaderTable leader_table(const DiffRing& ring, const CharsetCertificate& cert);
NumPolynomial kolchin_polynomial(const DiffRing& ring, const CharsetCertificate& cert);

struct TypeDim {
  unsigned tau = 0;
  Integer d = 0;
};

TypeDim type_dim(const NumPolynomial& w);

/// Ordinal below omega^omega in Cantor normal form.
class OrdinalCNF {
 public:
  using Term = std::pair<unsigned, std::uint64_t>;  // omega^exponent * coefficient

  OrdinalCNF() = default;
  /// Natural (Hessenberg) combination of arbitrary terms.
  static OrdinalCNF from_terms(std::vector<Term> terms);
  static OrdinalCNF finite(std::uint64_t n) { return from_terms({{0, n}}); }
  /// `w^2*3 + w + 4`, `0`; `+` is the ordinary sum.
  static OrdinalCNF parse(std::string_view text);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend OrdinalCNF operator+(const OrdinalCNF& a, const OrdinalCNF& b);
  friend OrdinalCNF natural_sum(const OrdinalCNF& a, const OrdinalCNF& b);
  friend std::strong_ordering operator<=>(const OrdinalCNF& a, const OrdinalCNF& b);
  friend bool operator==(const OrdinalCNF& a, const OrdinalCNF& b) { return a.terms_ == b.terms_; }

  std::string format() const;

 private:
  std::vector<Term> terms_;  // exponents strictly decreasing, coefficients positive
};

struct RankBounds {
  OrdinalCNF upper;  // strict
  std::optional<OrdinalCNF> lower;
};

/// Upper bound omega^tau * (d + 1); for a G_r family member the lower bound
/// sum omega^(m-i) r_i.
RankBounds u_rank_bounds(unsigned tau, const Integer& d, const std::optional<std::vector<unsigned>>& gr = {});

struct FamilyReport {
  DiffRing ring;
  std::vector<DiffPoly> system;  // minimal defining set
  Verdict charset;
  NumPolynomial omega;
  TypeDim td;
  std::optional<TypeDim> claimed;
  bool claim_holds = false;
  RankBounds bounds;
  std::optional<OrdinalCNF> known_u;
};

/// delta_1^{r_1+1} x, delta_2^{r_2+1} delta_1^{r_1} x, ..., delta_m^{r_m} ... delta_1^{r_1} x.
FamilyReport gr_family(const std::vector<unsigned>& r);

/// delta_j x = 0 for j < m - i and delta_{m-i}^n x = 0: Delta-type i, Delta-dim n.
FamilyReport type_dim_family(unsigned m, unsigned i, unsigned n);

}  // namespace deltaforge
