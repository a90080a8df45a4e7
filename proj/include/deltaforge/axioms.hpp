#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deltaforge/charset.hpp"
#include "deltaforge/dvariety.hpp"
#include "deltaforge/prolong.hpp"

namespace deltaforge {

struct MemberCheck {
  std::string label;
  DiffPoly poly;
  DiffPoly remainder;  // modulo Gamma; zero means member
};

/// Hypothesis report for one geometric axiom instance. `condition` is only
/// set when every hypothesis holds.
struct AxiomInstance {
  std::string kind;  // "dcf" or "dcfa"
  std::vector<DiffPoly> lambda;
  std::vector<DiffPoly> gamma;
  Verdict lambda_charset;
  Verdict gamma_charset;
  Verdict containment;
  std::vector<MemberCheck> members;
  std::optional<std::string> condition;
  std::vector<std::string> unchecked;
  Verdict overall;
};

/// Lambda over the x-block, Gamma over the x- and u-blocks for the single
/// distinguished derivation of `part`. Checks f and d_{D/Delta} f modulo Gamma.
AxiomInstance dcf_instance(const DiffRing& ring, const std::vector<DiffPoly>& lambda,
                           const std::vector<DiffPoly>& gamma, const Partition& part,
                           const std::vector<std::uint32_t>& xblock, const UBlock& u,
                           const ReduceOptions& opts = {});

/// Lambda over x, Gamma over (x, y). Checks f and f^sigma (moved onto y)
/// modulo Gamma. Every derivation is active.
AxiomInstance dcfa_instance(const DiffRing& ring, const std::vector<DiffPoly>& lambda,
                            const std::vector<DiffPoly>& gamma, const std::vector<std::uint32_t>& xblock,
                            const std::vector<std::uint32_t>& yblock, const ReduceOptions& opts = {});

struct DSMSystem {
  std::vector<BaseMatrix> a;  // one per derivation
  BaseMatrix b;
  BaseMatrix b_inv;
};

struct IdentityCheck {
  std::string label;
  Verdict verdict;
};

/// Throws Error on size mismatch, a missing sigma table, or B * B^-1 != I.
std::vector<IdentityCheck> dsm_identities(const DiffRing& ring, const DSMSystem& s);

struct JetSystem {
  std::vector<std::vector<unsigned>> alphas;  // multi-indices, 1 <= |alpha| <= r
  std::vector<std::string> unknowns;
  std::vector<std::vector<BaseElem>> rows;  // one row per generator

  std::string format_row(const BaseRing& base, std::size_t i) const;
};

/// sum_alpha (partial^alpha f)(a) u_alpha = 0 for every generator f. Throws
/// Error when a generator has derivatives or does not vanish at a.
JetSystem jet_equations(const DiffRing& ring, const std::vector<DiffPoly>& gens,
                        const std::vector<std::uint32_t>& xblock, const std::vector<Rational>& a, unsigned r);

}  // namespace deltaforge
