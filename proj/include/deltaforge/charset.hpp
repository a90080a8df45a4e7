#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deltaforge/reduction.hpp"

namespace deltaforge {

/// Three-valued outcome of a hypothesis check. A Fails verdict always carries
/// a witness that can be re-checked.
struct Verdict {
  enum class Kind { Holds, Fails, Unknown };

  Kind kind = Kind::Unknown;
  std::optional<DiffPoly> witness;
  std::string detail;  // witness description for Fails, reason for Unknown, note for Holds

  static Verdict holds(std::string note = {}) { return {Kind::Holds, std::nullopt, std::move(note)}; }
  static Verdict fails(std::optional<DiffPoly> witness, std::string description) {
    return {Kind::Fails, std::move(witness), std::move(description)};
  }
  static Verdict unknown(std::string reason) { return {Kind::Unknown, std::nullopt, std::move(reason)}; }

  bool is_holds() const { return kind == Kind::Holds; }
  bool is_fails() const { return kind == Kind::Fails; }
  bool is_unknown() const { return kind == Kind::Unknown; }
};

std::string to_string(Verdict::Kind k);

/// Fails if any input fails, else Unknown if any is unknown, else Holds.
Verdict combine(const std::vector<Verdict>& parts);

struct DeltaPair {
  std::size_t i;
  std::size_t j;
  DerivOp theta_i;
  DerivOp theta_j;
  AlgInd v;
};

/// Pairs of elements whose leaders (same variable) have a common derivative
/// over the active derivations; v is the least one.
std::vector<DeltaPair> delta_pairs(const AutoSet& lambda);

struct PairCheck {
  DeltaPair pair;
  DiffPoly delta;
  DiffPoly remainder;
  Verdict verdict;
};

struct CoherenceReport {
  std::vector<PairCheck> pairs;
  Verdict verdict;
};

CoherenceReport coherence_check(const DiffRing& ring, const AutoSet& lambda, const ReduceOptions& opts = {});

/// Exact square root in Q[constants][indeterminates], if one exists.
std::optional<DiffPoly> exact_sqrt(const DiffPoly& p);

enum class PrimalityStage { Linear, Quadratic, None };

std::string to_string(PrimalityStage s);

struct PrimalityReport {
  Verdict verdict;
  PrimalityStage stage = PrimalityStage::None;
  /// For a reducible quadratic f = A v^2 + B v + C: 4*A*f = factors[0] * factors[1].
  std::vector<DiffPoly> factors;
  std::optional<DiffPoly> discriminant;
};

PrimalityReport primality_check(const DiffRing& ring, const AutoSet& lambda);

Verdict no_reduced_element_check(const PrimalityReport& primality);

struct CharsetCertificate {
  AutoSet lambda;
  CoherenceReport coherence;
  PrimalityReport primality;
  Verdict no_reduced_element;
  Verdict overall;
};

CharsetCertificate is_charset_of_prime(const DiffRing& ring, const AutoSet& lambda, const ReduceOptions& opts = {});

enum class Membership { Member, Nonmember };

/// Requires cert.overall to hold; throws Error otherwise.
Membership ideal_membership(const DiffRing& ring, const DiffPoly& g, const CharsetCertificate& cert);

}  // namespace deltaforge
