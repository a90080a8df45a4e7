#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "deltaforge/diffpoly.hpp"

namespace deltaforge {

enum class Reducedness { Fully, PartiallyOnly, No };

std::string to_string(Reducedness r);

/// Reducedness of g with respect to f; proper derivatives are taken over the
/// derivations in `mask`.
Reducedness is_reduced(const DiffPoly& g, const DiffPoly& f, DerivMask mask = ~0u);

/// Raised when a computation exceeds its step budget.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Autoreduced set sorted by increasing rank, with cached leader data.
class AutoSet {
 public:
  AutoSet() = default;

  const std::vector<DiffPoly>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const DiffPoly& operator[](std::size_t i) const { return elems_[i]; }
  const LeaderData& leader(std::size_t i) const { return leaders_[i]; }
  const DiffPoly& separant(std::size_t i) const { return seps_[i]; }
  const DiffPoly& initial(std::size_t i) const { return inits_[i]; }
  DerivMask mask() const { return mask_; }

  /// Product of all initials and separants.
  DiffPoly h_product() const;

 private:
  friend struct AutoSetBuilder;
  std::vector<DiffPoly> elems_;
  std::vector<LeaderData> leaders_;
  std::vector<DiffPoly> seps_;
  std::vector<DiffPoly> inits_;
  DerivMask mask_ = ~0u;
};

struct AutoViolation {
  std::size_t reduced_index;  // element that fails to be reduced (sorted order)
  std::size_t by_index;       // element it is tested against
  Reducedness status;
  std::string message;
};

struct AutoSetResult {
  std::optional<AutoSet> set;
  std::optional<AutoViolation> violation;
  bool ok() const { return set.has_value(); }
};

/// Sorts by rank and checks pairwise reducedness; never repairs. Throws Error
/// on base elements or duplicate ranks.
AutoSetResult make_autoreduced(const DiffRing& ring, std::vector<DiffPoly> fs, DerivMask mask = ~0u);

/// Like make_autoreduced but throws Error on a violation.
AutoSet require_autoreduced(const DiffRing& ring, std::vector<DiffPoly> fs, DerivMask mask = ~0u);

/// Ranking on autoreduced sets; a longer set agreeing on the common prefix is
/// lower.
std::weak_ordering compare_autosets(const AutoSet& a, const AutoSet& b);

enum class TieBreak { LowestIndex, HighestIndex };

struct ReduceOptions {
  TieBreak tie = TieBreak::LowestIndex;
  std::size_t max_steps = 200000;
};

struct CombinationTerm {
  DiffPoly quotient;
  DerivOp theta;
  std::size_t index;
};

/// (prod S_i^{sep_exp[i]} I_i^{init_exp[i]}) * g = sum quotient * theta f_index + remainder.
struct ReductionCert {
  DiffPoly remainder;
  std::vector<unsigned> sep_exp;
  std::vector<unsigned> init_exp;
  std::vector<CombinationTerm> combination;
};

ReductionCert ritt_reduce(const DiffRing& ring, const DiffPoly& g, const AutoSet& lambda,
                          const ReduceOptions& opts = {});

/// Expands both sides of the certificate identity and compares them.
bool verify_certificate(const DiffRing& ring, const DiffPoly& g, const AutoSet& lambda,
                        const ReductionCert& cert);

}  // namespace deltaforge
