#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deltaforge/error.hpp"
#include "deltaforge/sparse_poly.hpp"

namespace deltaforge {

inline constexpr unsigned kMaxDerivations = 8;

using ConstIndex = std::uint32_t;

/// Element of the coefficient ring: a polynomial in the named constants with
/// rational coefficients.
using BaseElem = SparsePoly<ConstIndex, Rational>;

/// Finitely presented coefficient ring Q[c_1..c_k] with m commuting
/// derivations and an optional endomorphism, each given by its values on the
/// constants.
class BaseRing {
 public:
  BaseRing() = default;
  /// A ring with no constants (coefficients in Q).
  explicit BaseRing(unsigned m);
  /// `deriv[j][c]` is delta_j(c); `sigma[c]` is sigma(c). Throws if a table is
  /// not total or mentions a constant index out of range.
  BaseRing(unsigned m, std::vector<std::string> names, std::vector<std::vector<BaseElem>> deriv,
           std::optional<std::vector<BaseElem>> sigma = std::nullopt);

  unsigned num_derivations() const { return m_; }
  std::size_t num_constants() const { return names_.size(); }
  const std::vector<std::string>& constant_names() const { return names_; }
  std::optional<ConstIndex> find_constant(std::string_view name) const;

  const BaseElem& derivative_of(unsigned j, ConstIndex c) const { return deriv_.at(j).at(c); }
  bool has_sigma() const { return sigma_.has_value(); }
  const BaseElem& sigma_of(ConstIndex c) const;

  BaseElem constant(ConstIndex c) const { return BaseElem::variable(c); }

  std::string format(const BaseElem& p) const;

  /// Replaces the endomorphism table (validated like the constructor).
  void set_sigma(std::vector<BaseElem> sigma);

 private:
  void validate(const BaseElem& p, std::string_view table) const;

  unsigned m_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<BaseElem>> deriv_;
  std::optional<std::vector<BaseElem>> sigma_;
};

BaseElem apply_delta_base(const BaseRing& ring, unsigned j, const BaseElem& p);
/// Throws Error when the ring has no endomorphism table.
BaseElem apply_sigma_base(const BaseRing& ring, const BaseElem& p);

struct RingViolation {
  enum class Kind { Commutation, SigmaCommutation };
  Kind kind;
  ConstIndex constant;
  unsigned i;  // derivation indices (0-based); for SigmaCommutation only i is used
  unsigned j;
  BaseElem lhs;
  BaseElem rhs;
  std::string message;
};

struct RingCheck {
  std::vector<RingViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks delta_j delta_i c = delta_i delta_j c and sigma delta_j c = delta_j sigma c
/// on every constant.
RingCheck verify_ring(const BaseRing& ring);

/// Rendering helper shared by the printers: `terms` are (coefficient,
/// factor strings) pairs listed from highest to lowest.
std::string format_terms(const std::vector<std::pair<Rational, std::vector<std::string>>>& terms);

bool is_rational(const BaseElem& p);

}  // namespace deltaforge
