#include "deltaforge/base_ring.hpp"

#include <sstream>

namespace deltaforge {

BaseRing::BaseRing(unsigned m) : m_(m), deriv_(m) {
  if (m > kMaxDerivations) throw Error("at most 8 derivations are supported");
}

BaseRing::BaseRing(unsigned m, std::vector<std::string> names,
                   std::vector<std::vector<BaseElem>> deriv,
                   std::optional<std::vector<BaseElem>> sigma)
    : m_(m), names_(std::move(names)), deriv_(std::move(deriv)), sigma_(std::move(sigma)) {
  if (m_ > kMaxDerivations) throw Error("at most 8 derivations are supported");
  if (deriv_.size() != m_) throw Error("derivation table must have one row per derivation");
  for (unsigned j = 0; j < m_; ++j) {
    if (deriv_[j].size() != names_.size())
      throw Error("derivation table for d" + std::to_string(j + 1) + " is not total");
    for (const auto& p : deriv_[j]) validate(p, "derivation");
  }
  if (sigma_) {
    if (sigma_->size() != names_.size()) throw Error("sigma table is not total");
    for (const auto& p : *sigma_) validate(p, "sigma");
  }
}

void BaseRing::set_sigma(std::vector<BaseElem> sigma) {
  if (sigma.size() != names_.size()) throw Error("sigma table is not total");
  for (const auto& p : sigma) validate(p, "sigma");
  sigma_ = std::move(sigma);
}

void BaseRing::validate(const BaseElem& p, std::string_view table) const {
  for (const auto& [mono, c] : p.terms())
    for (const auto& [idx, e] : mono)
      if (idx >= names_.size())
        throw Error(std::string(table) + " table references undeclared constant #" +
                    std::to_string(idx));
}

std::optional<ConstIndex> BaseRing::find_constant(std::string_view name) const {
  for (std::size_t k = 0; k < names_.size(); ++k)
    if (names_[k] == name) return static_cast<ConstIndex>(k);
  return std::nullopt;
}

const BaseElem& BaseRing::sigma_of(ConstIndex c) const {
  if (!sigma_) throw Error("no sigma table declared");
  return sigma_->at(c);
}

std::string format_terms(const std::vector<std::pair<Rational, std::vector<std::string>>>& terms) {
  if (terms.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [coef, factors] : terms) {
    const bool negative = sgn(coef) < 0;
    if (first)
      out << (negative ? "-" : "");
    else
      out << (negative ? " - " : " + ");
    first = false;
    const Rational mag = abs(coef);
    bool need_star = false;
    if (mag != 1 || factors.empty()) {
      out << mag.get_str();
      need_star = true;
    }
    for (const auto& f : factors) {
      if (need_star) out << '*';
      out << f;
      need_star = true;
    }
  }
  return out.str();
}

std::string BaseRing::format(const BaseElem& p) const {
  std::vector<std::pair<Rational, std::vector<std::string>>> terms;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    std::vector<std::string> factors;
    for (const auto& [idx, e] : it->first) {
      std::string name = idx < names_.size() ? names_[idx] : "c#" + std::to_string(idx);
      if (e != 1) name += "^" + std::to_string(e);
      factors.push_back(std::move(name));
    }
    terms.emplace_back(it->second, std::move(factors));
  }
  return format_terms(terms);
}

bool is_rational(const BaseElem& p) { return p.is_constant(); }

BaseElem apply_delta_base(const BaseRing& ring, unsigned j, const BaseElem& p) {
  if (j >= ring.num_derivations()) throw Error("derivation index out of range");
  return apply_derivation(
      p, [](const Rational&) { return Rational(0); },
      [&](ConstIndex c) { return ring.derivative_of(j, c); });
}

BaseElem apply_sigma_base(const BaseRing& ring, const BaseElem& p) {
  if (!ring.has_sigma()) throw Error("no sigma table declared");
  return substitute<BaseElem>(
      p, [](const Rational& c) { return BaseElem(c); },
      [&](ConstIndex c) { return ring.sigma_of(c); });
}

RingCheck verify_ring(const BaseRing& ring) {
  RingCheck check;
  const unsigned m = ring.num_derivations();
  for (ConstIndex c = 0; c < ring.num_constants(); ++c) {
    const std::string& name = ring.constant_names()[c];
    for (unsigned i = 0; i < m; ++i) {
      for (unsigned j = i + 1; j < m; ++j) {
        BaseElem ji = apply_delta_base(ring, j, ring.derivative_of(i, c));
        BaseElem ij = apply_delta_base(ring, i, ring.derivative_of(j, c));
        if (ji != ij) {
          std::string msg = "d" + std::to_string(j + 1) + "d" + std::to_string(i + 1) + "(" + name +
                            ") = " + ring.format(ji) + " but d" + std::to_string(i + 1) + "d" +
                            std::to_string(j + 1) + "(" + name + ") = " + ring.format(ij) +
                            " at pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
          check.violations.push_back(
              {RingViolation::Kind::Commutation, c, i, j, std::move(ji), std::move(ij), std::move(msg)});
        }
      }
    }
    if (ring.has_sigma()) {
      for (unsigned j = 0; j < m; ++j) {
        BaseElem sd = apply_sigma_base(ring, ring.derivative_of(j, c));
        BaseElem ds = apply_delta_base(ring, j, ring.sigma_of(c));
        if (sd != ds) {
          std::string msg = "sigma(d" + std::to_string(j + 1) + "(" + name + ")) = " + ring.format(sd) +
                            " but d" + std::to_string(j + 1) + "(sigma(" + name + ")) = " + ring.format(ds);
          check.violations.push_back(
              {RingViolation::Kind::SigmaCommutation, c, j, j, std::move(sd), std::move(ds), std::move(msg)});
        }
      }
    }
  }
  return check;
}

}  // namespace deltaforge
