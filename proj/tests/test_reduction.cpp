#include "doctest.h"

#include "deltaforge/reduction.hpp"
#include "deltaforge/syntax.hpp"

using namespace deltaforge;

namespace {

DiffRing ring2() { return DiffRing(BaseRing(2, {"c"}, {{BaseElem()}, {BaseElem()}}), {"x", "y"}); }

AutoSet autoset(const DiffRing& r, std::initializer_list<const char*> src) {
  std::vector<DiffPoly> fs;
  for (auto s : src) fs.push_back(parse_poly(r, s));
  return require_autoreduced(r, fs);
}

}  // namespace

TEST_CASE("is_reduced") {
  DiffRing r = ring2();
  CHECK(is_reduced(parse_poly(r, "d1*d2(x)"), parse_poly(r, "d2(x)")) == Reducedness::No);
  DiffPoly f = parse_poly(r, "d1(x)^2 - 4*x");
  CHECK(is_reduced(parse_poly(r, "x^2"), f) == Reducedness::Fully);
  CHECK(is_reduced(parse_poly(r, "d1(x)^3"), f) == Reducedness::PartiallyOnly);
  CHECK(is_reduced(parse_poly(r, "5"), f) == Reducedness::Fully);
  // derivatives outside the active mask do not count as proper derivatives
  CHECK(is_reduced(parse_poly(r, "d2*d1(x)"), f, 0b01) == Reducedness::Fully);
}

TEST_CASE("ritt_reduce basic examples") {
  DiffRing r = ring2();
  AutoSet l = autoset(r, {"d1(x) - x"});
  DiffPoly g = parse_poly(r, "d1^2(x)");
  ReductionCert c = ritt_reduce(r, g, l);
  CHECK(r.format(c.remainder) == "x");
  CHECK(c.sep_exp[0] == 1);
  CHECK(c.init_exp[0] == 1);
  CHECK(verify_certificate(r, g, l, c));

  AutoSet lc = autoset(r, {"d1(x) - c*x"});
  CHECK(ritt_reduce(r, parse_poly(r, "d1(x) - c*x"), lc).remainder.is_zero());

  ReductionCert base = ritt_reduce(r, parse_poly(r, "c + 2"), l);
  CHECK(r.format(base.remainder) == "c + 2");
  CHECK(base.combination.empty());
}

TEST_CASE("tie-breaking between leaders that divide the same derivative") {
  DiffRing r = ring2();
  AutoSet l = autoset(r, {"d1(x) - x", "d2(x) - x - 1"});
  DiffPoly g = parse_poly(r, "d2*d1(x) - d2(x)");
  ReductionCert low = ritt_reduce(r, g, l);
  CHECK(low.remainder.is_zero());
  CHECK(verify_certificate(r, g, l, low));
  ReductionCert high = ritt_reduce(r, g, l, {TieBreak::HighestIndex});
  CHECK(r.format(high.remainder) == "-1");
  CHECK(verify_certificate(r, g, l, high));
}

TEST_CASE("make_autoreduced") {
  DiffRing r = ring2();
  AutoSetResult ok = make_autoreduced(r, {parse_poly(r, "d2(x) - x - 1"), parse_poly(r, "d1(x) - x")});
  REQUIRE(ok.ok());
  CHECK(r.format((*ok.set)[0]) == "d1(x) - x");

  AutoSetResult bad = make_autoreduced(r, {parse_poly(r, "d1(x)"), parse_poly(r, "d1^2(x)")});
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.violation->reduced_index == 1);
  CHECK(bad.violation->status == Reducedness::No);

  AutoSetResult deg = make_autoreduced(r, {parse_poly(r, "x"), parse_poly(r, "x^2")});
  REQUIRE_FALSE(deg.ok());
  CHECK(deg.violation->status == Reducedness::PartiallyOnly);

  CHECK_THROWS_AS(make_autoreduced(r, {parse_poly(r, "c")}), Error);
  CHECK_THROWS_AS(make_autoreduced(r, {parse_poly(r, "x"), parse_poly(r, "2*x")}), Error);
}

TEST_CASE("compare_autosets") {
  DiffRing r = ring2();
  AutoSet a = autoset(r, {"x"});
  AutoSet b = autoset(r, {"d1(x)"});
  AutoSet ab = autoset(r, {"d1(x)", "d2(x)"});
  CHECK(compare_autosets(a, b) == std::weak_ordering::less);
  CHECK(compare_autosets(ab, b) == std::weak_ordering::less);
  CHECK(compare_autosets(b, ab) == std::weak_ordering::greater);
  CHECK(compare_autosets(ab, ab) == std::weak_ordering::equivalent);
}

TEST_CASE("higher degree leaders and idempotence") {
  DiffRing r = ring2();
  AutoSet l = autoset(r, {"x*d1(x)^2 - y", "d2(y) - x"});
  DiffPoly g = parse_poly(r, "d1^2*d2(x)*y + d1(x)^5 + d1*d2(y)^2");
  ReductionCert c = ritt_reduce(r, g, l);
  CHECK(verify_certificate(r, g, l, c));
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(is_reduced(c.remainder, l[i]) == Reducedness::Fully);
  CHECK(ritt_reduce(r, c.remainder, l).remainder == c.remainder);
}
