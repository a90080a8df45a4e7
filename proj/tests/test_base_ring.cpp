#include "doctest.h"

#include "deltaforge/base_ring.hpp"

using namespace deltaforge;

namespace {

BaseElem c_(ConstIndex k) { return BaseElem::variable(k); }
BaseElem q_(long n, long d = 1) { return BaseElem(Rational(n, d)); }

}  // namespace

TEST_CASE("verify_ring accepts symmetric tables") {
  // a1, a2 with d1(a2) = d2(a1) = b and b killed by both derivations.
  BaseRing r(2, {"a1", "a2", "b"},
             {{q_(0), c_(2), q_(0)}, {c_(2), q_(0), q_(0)}});
  CHECK(verify_ring(r).ok());

  BaseRing s(2, {"c"}, {{c_(0)}, {c_(0)}});
  CHECK(verify_ring(s).ok());
}

TEST_CASE("verify_ring reports a non-commuting pair") {
  BaseRing r(2, {"c"}, {{c_(0)}, {c_(0) + q_(1)}});
  RingCheck check = verify_ring(r);
  REQUIRE(check.violations.size() == 1);
  const auto& v = check.violations.front();
  CHECK(v.i == 0);
  CHECK(v.j == 1);
  CHECK(r.format(v.lhs) == "c + 1");
  CHECK(r.format(v.rhs) == "c");
  CHECK(v.message.find("(1,2)") != std::string::npos);
}

TEST_CASE("tables must be total and closed") {
  CHECK_THROWS_AS(BaseRing(1, {"c"}, {{}}), Error);
  CHECK_THROWS_AS(BaseRing(1, {"c"}, {{c_(3)}}), Error);
  CHECK_THROWS_AS(BaseRing(1, {"c"}, {{c_(0)}}, std::vector<BaseElem>{}), Error);
}

TEST_CASE("apply_delta_base follows Leibniz") {
  BaseRing r(1, {"c", "d"}, {{c_(1), q_(0)}});
  CHECK(apply_delta_base(r, 0, q_(3, 4)).is_zero());
  CHECK(apply_delta_base(r, 0, c_(0) * c_(1)) == c_(1) * c_(1));

  BaseRing s(1, {"c"}, {{c_(0)}});
  CHECK(apply_delta_base(s, 0, c_(0) * c_(0)) == q_(2) * c_(0) * c_(0));
  CHECK_THROWS_AS(apply_delta_base(s, 1, c_(0)), Error);
}

TEST_CASE("apply_sigma_base is a homomorphism") {
  BaseRing r(1, {"c"}, {{q_(0)}}, std::vector<BaseElem>{c_(0) * c_(0)});
  CHECK(apply_sigma_base(r, q_(5)) == q_(5));
  CHECK(apply_sigma_base(r, c_(0) + q_(1)) == c_(0) * c_(0) + q_(1));

  BaseRing swap(1, {"c", "d"}, {{q_(0), q_(0)}}, std::vector<BaseElem>{c_(1), c_(0)});
  CHECK(apply_sigma_base(swap, c_(0) * c_(1)) == c_(1) * c_(0));

  BaseRing plain(1, {"c"}, {{q_(0)}});
  CHECK_THROWS_AS(apply_sigma_base(plain, c_(0)), Error);
}

TEST_CASE("verify_ring checks sigma against the derivations") {
  BaseRing good(1, {"t"}, {{q_(1)}}, std::vector<BaseElem>{c_(0) + q_(1)});
  CHECK(verify_ring(good).ok());
  BaseRing bad(1, {"t"}, {{c_(0)}}, std::vector<BaseElem>{c_(0) + q_(1)});
  CHECK_FALSE(verify_ring(bad).ok());
}

TEST_CASE("format") {
  BaseRing r(1, {"a", "b"}, {{q_(0), q_(0)}});
  CHECK(r.format(q_(3, 4) * c_(0) * c_(1) * c_(1)) == "3/4*b^2*a");
  CHECK(r.format(BaseElem()) == "0");
  CHECK(r.format(-c_(0)) == "-a");
}
