#include "doctest.h"

#include "deltaforge/diffpoly.hpp"

using namespace deltaforge;

namespace {

DiffRing plain_ring(unsigned m, std::vector<std::string> vars = {"x"}) {
  return DiffRing(BaseRing(m), std::move(vars));
}

DerivOp op(std::initializer_list<std::uint16_t> e) {
  DerivOp o;
  std::size_t k = 0;
  for (auto v : e) o.e[k++] = v;
  return o;
}

}  // namespace

TEST_CASE("canonical ranking") {
  AlgInd x{0, {}};
  AlgInd d1x{0, op({1})};
  AlgInd d2x{0, op({0, 1})};
  AlgInd d22x{0, op({0, 2})};
  AlgInd y{1, {}};
  CHECK(x < y);
  CHECK(y < d1x);
  CHECK(d1x < d2x);
  CHECK(d2x < AlgInd{1, op({1})});
  CHECK(AlgInd{1, op({0, 1})} < d22x);
  CHECK(AlgInd{0, op({1, 1})} < d22x);
  CHECK_FALSE(d22x < d22x);
}

TEST_CASE("apply_delta") {
  DiffRing r = plain_ring(2);
  DiffPoly x = r.var("x");
  DiffPoly d1x = r.var("x", op({1}));
  DiffPoly d2x = r.var("x", op({0, 1}));
  DiffPoly d12x = r.var("x", op({1, 1}));
  CHECK(apply_delta(r, 0, x) == d1x);
  CHECK(apply_delta(r, 0, x * d2x) == d1x * d2x + x * d12x);

  DiffRing rc(BaseRing(2, {"c"}, {{BaseElem::variable(0)}, {BaseElem::variable(0)}}), {"x"});
  DiffPoly f = rc.var("x", op({0, 1})).pow(2) + rc.constant("c");
  DiffPoly expect = lift(2) * rc.var("x", op({0, 1})) * rc.var("x", op({0, 2})) + rc.constant("c");
  CHECK(apply_delta(rc, 1, f) == expect);
  CHECK(rc.format(apply_delta(rc, 1, f)) == "2*d2^2(x)*d2(x) + c");
}

TEST_CASE("leader, separant, initial") {
  DiffRing r = plain_ring(2);
  DiffPoly f = r.var("x", op({0, 2})) - r.var("x", op({1}));
  LeaderData d = leader_data(f);
  CHECK(d.leader == AlgInd{0, op({0, 2})});
  CHECK(d.order == 2);
  CHECK(d.degree == 1);

  DiffPoly g = r.var("x", op({1})).pow(2) - lift(4) * r.var("x");
  CHECK(leader_data(g).degree == 2);
  CHECK(separant(g) == lift(2) * r.var("x", op({1})));
  CHECK(initial(g) == lift(1));

  DiffPoly h = r.var("x") * r.var("x", op({0, 1})) - lift(1);
  CHECK(separant(h) == r.var("x"));
  CHECK(initial(h) == r.var("x"));

  DiffPoly gr = r.var("x", op({2}));
  CHECK(leader_data(gr).order == 2);

  CHECK_THROWS_AS(leader_data(lift(3)), Error);
  CHECK(compare_rank(lift(3), g) == std::weak_ordering::less);
  CHECK(compare_rank(g, f) == std::weak_ordering::less);
}

TEST_CASE("coefficient twists") {
  BaseRing base(1, {"c", "d"}, {{BaseElem::variable(0) * BaseElem::variable(0), BaseElem()}});
  DiffRing r(base, {"x"});
  DiffPoly f = r.constant("c") * r.var("x", op({1}));
  CHECK(r.format(coeff_twist(r, f, 0)) == "c^2*d1(x)");
  CHECK(coeff_twist(r, r.var("x").pow(3) + lift(2), 0).is_zero());

  BaseRing base2(1, {"c", "d"}, {{BaseElem(Rational(1)), BaseElem()}});
  DiffRing r2(base2, {"x"});
  DiffPoly a = r2.constant("c") * r2.var("x");
  DiffPoly b = r2.constant("d") * r2.var("x");
  CHECK(coeff_twist(r2, a * b, 0) == coeff_twist(r2, a, 0) * b + a * coeff_twist(r2, b, 0));
  CHECK(r2.format(coeff_twist(r2, a * b, 0)) == "d*x^2");
}

TEST_CASE("formal partials") {
  DiffRing r = plain_ring(2);
  DiffPoly d1x = r.var("x", op({1}));
  DiffPoly d2x = r.var("x", op({0, 1}));
  CHECK(formal_partial(d1x * d2x, AlgInd{0, op({1})}) == d2x);
  CHECK(formal_partial(r.var("x").pow(3), AlgInd{0, {}}) == lift(3) * r.var("x").pow(2));
  CHECK(formal_partial(r.var("x", op({0, 2})), AlgInd{0, op({1})}).is_zero());
}

TEST_CASE("substitution and evaluation") {
  DiffRing r = plain_ring(1, {"x", "y"});
  DiffPoly f = r.var("x", op({1})) * r.var("y");
  DiffPoly g = substitute_variables(r, f, {{0, r.var("y").pow(2)}});
  CHECK(g == lift(2) * r.var("y").pow(2) * r.var("y", op({1})));
  CHECK(rename_variables(r.var("x", op({1})), {{0, 1}}) == r.var("y", op({1})));
  BaseElem v = evaluate_at(r.var("x") * r.var("y") + lift(1), {{0, Rational(2)}, {1, Rational(3)}});
  CHECK(v == BaseElem(Rational(7)));
  CHECK_THROWS_AS(evaluate_at(r.var("x", op({1})), {{0, Rational(1)}}), Error);
}

TEST_CASE("ring bookkeeping") {
  DiffRing r = plain_ring(2);
  CHECK(r.format(r.var("x", op({2, 1}))) == "d1^2*d2(x)");
  CHECK_THROWS_AS(r.add_variable("x"), Error);
  CHECK(r.ensure_variable("u2_x") == 1);
  CHECK_THROWS_AS(r.var("z"), Error);
  CHECK(max_order(r.var("x", op({2, 1})) + r.var("x")) == 3);
  CHECK(uses_only(r.var("x", op({2})), 0b01));
  CHECK_FALSE(uses_only(r.var("x", op({0, 1})), 0b01));
}
