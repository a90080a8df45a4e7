#include "doctest.h"

#include "deltaforge/prolong.hpp"
#include "deltaforge/syntax.hpp"

using namespace deltaforge;

TEST_CASE("partition") {
  Partition p = Partition::from_distinguished(3, {2, 0});
  CHECK(p.dist == std::vector<unsigned>{0, 2});
  CHECK(p.delta == 0b010);
  CHECK(p.describe() == "D = {d1, d3}, Delta = {d2}");
  CHECK_THROWS_AS(Partition::from_distinguished(2, {}), Error);
  CHECK_THROWS_AS(Partition::from_distinguished(2, {2}), Error);
  CHECK_THROWS_AS(Partition::from_distinguished(2, {1, 1}), Error);
}

TEST_CASE("d_op examples") {
  DiffRing r(BaseRing(2, {"c", "e"}, {{BaseElem(), BaseElem()}, {BaseElem::variable(1), BaseElem()}}), {"x"});
  UBlock u = ensure_u_block(r, 1, {0});
  CHECK(r.variables()[1] == "u2_x");
  const DerivMask delta = 0b01;
  CHECK(r.format(d_op(r, parse_poly(r, "d1(x)*x"), 1, delta, u)) == "d1(u2_x)*x + d1(x)*u2_x");
  CHECK(r.format(d_op(r, parse_poly(r, "c*x"), 1, delta, u)) == "c*u2_x + e*x");
  CHECK(r.format(d_op(r, parse_poly(r, "d1(x) - x"), 1, delta, u)) == "d1(u2_x) - u2_x");
  CHECK_THROWS_AS(d_op(r, parse_poly(r, "d2(x)"), 1, delta, u), Error);
  CHECK_THROWS_AS(d_op(r, parse_poly(r, "u2_x"), 1, delta, u), Error);
  CHECK_THROWS_AS(d_op(r, parse_poly(r, "x"), 0, delta, u), Error);
}

TEST_CASE("u-block collisions are rejected") {
  DiffRing r(BaseRing(1), {"x", "u1_x"});
  CHECK_THROWS_AS(ensure_u_block(r, 0, {0, 1}), Error);
}

TEST_CASE("prolongation equations") {
  DiffRing line(BaseRing(2), {"x"});
  ProlongedSystem free = prolongation_equations(line, {}, Partition::from_distinguished(2, {0, 1}), {0});
  CHECK(free.all().empty());
  CHECK(line.variables() == std::vector<std::string>{"x", "u1_x", "u2_x"});

  DiffRing r(BaseRing(2), {"x"});
  ProlongedSystem s = prolongation_equations(r, {parse_poly(r, "d1(x) - x")}, Partition::from_distinguished(2, {1}), {0});
  REQUIRE(s.equations.size() == 1);
  CHECK(r.format(s.equations[0][0]) == "d1(u2_x) - u2_x");
  CHECK(s.twist_free);

  DiffRing alg(BaseRing(1), {"x", "y"});
  ProlongedSystem t = prolongation_equations(alg, {parse_poly(alg, "y - x^2")}, Partition::from_distinguished(1, {0}),
                                             {0, 1});
  CHECK(alg.format(t.equations[0][0]) == "u1_y - 2*u1_x*x");

  DiffRing tw(BaseRing(1, {"c"}, {{BaseElem::variable(0)}}), {"x"});
  ProlongedSystem tt = prolongation_equations(tw, {parse_poly(tw, "c*x")}, Partition::from_distinguished(1, {0}), {0});
  CHECK_FALSE(tt.twist_free);
}

TEST_CASE("tau of maps composes") {
  DiffRing r(BaseRing(1), {"x", "y"});
  Partition p = Partition::from_distinguished(1, {0});
  UBlock ux = ensure_u_block(r, 0, {0});
  UBlock uy = ensure_u_block(r, 0, {1});
  auto tf = tau_of_map(r, {parse_poly(r, "x^2")}, p, {ux});
  auto tg = tau_of_map(r, {parse_poly(r, "y + 1")}, p, {uy});
  std::map<std::uint32_t, DiffPoly> images{{1, tf[0]}, {uy.at(1), tf[1]}};
  auto tgf = tau_of_map(r, {parse_poly(r, "x^2 + 1")}, p, {ux});
  CHECK(substitute_variables(r, tg[0], images) == tgf[0]);
  CHECK(substitute_variables(r, tg[1], images) == tgf[1]);
  CHECK(r.format(tgf[1]) == "2*u1_x*x");

  auto id = tau_of_map(r, {parse_poly(r, "x")}, p, {ux});
  CHECK(id[1] == r.var(ux.at(0)));

  DiffRing rc(BaseRing(1, {"c"}, {{BaseElem::variable(0)}}), {"x"});
  UBlock uc = ensure_u_block(rc, 0, {0});
  auto tc = tau_of_map(rc, {parse_poly(rc, "c*x")}, p, {uc});
  CHECK(rc.format(tc[1]) == "c*u1_x + c*x");
}

TEST_CASE("sharp systems and nabla") {
  DiffRing r(BaseRing(2), {"x"});
  Partition p = Partition::from_distinguished(2, {0, 1});
  auto sys = sharp_system(r, p, {0}, {{parse_poly(r, "x")}, {parse_poly(r, "x + 1")}});
  REQUIRE(sys.size() == 2);
  CHECK(r.format(sys[0]) == "d1(x) - x");
  CHECK(r.format(sys[1]) == "d2(x) - x - 1");
  CHECK(r.format(sharp_system(r, Partition::from_distinguished(1 + 1, {0}), {0}, {{DiffPoly()}})[0]) == "d1(x)");
  CHECK_THROWS_AS(sharp_system(r, p, {0}, {{parse_poly(r, "x")}}), Error);

  DiffRing q(BaseRing(2, {"c"}, {{BaseElem::variable(0)}, {BaseElem()}}), {"x"});
  Partition pd = Partition::from_distinguished(2, {0});
  UBlock u = ensure_u_block(q, 0, {0});
  DiffPoly f = parse_poly(q, "c*d2(x)^2 + x*d2(x)");
  CHECK(nabla_substitute(q, d_op(q, f, 0, pd.delta, u), pd, {u}) == apply_delta(q, 0, f));
}
