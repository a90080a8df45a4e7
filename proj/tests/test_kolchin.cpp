#include "doctest.h"

#include "deltaforge/kolchin.hpp"
#include "deltaforge/syntax.hpp"

using namespace deltaforge;

namespace {

// Brute force over the lattice, independent of the library's counting code.
long brute_count(unsigned m, const std::vector<Exponents>& leaders, unsigned h) {
  long count = 0;
  std::vector<unsigned> e(m, 0);
  while (true) {
    unsigned total = 0;
    for (auto v : e) total += v;
    if (total <= h) {
      bool free = true;
      for (const auto& l : leaders) {
        bool above = true;
        for (unsigned j = 0; j < m; ++j) above = above && e[j] >= l[j];
        free = free && !above;
      }
      count += free;
    }
    unsigned k = 0;
    while (k < m && ++e[k] > h) e[k++] = 0;
    if (k == m) break;
  }
  return count;
}

CharsetCertificate certify(const DiffRing& r, std::initializer_list<const char*> src) {
  std::vector<DiffPoly> fs;
  for (const char* s : src) fs.push_back(parse_poly(r, s));
  return is_charset_of_prime(r, require_autoreduced(r, fs));
}

}  // namespace

TEST_CASE("free derivative counts") {
  CHECK(free_derivative_count({2, {{}}}, 3) == 10);
  CHECK(free_derivative_count({2, {{{0, 2}}}}, 4) == 9);
  CHECK(free_derivative_count({2, {{{2, 0}, {1, 2}}}}, 5) == 8);
  for (unsigned h = 0; h <= 8; ++h) {
    LeaderTable t{3, {{{2, 0, 1}, {0, 1, 1}, {1, 3, 0}}, {}}};
    CHECK(count_by_enumeration(t, h) == count_by_inclusion_exclusion(t, h));
    CHECK(count_by_enumeration(t, h) ==
          brute_count(3, t.per_var[0], h) + brute_count(3, {}, h));
  }
  CHECK_THROWS_AS(count_by_enumeration({2, {{{1, 0}, {2, 0}}}}, 3), Error);
}

TEST_CASE("heat equation") {
  DiffRing r(BaseRing(2), {"x"});
  CharsetCertificate cert = certify(r, {"d2^2(x) - d1(x)"});
  REQUIRE(cert.overall.is_holds());
  NumPolynomial w = kolchin_polynomial(r, cert);
  CHECK(w.format() == "2*C(h+1,1) - 1");
  for (unsigned h = 2; h <= 8; ++h) CHECK(w(h) == brute_count(2, {{0, 2}}, h));
  TypeDim td = type_dim(w);
  CHECK(td.tau == 1);
  CHECK(td.d == 2);
}

TEST_CASE("trivial and free polynomials") {
  DiffRing r(BaseRing(2), {"x"});
  NumPolynomial zero = kolchin_polynomial(r, certify(r, {"x"}));
  CHECK(zero.is_zero());
  CHECK(zero.format() == "0");
  CHECK(type_dim(zero).tau == 0);
  CHECK(type_dim(zero).d == 0);

  NumPolynomial free = kolchin_polynomial(r, certify(r, {}));
  CHECK(free.format() == "C(h+2,2)");
  CHECK(type_dim(free).tau == 2);
  CHECK(type_dim(free).d == 1);

  NumPolynomial five{{5, 0}, 0};
  CHECK(type_dim(five).tau == 0);
  CHECK(type_dim(five).d == 5);
  CHECK_THROWS_AS(kolchin_polynomial(r, certify(r, {"x^2 - 1"})), Error);
}

TEST_CASE("generic type of d2^k x = d1 x") {
  for (unsigned k = 1; k <= 4; ++k) {
    DiffRing r(BaseRing(2), {"x"});
    const std::string src = "d2^" + std::to_string(k) + "(x) - d1(x)";
    CharsetCertificate cert = is_charset_of_prime(r, require_autoreduced(r, {parse_poly(r, src)}));
    REQUIRE(cert.overall.is_holds());
    TypeDim td = type_dim(kolchin_polynomial(r, cert));
    CAPTURE(k);
    CHECK(td.tau == 1);
    CHECK(td.d == k);
  }
}

TEST_CASE("monotonicity under added leaders") {
  LeaderTable a{2, {{{0, 3}}}};
  LeaderTable b{2, {{{0, 3}, {2, 1}}}};
  NumPolynomial wa = kolchin_from_leaders(a), wb = kolchin_from_leaders(b);
  for (unsigned h = std::max(wa.h0, wb.h0); h < 20; ++h) CHECK(wb(h) <= wa(h));
}

TEST_CASE("ordinals") {
  OrdinalCNF a = OrdinalCNF::parse("w^2*3 + w + 4");
  CHECK(a.format() == "w^2*3 + w + 4");
  CHECK(OrdinalCNF::parse("w + 1 + w") == OrdinalCNF::parse("w*2"));
  CHECK(natural_sum(OrdinalCNF::parse("w + 1"), OrdinalCNF::parse("w")).format() == "w*2 + 1");
  CHECK(OrdinalCNF::parse("w + 2") < OrdinalCNF::parse("w*2"));
  CHECK(OrdinalCNF::parse("w^2") > OrdinalCNF::parse("w*100 + 7"));
  CHECK(OrdinalCNF::parse("0").is_zero());
  CHECK_THROWS_AS(OrdinalCNF::parse("w^"), Error);
  CHECK_THROWS_AS(OrdinalCNF::parse("w x"), Error);
}

TEST_CASE("rank bounds") {
  CHECK(u_rank_bounds(0, 3).upper.format() == "4");
  RankBounds g = u_rank_bounds(1, 1, std::vector<unsigned>{1, 2});
  CHECK(g.upper.format() == "w*2");
  REQUIRE(g.lower.has_value());
  CHECK(g.lower->format() == "w + 2");
  CHECK(*g.lower < g.upper);
  RankBounds u = u_rank_bounds(2, 1);
  CHECK(u.upper.format() == "w^2*2");
  CHECK(OrdinalCNF::from_terms({{2, 1}}) < u.upper);
}

TEST_CASE("G_r family") {
  FamilyReport a = gr_family({1, 2});
  CHECK(a.td.tau == 1);
  CHECK(a.td.d == 1);
  CHECK(a.claim_holds);
  CHECK(a.charset.is_holds());
  CHECK(a.bounds.lower->format() == "w + 2");
  CHECK(a.bounds.upper.format() == "w*2");

  FamilyReport b = gr_family({0, 3});
  CHECK(b.td.tau == 0);
  CHECK(b.td.d == 3);
  CHECK(b.claim_holds);

  for (unsigned m = 1; m <= 3; ++m) {
    std::vector<unsigned> r(m, 0);
    while (true) {
      FamilyReport rep = gr_family(r);
      CAPTURE(m);
      CAPTURE(rep.omega.format());
      CHECK(rep.claim_holds);
      CHECK(*rep.bounds.lower < rep.bounds.upper);
      unsigned k = 0;
      while (k < m && ++r[k] > 3) r[k++] = 0;
      if (k == m) break;
    }
  }
}

TEST_CASE("type_dim family") {
  FamilyReport u = type_dim_family(3, 1, 2);
  CHECK(u.td.tau == 1);
  CHECK(u.td.d == 2);
  CHECK(u.claim_holds);
  CHECK(u.known_u->format() == "w*2");
  CHECK(*u.known_u < u.bounds.upper);
  CHECK_THROWS_AS(type_dim_family(2, 2, 1), Error);
}
