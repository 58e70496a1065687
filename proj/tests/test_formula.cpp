#include "doctest.h"
#include "support.hpp"

using namespace dtl;

TEST_CASE("atoms and primitive connectives parse to themselves") {
  CHECK(parse("p") == Formula::var("p"));
  CHECK(parse("!p") == Formula::neg(Formula::var("p")));
  CHECK(parse("p & q") == Formula::conj(Formula::var("p"), Formula::var("q")));
  CHECK(parse("[]p") == Formula::box(Formula::var("p")));
  CHECK(parse("Xp") == Formula::next(Formula::var("p")));
  CHECK(parse("*p") == Formula::henceforth(Formula::var("p")));
}

TEST_CASE("sugar is expanded into primitives") {
  const auto p = Formula::var("p"), q = Formula::var("q");
  CHECK(parse("<>p") == Formula::neg(Formula::box(Formula::neg(p))));
  CHECK(parse("p | q") == Formula::neg(Formula::conj(Formula::neg(p), Formula::neg(q))));
  CHECK(parse("p -> q") == Formula::neg(Formula::conj(p, Formula::neg(q))));
  CHECK(parse("p <-> q") == Formula::conj(parse("p -> q"), parse("q -> p")));

  const auto phi = parse("*[]p -> []*p");
  const auto lhs = Formula::henceforth(Formula::box(p));
  const auto rhs = Formula::box(Formula::henceforth(p));
  CHECK(phi == Formula::neg(Formula::conj(lhs, Formula::neg(rhs))));
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("p & q | r") == parse("(p & q) | r"));
  CHECK(parse("p -> q -> r") == parse("p -> (q -> r)"));
  CHECK(parse("!p & q") == parse("(!p) & q"));
  CHECK(parse("[]p & q") == parse("([]p) & q"));
}

TEST_CASE("unicode operators match ASCII") {
  CHECK(parse("\xE2\x88\x97\xE2\x96\xA1p \xE2\x86\x92 \xE2\x96\xA1\xE2\x88\x97p") == parse("*[]p -> []*p"));
  CHECK(parse("\xC2\xAC\xE2\x97\x8Bp \xE2\x88\xA8 \xE2\x97\x87q") == parse("!Xp | <>q"));
}

TEST_CASE("to_string round-trips") {
  support::Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto f = support::random_formula(rng, {"p", "q", "r1"}, 5);
    CHECK(parse(f.to_string()) == f);
  }
}

TEST_CASE("parse errors carry an offset and expectations") {
  try {
    (void)parse("p & ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(!e.expected().empty());
  }
  CHECK_THROWS_AS(parse("(p"), ParseError);
  CHECK_THROWS_AS(parse("p q"), ParseError);
  CHECK_THROWS_AS(parse("P"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("negate identifies double negation") {
  const auto p = parse("p");
  CHECK(negate(p) == parse("!p"));
  CHECK(negate(parse("!p")) == p);
}

TEST_CASE("variables are collected and sorted") {
  const auto vs = variables(parse("X(q & *p) | []r"));
  CHECK(std::vector<std::string>(vs.begin(), vs.end()) == std::vector<std::string>{"p", "q", "r"});
}

TEST_CASE("structural equality and ordering are consistent") {
  support::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = support::random_formula(rng, {"p", "q"}, 3);
    const auto b = support::random_formula(rng, {"p", "q"}, 3);
    CHECK((a == b) == ((a <=> b) == 0));
    if (a == b) CHECK(a.hash() == b.hash());
  }
}
