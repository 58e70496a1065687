#include <algorithm>
#include <set>

#include "doctest.h"
#include "dtl/frame_enum.hpp"
#include "support.hpp"

using namespace dtl;
using support::type_of_members;

namespace {

TypedFrame make_frame(const ClosurePtr& c, std::vector<PhiType> types, std::vector<Row> R) {
  TypedFrame f;
  f.closure = c;
  f.types = std::move(types);
  f.R = std::move(R);
  return f;
}

bool has_clause(const ValidationReport& r, std::size_t world, const std::string& clause) {
  return std::any_of(r.begin(), r.end(),
                     [&](const ValidationIssue& i) { return i.world == world && i.clause == clause; });
}

}  // namespace

TEST_CASE("validate_typed_frame") {
  const auto c = Closure::of(parse("[]p"));
  const auto pb = type_of_members(c, {"p", "[]p"});
  const auto p_nb = type_of_members(c, {"p", "![]p"});
  const auto np = type_of_members(c, {"!p", "![]p"});

  CHECK(validate_typed_frame(make_frame(c, {pb}, {bit(0)}), c).empty());

  // u R v, p at u, ¬p at v, □p claimed at u.
  const auto bad = validate_typed_frame(make_frame(c, {pb, np}, {bit(0) | bit(1), bit(1)}), c);
  CHECK(has_clause(bad, 0, "box"));

  CHECK(validate_typed_frame(make_frame(c, {p_nb, np}, {bit(0) | bit(1), bit(1)}), c).empty());
  CHECK(has_clause(validate_typed_frame(make_frame(c, {pb}, {0}), c), 0, "reflexive"));
  CHECK(validate_typed_frame(make_frame(c, {pb}, {bit(0)}), Closure::of(parse("[]p"))).empty());
  const auto other = Closure::of(parse("[]p & q"));
  CHECK_THROWS_AS(validate_typed_frame(make_frame(c, {pb}, {bit(0)}), other), std::invalid_argument);
}

TEST_CASE("three-world frame restricted to u, v satisfies the box condition") {
  const auto c = Closure::of(parse("*[]p -> []*p"));
  const auto tu = type_of_members(c, {"p", "[]p", "*[]p", "*p", "![]*p"});
  const auto tv = type_of_members(c, {"p", "[]p", "!*[]p", "!*p", "![]*p"});
  const auto f = make_frame(c, {tu, tv}, {bit(0) | bit(1), bit(1)});
  CHECK(validate_typed_frame(f, c).empty());
  CHECK(box_condition_holds(f));
}

TEST_CASE("norm measures") {
  const auto c = Closure::of(parse("p"));
  const auto p = type_of_members(c, {"p"});
  const auto np = type_of_members(c, {"!p"});
  auto single = singleton_frame(p);
  CHECK(single.measures().hgt == 1);
  CHECK(single.measures().wdt == 1);
  CHECK(single.measures().dpt == 1);
  CHECK(single.norm() == 1);

  auto chain = LocalFrame::make(make_frame(c, {p, np}, {bit(0) | bit(1), bit(1)}), 0);
  CHECK(chain.measures().hgt == 2);
  CHECK(chain.measures().wdt == 1);
  CHECK(chain.measures().dpt == 1);
  CHECK(chain.norm() == 2);

  auto cluster = LocalFrame::make(make_frame(c, {p, np}, {bit(0) | bit(1), bit(0) | bit(1)}), 0);
  CHECK(cluster.measures().hgt == 1);
  CHECK(cluster.measures().dpt == 2);
  CHECK(cluster.norm() == 2);

  // Root with two leaf children: width 2.
  auto fork = LocalFrame::make(make_frame(c, {p, np, p}, {bit(0) | bit(1) | bit(2), bit(1), bit(2)}), 0);
  CHECK(fork.measures().wdt == 2);
  CHECK(fork.measures().hgt == 2);
}

TEST_CASE("LocalFrame::make rejects non-local frames") {
  const auto c = Closure::of(parse("p"));
  const auto p = type_of_members(c, {"p"});
  CHECK_THROWS_AS(LocalFrame::make(make_frame(c, {p, p}, {bit(0), bit(1)}), 0), std::invalid_argument);
  CHECK_THROWS_AS(LocalFrame::make(make_frame(c, {p, p}, {bit(0) | bit(1), bit(1)}), 1), std::invalid_argument);
  // Two roots below one top: not a tree.
  CHECK_THROWS_AS(LocalFrame::make(make_frame(c, {p, p, p, p},
                                              {bit(0) | bit(1) | bit(2) | bit(3), bit(1) | bit(3),
                                               bit(2) | bit(3), bit(3)}),
                                   0),
                  std::invalid_argument);
}

TEST_CASE("subframes") {
  const auto c = Closure::of(parse("p"));
  const auto p = type_of_members(c, {"p"});
  const auto np = type_of_members(c, {"!p"});
  auto chain = LocalFrame::make(make_frame(c, {p, np}, {bit(0) | bit(1), bit(1)}), 0);
  CHECK(sim(subframe(chain, chain.root()), chain));
  CHECK(subframe(chain, 1).canonical_key() == singleton_frame(np).canonical_key());
  CHECK(preceq(chain, chain));
  CHECK(preceq(singleton_frame(np), chain));
  CHECK_FALSE(preceq(chain, singleton_frame(np)));
  CHECK(subframe_representatives(singleton_frame(p)).empty());
  const auto reps = subframe_representatives(chain);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].canonical_key() == singleton_frame(np).canonical_key());

  // Three-world frame at u: the subframe at v is a singleton.
  const auto f1 = Closure::of(parse("*[]p -> []*p"));
  const auto tu = type_of_members(f1, {"p", "[]p", "*[]p", "*p", "![]*p"});
  const auto tv = type_of_members(f1, {"p", "[]p", "!*[]p", "!*p", "![]*p"});
  auto fu = LocalFrame::make(make_frame(f1, {tu, tv}, {bit(0) | bit(1), bit(1)}), 0);
  CHECK(subframe(fu, 1).size() == 1);
}

TEST_CASE("prec1 on a three-cluster chain") {
  const auto c = Closure::of(parse("p & q"));
  const auto a = type_of_members(c, {"p", "q"});
  const auto b = type_of_members(c, {"p", "!q"});
  const auto d = type_of_members(c, {"!p", "q"});
  auto chain = LocalFrame::make(make_frame(c, {a, b, d}, {bit(0) | bit(1) | bit(2), bit(1) | bit(2), bit(2)}), 0);
  const auto at1 = subframe(chain, 1);
  const auto at2 = subframe(chain, 2);
  CHECK(prec1(at1, chain));
  CHECK(prec1(at2, at1));
  CHECK_FALSE(prec1(at2, chain));
  CHECK(preceq(at2, chain));
}

TEST_CASE("two inequivalent children give two representatives") {
  const auto c = Closure::of(parse("p & q"));
  const auto a = type_of_members(c, {"p", "q"});
  const auto b = type_of_members(c, {"p", "!q"});
  const auto d = type_of_members(c, {"!p", "q"});
  auto fork = LocalFrame::make(make_frame(c, {a, b, d}, {bit(0) | bit(1) | bit(2), bit(1), bit(2)}), 0);
  CHECK(subframe_representatives(fork).size() == 2);
  CHECK(subframe_classes(fork).size() == 2);
  // Same child twice: one class.
  auto twin = LocalFrame::make(make_frame(c, {a, b, b}, {bit(0) | bit(1) | bit(2), bit(1), bit(2)}), 0);
  CHECK(subframe_classes(twin).size() == 1);
}

TEST_CASE("canonical keys identify isomorphic frames") {
  const auto c = Closure::of(parse("p & q"));
  const auto a = type_of_members(c, {"p", "q"});
  const auto b = type_of_members(c, {"p", "!q"});
  const auto d = type_of_members(c, {"!p", "q"});
  auto f1 = LocalFrame::make(make_frame(c, {a, b, d}, {bit(0) | bit(1) | bit(2), bit(1), bit(2)}), 0);
  auto f2 = LocalFrame::make(make_frame(c, {d, a, b}, {bit(0), bit(0) | bit(1) | bit(2), bit(2)}), 1);
  CHECK(f1.canonical_key() == f2.canonical_key());
  CHECK(embeds(f1, f2));
  CHECK(embeds(f2, f1));
}

TEST_CASE("embedding examples") {
  const auto c = Closure::of(parse("p"));
  const auto p = type_of_members(c, {"p"});
  const auto np = type_of_members(c, {"!p"});
  auto chain = LocalFrame::make(make_frame(c, {p, np}, {bit(0) | bit(1), bit(1)}), 0);
  auto cluster = LocalFrame::make(make_frame(c, {p, np}, {bit(0) | bit(1), bit(0) | bit(1)}), 0);
  const auto id = embeds(chain, chain);
  REQUIRE(id);
  CHECK(*id == std::vector<std::size_t>{0, 1});
  CHECK(embeds(singleton_frame(p), chain));
  CHECK_FALSE(embeds(chain, cluster));
  CHECK_FALSE(embeds(cluster, chain));
  CHECK_FALSE(embeds(singleton_frame(np), chain));
}

TEST_CASE("embeds agrees with brute force on random frames") {
  support::Rng rng(21);
  const auto c = Closure::of(parse("[]p & Xq"));
  const auto pool = enumerate_types(c);
  const std::vector<PhiType> few(pool.begin(), pool.begin() + 3);
  int positive = 0;
  for (int i = 0; i < 300; ++i) {
    const auto b = support::random_loose_frame(rng, few, 1 + support::pick(rng, 5));
    LocalFrame a = b;
    if (support::coin(rng)) {
      Row keep = bit(b.root());
      for (std::size_t w = 0; w < b.size(); ++w) {
        if (support::coin(rng)) keep |= bit(w);
      }
      a = induced_subframe(b, keep);
    } else {
      a = support::random_loose_frame(rng, few, 1 + support::pick(rng, 4));
    }
    const auto w = embeds(a, b);
    const bool brute = support::brute_embeds(a, b);
    CHECK(w.has_value() == brute);
    if (w) {
      ++positive;
      CHECK((*w)[a.root()] == b.root());
      for (std::size_t x = 0; x < a.size(); ++x) {
        CHECK(a.type(x) == b.type((*w)[x]));
        for (std::size_t y = 0; y < a.size(); ++y) CHECK(a.related(x, y) == b.related((*w)[x], (*w)[y]));
      }
    }
  }
  CHECK(positive > 50);
}

TEST_CASE("EmbeddingCache matches embeds") {
  support::Rng rng(4);
  const auto c = Closure::of(parse("p"));
  const auto pool = enumerate_types(c);
  EmbeddingCache cache;
  for (int i = 0; i < 100; ++i) {
    const auto a = support::random_loose_frame(rng, pool, 1 + support::pick(rng, 3));
    const auto b = support::random_loose_frame(rng, pool, 1 + support::pick(rng, 4));
    CHECK(cache.embeds(a, b) == embeds(a, b).has_value());
    CHECK(cache.embeds(a, b) == embeds(a, b).has_value());
  }
  CHECK(cache.size() > 0);
}

TEST_CASE("enumerate_frames for p at norm bound 1 gives the two singletons") {
  const auto c = Closure::of(parse("p"));
  std::vector<LocalFrame> out;
  const auto st = enumerate_frames(c, 0, {}, [&](const LocalFrame& f) { out.push_back(f); });
  CHECK(st == EnumStatus::Complete);
  CHECK(out.size() == 2);
  for (const auto& f : out) CHECK(f.size() == 1);
}

TEST_CASE("enumerate_frames is duplicate-free, valid and respects the norm bound") {
  const auto c = Closure::of(parse("[]p"));
  std::set<std::string> keys;
  std::size_t n = 0;
  const auto st = enumerate_frames(c, 0, {}, [&](const LocalFrame& f) {
    ++n;
    keys.insert(f.canonical_key());
    CHECK(f.norm() <= c->length());
    CHECK(validate_typed_frame(f.frame(), c).empty());
  });
  CHECK(st == EnumStatus::Complete);
  CHECK(keys.size() == n);
  std::size_t filtered = 0;
  enumerate_frames(c, 0, [&](const LocalFrame& f) { return f.root_type().contains(parse("[]p")); },
                   [&](const LocalFrame& f) {
                     ++filtered;
                     CHECK(f.root_type().contains(parse("[]p")));
                   });
  CHECK(filtered > 0);
  CHECK(filtered < n);
}

TEST_CASE("enumerate_frames matches brute force over small preorders") {
  // Every valid local frame with at most 2 worlds for []p, up to iso.
  const auto c = Closure::of(parse("[]p"));
  const auto types = enumerate_types(c);
  std::set<std::string> brute;
  const std::vector<std::vector<Row>> shapes = {{bit(0)}, {bit(0) | bit(1), bit(1)}, {bit(0) | bit(1), bit(0) | bit(1)}};
  for (const auto& R : shapes) {
    const std::size_t n = R.size();
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      TypedFrame f = make_frame(c, {}, R);
      for (auto i : pick) f.types.push_back(types[i]);
      if (validate_typed_frame(f, c).empty()) brute.insert(LocalFrame::make(f, 0).canonical_key());
      std::size_t i = 0;
      while (i < n && ++pick[i] == types.size()) pick[i++] = 0;
      if (i == n) break;
    }
  }
  std::set<std::string> enumerated;
  // Norm bound 2 = |[]p|; keep frames with at most 2 worlds.
  enumerate_frames(c, 0, [](const LocalFrame& f) { return f.size() <= 2; },
                   [&](const LocalFrame& f) { enumerated.insert(f.canonical_key()); });
  CHECK(enumerated == brute);
}
