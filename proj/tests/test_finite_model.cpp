#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace dtl;

namespace {

FiniteDynModel two_point_chain() {
  // 0 ≤ 1, f fixes both, p true at 1 only.
  FiniteDynModel m;
  m.points = 2;
  m.order = {bit(0) | bit(1), bit(1)};
  m.f = {0, 1};
  m.valuation["p"] = bit(1);
  return m;
}

bool has_clause(const ValidationReport& r, const std::string& clause) {
  return std::any_of(r.begin(), r.end(), [&](const ValidationIssue& i) { return i.clause == clause; });
}

// Canonical form of a labeled preorder under all permutations.
std::vector<Row> canonical(const std::vector<Row>& order) {
  const std::size_t n = order.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::vector<Row> best;
  do {
    std::vector<Row> img(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if ((order[x] >> y) & 1U) img[perm[x]] |= bit(perm[y]);
      }
    }
    if (best.empty() || img < best) best = img;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("validate_model clauses") {
  auto m = two_point_chain();
  CHECK(validate_model(m).empty());
  auto bad = m;
  bad.f = {1, 0};
  CHECK(has_clause(validate_model(bad), "continuity"));
  bad = m;
  bad.f = {0, 2};
  CHECK(has_clause(validate_model(bad), "f-range"));
  bad = m;
  bad.order = {bit(1), bit(1)};
  CHECK(has_clause(validate_model(bad), "reflexive"));
  bad = m;
  bad.valuation["p"] = bit(5);
  CHECK(has_clause(validate_model(bad), "valuation"));
}

TEST_CASE("evaluate on a two-point chain") {
  const auto m = two_point_chain();
  const auto e = evaluate(m, parse("[]p & <>p & *p & X!p"));
  CHECK(e.at(parse("p")) == bit(1));
  CHECK(e.at(parse("[]p")) == bit(1));
  CHECK(e.at(parse("<>p")) == (bit(0) | bit(1)));
  CHECK(e.at(parse("*p")) == bit(1));
  CHECK(e.at(parse("X!p")) == bit(0));
  CHECK(type_of(m, 1, e.closure) == e.type_at(1));
  CHECK(e.type_at(1).contains(parse("*p")));
}

TEST_CASE("henceforth along a cycle") {
  FiniteDynModel m;
  m.points = 3;
  m.order = {bit(0), bit(1), bit(2)};
  m.f = {1, 2, 1};
  m.valuation["p"] = bit(1) | bit(2);
  const auto e = evaluate(m, parse("X*p"));
  CHECK(e.at(parse("*p")) == (bit(1) | bit(2)));
  CHECK(e.at(parse("X*p")) == (bit(0) | bit(1) | bit(2)));
}

TEST_CASE("evaluate agrees with the fixpoint oracle") {
  support::Rng rng(5);
  std::vector<Formula> corpus;
  for (int i = 0; i < 20; ++i) corpus.push_back(support::random_formula(rng, {"p", "q"}, 4));
  std::size_t checked = 0;
  support::for_each_model(2, {"p", "q"}, [&](const FiniteDynModel& m) {
    for (const auto& f : corpus) {
      const auto e = evaluate(m, f);
      for (std::size_t i = 0; i < e.closure->size(); ++i) {
        CHECK(e.sets[i] == support::fixpoint_eval(m, e.closure->at(i)));
        ++checked;
      }
    }
  });
  CHECK(checked > 1000);
}

TEST_CASE("preorders up to isomorphism") {
  const std::size_t expected[] = {1, 3, 9, 33};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto got = preorders_up_to_iso(n);
    CHECK(got.size() == expected[n - 1]);
    std::set<std::vector<Row>> classes;
    for (const auto& o : got) {
      CHECK(is_preorder(o));
      classes.insert(canonical(o));
    }
    CHECK(classes.size() == got.size());

    // Every labeled preorder falls into one of the classes.
    std::set<std::vector<Row>> all;
    std::size_t labeled = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n * n)); ++mask) {
      std::vector<Row> o(n, 0);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if ((mask >> (x * n + y)) & 1U) o[x] |= bit(y);
        }
      }
      if (!is_preorder(o)) continue;
      ++labeled;
      all.insert(canonical(o));
    }
    const std::size_t labeled_counts[] = {1, 4, 29, 355};
    CHECK(labeled == labeled_counts[n - 1]);
    CHECK(all == classes);
  }
}

TEST_CASE("monotone maps") {
  const auto chain = two_point_chain().order;
  const auto maps = monotone_maps(chain);
  CHECK(maps == std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}, {1, 1}});
  const auto discrete = monotone_maps({bit(0), bit(1), bit(2)});
  CHECK(discrete.size() == 27);
  CHECK(std::is_sorted(discrete.begin(), discrete.end()));
}

TEST_CASE("oracle examples") {
  const auto p = oracle_refute(parse("p"), 3);
  REQUIRE(p.status == OracleStatus::Found);
  CHECK(p.model->points == 1);
  CHECK(validate_model(*p.model).empty());
  const bool holds = (evaluate(*p.model, parse("p")).at(parse("p")) >> *p.point) & 1U;
  CHECK_FALSE(holds);

  const auto next = oracle_refute(parse("[]p -> Xp"), 2);
  REQUIRE(next.status == OracleStatus::Found);
  CHECK(next.model->points <= 2);
  const auto e = evaluate(*next.model, parse("[]p -> Xp"));
  const bool refuted = !((e.at(parse("[]p -> Xp")) >> *next.point) & 1U);
  CHECK(refuted);

  const auto fig = oracle_refute(parse("*[]p -> []*p"), 3);
  CHECK(fig.status == OracleStatus::Exhausted);
  CHECK_FALSE(fig.model);

  const auto taut = oracle_refute(parse("*p -> p"), 3);
  CHECK(taut.status == OracleStatus::Exhausted);

  const auto tight = oracle_refute(parse("*[]p -> []*p"), 3, Budget{10});
  CHECK(tight.status == OracleStatus::Budget);
}

TEST_CASE("simulation checks on the identity") {
  const auto m = two_point_chain();
  const auto phi = parse("*p -> []p");
  const auto q = from_finite_model(m, phi);
  SimulationCandidate cand{q.frame, m, {{0, 0}, {1, 1}}};
  CHECK(check_simulation(cand, q.closure()).empty());
  CHECK(check_omega_simulation(cand, q.g, q.closure()).empty());

  auto swapped = cand;
  swapped.chi = {{0, 1}};
  CHECK(has_clause(check_simulation(swapped, q.closure()), "type"));

  auto out = cand;
  out.chi = {{0, 7}};
  CHECK(has_clause(check_simulation(out, q.closure()), "range"));

  // χ = {(1,1)} alone: 0 ≤ 1 has no χ-image below, which is fine; adding
  // (0,0) back but dropping g at 0 breaks the ω clause.
  auto g = q.g;
  g[0] = bit(1);
  CHECK(has_clause(check_omega_simulation(cand, g, q.closure()), "omega"));
}

TEST_CASE("restrict_to_domain") {
  const auto m = two_point_chain();
  const auto q = from_finite_model(m, parse("*p"));
  const auto r = restrict_to_domain(q.frame, q.g, {{1, 1}});
  CHECK(r.size() == 1);
  CHECK(r.frame.types[0] == q.frame.types[1]);
  CHECK(r.g == std::vector<Row>{bit(0)});
  CHECK(validate_quasimodel(r).empty());
  CHECK_THROWS_AS(restrict_to_domain(q.frame, q.g, {}), std::invalid_argument);
}
