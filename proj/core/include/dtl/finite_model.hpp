#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtl/budget.hpp"
#include "dtl/closure.hpp"
#include "dtl/frames.hpp"
#include "dtl/quasimodel.hpp"

namespace dtl {

/// Finite Aleksandroff dynamic topological model. order[x] is the set of
/// points y with x ≤ y; the opens are the up-sets.
struct FiniteDynModel {
  std::size_t points = 0;
  std::vector<Row> order;
  std::vector<std::size_t> f;
  std::map<std::string, Row> valuation;

  bool leq(std::size_t x, std::size_t y) const { return (order[x] >> y) & 1U; }
};

/// Preorder, f total and in range, and x ≤ y ⇒ f(x) ≤ f(y). Clauses:
/// "size", "reflexive", "transitive", "f-range", "continuity", "valuation".
ValidationReport validate_model(const FiniteDynModel& m);

/// Extension of every closure entry.
struct Extension {
  ClosurePtr closure;
  std::vector<Row> sets;

  Row at(const Formula& f) const { return sets[closure->index(f)]; }
  PhiType type_at(std::size_t x) const;
};

/// □ is the interior, ○ the preimage under f, ∗ the set of points whose
/// whole forward orbit stays inside.
Extension evaluate(const FiniteDynModel& m, const ClosurePtr& c);
Extension evaluate(const FiniteDynModel& m, const Formula& phi);

/// τ(x).
PhiType type_of(const FiniteDynModel& m, std::size_t x, const ClosurePtr& c);

/// Preorders on n points up to isomorphism, in a fixed order. Each entry
/// is a row vector as in FiniteDynModel::order.
std::vector<std::vector<Row>> preorders_up_to_iso(std::size_t n);

/// Monotone self-maps of a preorder, in lexicographic order.
std::vector<std::vector<std::size_t>> monotone_maps(const std::vector<Row>& order);

enum class OracleStatus { Found, Exhausted, Budget };

struct OracleResult {
  OracleStatus status = OracleStatus::Exhausted;
  std::optional<FiniteDynModel> model;
  std::optional<std::size_t> point;
  std::uint64_t work = 0;  // models evaluated
};

/// Searches for a finite countermodel of φ with at most max_points points.
/// Exhausted means no countermodel of that size exists; it says nothing
/// about validity in general.
OracleResult oracle_refute(const Formula& phi, std::size_t max_points, const Budget& budget = {});

struct SimulationCandidate {
  TypedFrame frame;
  FiniteDynModel model;
  std::vector<std::pair<std::size_t, std::size_t>> chi;  // (world, point)
};

/// Type preservation and continuity of χ. Clauses "range", "type",
/// "continuity".
ValidationReport check_simulation(const SimulationCandidate& c, const ClosurePtr& closure);
/// Additionally f χ ⊆ χ g, reported under clause "omega".
ValidationReport check_omega_simulation(const SimulationCandidate& c, const std::vector<Row>& g,
                                        const ClosurePtr& closure);

/// Restriction of ⟨frame, g⟩ to dom(χ), worlds renumbered in increasing
/// order. Throws std::invalid_argument if dom(χ) is empty.
Quasimodel restrict_to_domain(const TypedFrame& frame, const std::vector<Row>& g,
                              const std::vector<std::pair<std::size_t, std::size_t>>& chi);

}  // namespace dtl
