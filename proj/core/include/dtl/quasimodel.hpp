#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dtl/frames.hpp"

namespace dtl {

struct FiniteDynModel;

/// ⟨W, R, t, g⟩ over the closure carried by the frame.
struct Quasimodel {
  TypedFrame frame;
  std::vector<Row> g;  // g[w] = successors of w

  const ClosurePtr& closure() const { return frame.closure; }
  std::size_t size() const { return frame.size(); }
  bool step(std::size_t w, std::size_t v) const { return (g[w] >> v) & 1U; }
};

/// Reflexive-transitive closure of g: reach[w] = {v : g^N w v, N ≥ 0}.
std::vector<Row> reachability(const std::vector<Row>& g);

/// Frame validity, totality, sensibility, continuity and ω-sensibility.
/// Clauses are tagged "reflexive", "transitive", "type", "box", "g-range",
/// "g-total", "sensible", "continuity" and "omega-sensible".
ValidationReport validate_quasimodel(const Quasimodel& q);

/// The first world whose type contains ψ. Throws std::out_of_range if ψ
/// is not in the closure.
std::optional<std::size_t> satisfies(const Quasimodel& q, const Formula& psi);

/// prefix · cycle^ω.
struct LassoPath {
  std::vector<std::size_t> prefix;
  std::vector<std::size_t> cycle;

  std::size_t at(std::size_t n) const {
    return n < prefix.size() ? prefix[n] : cycle[(n - prefix.size()) % cycle.size()];
  }
  friend bool operator==(const LassoPath&, const LassoPath&) = default;
};

bool is_g_path(const Quasimodel& q, const std::vector<std::size_t>& path);
bool is_g_path(const Quasimodel& q, const LassoPath& p);

/// Every ¬∗ψ at some position is followed (weakly) by a ¬ψ position.
bool is_realizing(const Quasimodel& q, const LassoPath& p);

/// Extends a finite g-path to a realizing lasso. Eventualities are chased
/// in closure order along shortest witnesses; when nothing is pending the
/// path takes its lowest-indexed g-step. Throws std::invalid_argument if
/// `path` is empty or not a g-path, std::logic_error if q is not
/// ω-sensible along the way.
LassoPath extend_to_realizing(const Quasimodel& q, const std::vector<std::size_t>& path);

/// ⟨vₙ⟩ with R wₙ vₙ and g vₙ vₙ₊₁, choosing the lowest index at each step.
/// Throws std::invalid_argument unless `path` is a g-path with R w₀ v₀,
/// std::logic_error if continuity fails.
std::vector<std::size_t> lift_path(const Quasimodel& q, const std::vector<std::size_t>& path,
                                   std::size_t v0);

/// Same infinite path with the shortest prefix and a primitive cycle.
LassoPath normalize(LassoPath p);

/// σ: drop the head, or rotate the cycle when there is no prefix.
LassoPath shift(const LassoPath& p);

/// candidate ∈ R_N(center): R centerₙ candidateₙ for all n ≤ N.
bool basis_member(const Quasimodel& q, const LassoPath& center, std::size_t N,
                  const LassoPath& candidate);

/// Worlds = points, R = ≤, t = τ, g = graph of f.
Quasimodel from_finite_model(const FiniteDynModel& m, const Formula& phi);
Quasimodel from_finite_model(const FiniteDynModel& m, const ClosurePtr& c);

}  // namespace dtl
