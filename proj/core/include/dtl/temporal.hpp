#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtl/frames.hpp"

namespace dtl {

/// ○ψ ∈ t ⇔ ψ ∈ s, and ∗ψ ∈ t ⇔ (ψ ∈ t and ∗ψ ∈ s), for every ○ψ, ∗ψ in
/// the closure. Throws std::invalid_argument if the closures differ.
bool sensible_pair(const PhiType& t, const PhiType& s);

/// g ⊆ W_source × W_target; pairs[w] is the set of targets of w.
struct FrameRelation {
  LocalFrame source;
  LocalFrame target;
  std::vector<Row> pairs;

  bool contains(std::size_t w, std::size_t v) const { return (pairs[w] >> v) & 1U; }
};

bool is_total(const FrameRelation& rel);
/// Every pair is a sensible pair of types.
bool is_sensible(const FrameRelation& rel);
/// Square completion: g w v and R w w' give some v' with R v v' and g w' v'.
bool is_continuous(const FrameRelation& rel);
/// g w v, g w' v' and R v v' imply R w w'.
bool is_non_confluent(const FrameRelation& rel);
/// All of the above plus root-to-root: the conditions of a ⇉ b.
bool is_successor_witness(const FrameRelation& rel);

/// Thrown when a search exceeds its node limit.
class SearchLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuccessorOptions {
  std::size_t node_limit = 0;          // 0: unlimited
  std::size_t* work = nullptr;         // incremented once per search node
};

/// Decides a ⇉ b, returning a witness. The witness is inclusion-minimal
/// along the search path, not globally minimal.
std::optional<FrameRelation> temporal_successor(const LocalFrame& a, const LocalFrame& b,
                                                const SuccessorOptions& opts = {});

/// Memo table for ⇉ decisions keyed by canonical forms. Thread-safe.
class SuccessorCache {
 public:
  bool successor(const LocalFrame& a, const LocalFrame& b, std::size_t* work = nullptr);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, bool> memo_;
};

/// Returns d ⊴ b with a ⇉ d and ‖d‖ ≤ ‖a‖ + |φ|. Throws
/// std::invalid_argument if a ⇉ b fails, SearchLimit if the deletion
/// search exceeds `state_limit` candidate frames.
LocalFrame reduce_successor(const LocalFrame& a, const LocalFrame& b,
                            std::size_t state_limit = 200000);

/// [T ⊕ A]_t: root cluster T (world 0.. in the order given, duplicates
/// removed), each member of A attached as a disjoint child subtree.
/// Throws std::invalid_argument if T is empty or t ∉ T.
LocalFrame oplus(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A,
                 const PhiType& t);

/// For all □ψ and t ∈ T: □ψ ∈ t iff ψ ∈ s for every s ∈ T and □ψ ∈ t(𝔞)
/// for every 𝔞 ∈ A.
bool is_coherent(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A);

/// Whether ⟨T, A, t⟩ admits b.
bool admits(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A, const PhiType& t,
            const LocalFrame& b);

}  // namespace dtl
