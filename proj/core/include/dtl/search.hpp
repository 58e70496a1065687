#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtl/budget.hpp"
#include "dtl/frames.hpp"
#include "dtl/quasimodel.hpp"
#include "dtl/temporal.hpp"

namespace dtl {

enum class SearchStatus { Found, Exhausted, Budget };
const char* to_string(SearchStatus s);

/// The ¬∗ψ members of t, in closure order.
std::vector<Formula> eventualities(const PhiType& t);

inline constexpr std::size_t kUnrealized = SIZE_MAX;

/// Realization times at position N of a finite path of frames. An
/// eventuality ¬∗ψ of t(𝔞_N) is realized at the least K ≥ N with
/// ¬ψ ∈ t(𝔞_K); kUnrealized if there is none within the path.
struct RealizationProfile {
  std::size_t N = 0;
  std::vector<std::pair<Formula, std::size_t>> times;
  std::size_t rho_inf = 0;  // maximum, kUnrealized if any is; 0 if none
  std::size_t rho_fin = 0;  // maximum finite time; 0 if none
};

RealizationProfile realization_profile(const std::vector<LocalFrame>& path, std::size_t N);

struct Inefficiency {
  std::size_t N;
  std::size_t M1;
  std::size_t M2;
  friend bool operator==(const Inefficiency&, const Inefficiency&) = default;
};

/// Lexicographically least (N, M1, M2) with N ≤ M1 < M2, 𝔞_{M1} ⊴ 𝔞_{M2},
/// M2 < ρ^∞_N and no realization time of position N strictly between.
std::optional<Inefficiency> find_inefficiency(const std::vector<LocalFrame>& path,
                                              EmbeddingCache* cache = nullptr);

/// ‖𝔞_{n+1}‖ ≤ ‖𝔞_n‖ + |φ| for every step.
bool norm_growth_ok(const std::vector<LocalFrame>& path);

bool is_efficient(const std::vector<LocalFrame>& path, EmbeddingCache* cache = nullptr);

/// Cuts (M1, M2] and re-reduces the tail so that the norm growth bound
/// holds again. Throws std::invalid_argument if `ineff` is not an
/// inefficiency of `path`.
std::vector<LocalFrame> remove_inefficiency(const std::vector<LocalFrame>& path,
                                            const Inefficiency& ineff);

/// Repeats remove_inefficiency (after restoring norm growth) until the
/// path is efficient.
std::vector<LocalFrame> make_efficient(std::vector<LocalFrame> path);

/// Least k with ‖𝔞‖ ≤ (k+1)|φ|.
std::size_t stratum(const LocalFrame& a);

/// level[L-1] marks the types that can start a sensible type sequence of
/// length L, for L = 1..max_len, where every type along it keeps a witness
/// for each of its ¬□ψ among the types of the same level.
std::vector<std::vector<bool>> type_path_levels(const std::vector<PhiType>& types,
                                                std::size_t max_len);

/// ⟨A^N, ε^N⟩. eps[i] lists indices into frames; eps[i][0] == i.
struct PartialFamily {
  ClosurePtr closure;
  std::size_t depth = 0;
  std::vector<LocalFrame> frames;
  std::vector<std::vector<std::size_t>> eps;
};

struct FamilyResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<PartialFamily> family;  // when Found
  std::uint64_t work = 0;
  std::size_t universe = 0;  // frames reachable from the goal frames
  std::string note;
};

/// Decides whether an efficient, open partial family of depth N satisfying
/// `goal` exists. Pools of frames with at most 1, 2 and 3 worlds are tried
/// first; a hit returns the greatest family inside that pool with note
/// "world cap k". Otherwise the result is the greatest family inside all
/// frames reachable from goal frames, which contains every other family.
/// Exhausted means none exists.
FamilyResult find_partial_family(const ClosurePtr& c, std::size_t N, const Formula& goal,
                                 const Budget& budget);

/// Re-checks every family condition from scratch.
ValidationReport check_partial_family(const PartialFamily& family, const Formula& goal);

/// 𝔓 ↾ I_k(φ): frames of stratum ≤ k with their paths cut to length k−s+1.
PartialFamily restrict_family(const PartialFamily& family, std::size_t k);

struct CertifierResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<Quasimodel> model;
  std::uint64_t work = 0;
};

/// Searches quasimodels with min_worlds..max_worlds worlds that satisfy ψ.
/// Frames are tried in order of size, then number of R-edges; g is the
/// least relation found by greedy edge removal from the largest admissible
/// one. Every returned model has passed validate_quasimodel.
CertifierResult find_satisfying_quasimodel(const Formula& psi, std::size_t max_worlds,
                                           const Budget& budget, std::size_t min_worlds = 1);

enum class Verdict { Valid, NotValid, Unknown };
const char* to_string(Verdict v);

struct DepthReport {
  std::size_t depth = 0;
  SearchStatus certifier = SearchStatus::Exhausted;
  std::string families;  // "type-empty", "empty", "exist", "budget"
  std::uint64_t work = 0;
};

struct ValidityResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<std::size_t> depth;        // for Valid
  std::optional<Quasimodel> certificate;   // for NotValid, satisfies ¬φ
  std::vector<DepthReport> depths;
  std::uint64_t work = 0;
};

/// Certifier at N+1 worlds for every depth first, then the family search
/// depth by depth. Each sub-search gets `budget` on its own.
ValidityResult decide_validity(const Formula& phi, std::size_t max_depth, const Budget& budget);

}  // namespace dtl
