#include "dtl/search.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "dtl/finite_model.hpp"
#include "dtl/frame_enum.hpp"

namespace dtl {

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::Exhausted: return "exhausted";
    case SearchStatus::Budget: return "budget";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "VALID";
    case Verdict::NotValid: return "NOT_VALID";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::vector<Formula> eventualities(const PhiType& t) {
  const Closure& c = *t.closure();
  std::vector<Formula> out;
  for (const auto& h : c.henceforths()) {
    if (!t.contains(h.self)) out.push_back(c.at(c.negation(h.self)));
  }
  return out;
}

RealizationProfile realization_profile(const std::vector<LocalFrame>& path, std::size_t N) {
  if (N >= path.size()) throw std::out_of_range("position outside the path");
  const Closure& c = *path[N].closure();
  RealizationProfile p;
  p.N = N;
  for (const auto& h : c.henceforths()) {
    if (path[N].root_type().contains(h.self)) continue;
    std::size_t K = kUnrealized;
    for (std::size_t k = N; k < path.size(); ++k) {
      if (!path[k].root_type().contains(h.arg)) {
        K = k;
        break;
      }
    }
    p.times.emplace_back(c.at(c.negation(h.self)), K);
    p.rho_inf = (p.times.size() == 1) ? K : std::max(p.rho_inf, K);
    if (K != kUnrealized) p.rho_fin = std::max(p.rho_fin, K);
  }
  return p;
}

namespace {

bool embeds_with(EmbeddingCache* cache, const LocalFrame& a, const LocalFrame& b) {
  return cache ? cache->embeds(a, b) : embeds(a, b).has_value();
}

// Whether (N, M1, M2) satisfies the ρ conditions of an inefficiency.
bool timing_allows(const RealizationProfile& p, std::size_t M1, std::size_t M2) {
  if (!(M2 < p.rho_inf)) return false;
  for (const auto& [f, K] : p.times) {
    if (K != kUnrealized && M1 < K && K < M2) return false;
  }
  return true;
}

bool is_inefficiency(const std::vector<LocalFrame>& path, const Inefficiency& x,
                     EmbeddingCache* cache) {
  if (!(x.N <= x.M1 && x.M1 < x.M2 && x.M2 < path.size())) return false;
  const auto p = realization_profile(path, x.N);
  return timing_allows(p, x.M1, x.M2) && embeds_with(cache, path[x.M1], path[x.M2]);
}

// No inefficiency ends at the last position and the last step respects
// the norm bound. Earlier triples are unaffected by appending.
bool extends_efficiently(const std::vector<LocalFrame>& path, EmbeddingCache& cache) {
  const std::size_t last = path.size() - 1;
  if (last == 0) return true;
  const std::size_t len = path[0].closure()->length();
  if (path[last].norm() > path[last - 1].norm() + len) return false;
  for (std::size_t N = 0; N < last; ++N) {
    const auto p = realization_profile(path, N);
    for (std::size_t M1 = N; M1 < last; ++M1) {
      if (timing_allows(p, M1, last) && cache.embeds(path[M1], path[last])) return false;
    }
  }
  return true;
}

}  // namespace

std::optional<Inefficiency> find_inefficiency(const std::vector<LocalFrame>& path,
                                              EmbeddingCache* cache) {
  for (std::size_t N = 0; N < path.size(); ++N) {
    const auto p = realization_profile(path, N);
    if (p.times.empty()) continue;
    for (std::size_t M1 = N; M1 < path.size(); ++M1) {
      for (std::size_t M2 = M1 + 1; M2 < path.size(); ++M2) {
        if (!(M2 < p.rho_inf)) break;
        if (!timing_allows(p, M1, M2)) break;  // a realization now lies inside (M1, M2)
        if (embeds_with(cache, path[M1], path[M2])) return Inefficiency{N, M1, M2};
      }
    }
  }
  return std::nullopt;
}

bool norm_growth_ok(const std::vector<LocalFrame>& path) {
  for (std::size_t n = 0; n + 1 < path.size(); ++n) {
    if (path[n + 1].norm() > path[n].norm() + path[n].closure()->length()) return false;
  }
  return true;
}

bool is_efficient(const std::vector<LocalFrame>& path, EmbeddingCache* cache) {
  return norm_growth_ok(path) && !find_inefficiency(path, cache);
}

namespace {

void restore_growth(std::vector<LocalFrame>& path, std::size_t from) {
  for (std::size_t i = std::max<std::size_t>(from, 1); i < path.size(); ++i) {
    const std::size_t len = path[i].closure()->length();
    if (path[i].norm() > path[i - 1].norm() + len) {
      path[i] = reduce_successor(path[i - 1], path[i]);
    }
  }
}

}  // namespace

std::vector<LocalFrame> remove_inefficiency(const std::vector<LocalFrame>& path,
                                            const Inefficiency& ineff) {
  if (!is_inefficiency(path, ineff, nullptr)) {
    throw std::invalid_argument("triple is not an inefficiency of the path");
  }
  std::vector<LocalFrame> out(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(ineff.M1) + 1);
  out.insert(out.end(), path.begin() + static_cast<std::ptrdiff_t>(ineff.M2) + 1, path.end());
  restore_growth(out, ineff.M1 + 1);
  return out;
}

std::vector<LocalFrame> make_efficient(std::vector<LocalFrame> path) {
  restore_growth(path, 1);
  EmbeddingCache cache;
  while (auto x = find_inefficiency(path, &cache)) path = remove_inefficiency(path, *x);
  return path;
}

std::size_t stratum(const LocalFrame& a) {
  const std::size_t len = a.closure()->length();
  const std::size_t n = a.norm();
  return n <= len ? 0 : (n + len - 1) / len - 1;
}

namespace {

// Drops types with a ¬□ψ that no remaining type can witness above them.
void eliminate_unwitnessed(const std::vector<PhiType>& types, std::vector<bool>& keep) {
  if (types.empty()) return;
  const Closure& c = *types[0].closure();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < types.size(); ++i) {
      if (!keep[i]) continue;
      for (const auto& b : c.boxes()) {
        if (types[i].contains(b.self)) continue;
        const std::size_t neg_arg = c.negation(b.arg);
        bool witnessed = false;
        for (std::size_t j = 0; j < types.size() && !witnessed; ++j) {
          if (!keep[j] || !types[j].contains(neg_arg)) continue;
          witnessed = true;
          for (const auto& b2 : c.boxes()) {
            if (types[i].contains(b2.self) && !types[j].contains(b2.self)) witnessed = false;
          }
        }
        if (!witnessed) {
          keep[i] = false;
          changed = true;
          break;
        }
      }
    }
  }
}

}  // namespace

std::vector<std::vector<bool>> type_path_levels(const std::vector<PhiType>& types,
                                                std::size_t max_len) {
  const std::size_t n = types.size();
  std::vector<std::vector<bool>> sens(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sens[i][j] = sensible_pair(types[i], types[j]);
  }
  std::vector<std::vector<bool>> levels;
  if (max_len == 0) return levels;
  levels.emplace_back(n, true);
  eliminate_unwitnessed(types, levels.back());
  for (std::size_t L = 2; L <= max_len; ++L) {
    std::vector<bool> next(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n && !next[i]; ++j) next[i] = sens[i][j] && levels.back()[j];
    }
    eliminate_unwitnessed(types, next);
    levels.push_back(std::move(next));
  }
  return levels;
}

namespace {

struct BudgetExceeded {};

// Types that can label a world at all. R is reflexive, so □ψ needs ψ;
// it is transitive, so □ψ needs □□ψ when that is in the closure.
std::vector<PhiType> frame_types(const ClosurePtr& c) {
  auto all = enumerate_types(c);
  std::erase_if(all, [&](const PhiType& t) {
    for (const auto& b : c->boxes()) {
      if (!t.contains(b.self)) continue;
      if (!t.contains(b.arg)) return true;
      const auto bb = c->find(Formula::box(c->at(b.self)));
      if (bb && !t.contains(*bb)) return true;
    }
    return false;
  });
  return all;
}

}  // namespace

namespace {

// Greatest family inside `pool`, which must be closed under subframes.
// Fills res.status, res.family, res.note and res.universe.
void family_in_pool(const std::vector<LocalFrame>& pool, const ClosurePtr& c, std::size_t N,
                    std::size_t goal_idx, const Budget& budget, const Deadline& deadline,
                    FamilyResult& res) {
  const std::size_t len = c->length();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pool.size(); ++i) index.emplace(pool[i].canonical_key(), i);

  auto charge = [&](std::uint64_t units) {
    res.work += units;
    if ((budget.units != 0 && res.work > budget.units) || deadline.passed()) throw BudgetExceeded{};
  };

  std::vector<char> reached(pool.size(), 0);
  std::vector<std::vector<std::size_t>> succ(pool.size());
  std::vector<std::vector<std::size_t>> subs(pool.size());
  std::vector<std::size_t> order;
  std::deque<std::size_t> queue;
  std::vector<std::size_t> goals;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (stratum(pool[i]) == 0 && pool[i].root_type().contains(goal_idx)) {
      goals.push_back(i);
      reached[i] = 1;
      queue.push_back(i);
    }
  }
  if (goals.empty()) {
    res.note = "no goal frame";
    return;
  }

  EmbeddingCache cache;
  try {
    while (!queue.empty()) {
      const std::size_t a = queue.front();
      queue.pop_front();
      order.push_back(a);
      auto visit = [&](std::size_t b) {
        if (!reached[b]) {
          reached[b] = 1;
          queue.push_back(b);
        }
      };
      for (const auto& s : distinct_subframes(pool[a])) {
        auto it = index.find(s.canonical_key());
        if (it == index.end()) throw std::logic_error("subframe missing from the frame universe");
        subs[a].push_back(it->second);
        visit(it->second);
      }
      if (N - stratum(pool[a]) == 0) continue;
      for (std::size_t b = 0; b < pool.size(); ++b) {
        if (pool[b].norm() > pool[a].norm() + len) continue;
        if (!sensible_pair(pool[a].root_type(), pool[b].root_type())) continue;
        std::size_t nodes = 0;
        SuccessorOptions opts;
        opts.work = &nodes;
        opts.node_limit = budget.units == 0 ? 0 : std::max<std::uint64_t>(1, budget.units - std::min(budget.units, res.work));
        bool ok = false;
        try {
          ok = temporal_successor(pool[a], pool[b], opts).has_value();
        } catch (const SearchLimit&) {
          throw BudgetExceeded{};
        }
        charge(nodes);
        if (ok) {
          succ[a].push_back(b);
          visit(b);
        }
      }
    }
    res.universe = order.size();

    // Greatest family: drop frames without an efficient path of the
    // required length inside the survivors, or with a dropped subframe.
    std::vector<char> alive = reached;
    std::vector<std::vector<std::size_t>> paths(pool.size());
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto a : order) {
        if (!alive[a]) continue;
        bool ok = std::all_of(subs[a].begin(), subs[a].end(), [&](std::size_t s) { return alive[s] != 0; });
        if (ok) {
          const std::size_t L = N - stratum(pool[a]) + 1;
          std::vector<LocalFrame> frames{pool[a]};
          std::vector<std::size_t> ids{a};
          std::function<bool()> dfs = [&]() -> bool {
            charge(1);
            if (ids.size() == L) return true;
            for (auto b : succ[ids.back()]) {
              if (!alive[b]) continue;
              frames.push_back(pool[b]);
              ids.push_back(b);
              if (extends_efficiently(frames, cache) && dfs()) return true;
              frames.pop_back();
              ids.pop_back();
            }
            return false;
          };
          ok = dfs();
          if (ok) paths[a] = ids;
        }
        if (!ok) {
          alive[a] = 0;
          changed = true;
        }
      }
    }
    const bool satisfied = std::any_of(goals.begin(), goals.end(), [&](std::size_t g) { return alive[g] != 0; });
    if (!satisfied) {
      res.note = "empty";
      return;
    }
    PartialFamily fam;
    fam.closure = c;
    fam.depth = N;
    std::vector<std::size_t> renumber(pool.size(), SIZE_MAX);
    for (auto a : order) {
      if (!alive[a]) continue;
      renumber[a] = fam.frames.size();
      fam.frames.push_back(pool[a]);
    }
    for (auto a : order) {
      if (!alive[a]) continue;
      std::vector<std::size_t> p;
      for (auto x : paths[a]) p.push_back(renumber[x]);
      fam.eps.push_back(std::move(p));
    }
    res.status = SearchStatus::Found;
    res.family = std::move(fam);
  } catch (const BudgetExceeded&) {
    res.status = SearchStatus::Budget;
    res.note = "family search";
  }
}

}  // namespace

FamilyResult find_partial_family(const ClosurePtr& c, std::size_t N, const Formula& goal,
                                 const Budget& budget) {
  FamilyResult res;
  const std::size_t len = c->length();
  const std::size_t goal_idx = c->index(goal);
  std::vector<PhiType> types;
  try {
    types = frame_types(c);
  } catch (const std::length_error&) {
    res.status = SearchStatus::Budget;
    res.note = "too many types";
    return res;
  }
  const auto levels = type_path_levels(types, N + 1);
  bool goal_possible = false;
  for (std::size_t i = 0; i < types.size(); ++i) {
    goal_possible = goal_possible || (levels[N][i] && types[i].contains(goal_idx));
  }
  if (!goal_possible) {
    res.note = "type-empty";
    return res;
  }

  const Deadline deadline(budget);
  auto stratum_of = [len](std::size_t norm) -> std::size_t {
    return norm <= len ? 0 : (norm + len - 1) / len - 1;
  };
  // A frame of stratum s needs a path of N−s+1 frames, so every world
  // type must start a sensible type sequence that long.
  auto admissible = [&](const FrameUniverse::Tree& t) {
    const std::size_t s = stratum_of(t.norm());
    if (s > N) return false;
    for (auto ty : t.cluster) {
      if (!levels[N - s][ty]) return false;
    }
    return true;
  };
  // Frames with few worlds form subframe-closed pools; a family inside one
  // of them is a family. Only the uncapped universe can show emptiness.
  for (std::size_t cap : {std::size_t{1}, std::size_t{2}, std::size_t{3}, kMaxWorlds}) {
    const bool last = cap == kMaxWorlds;
    FrameUniverse universe(c, types, (N + 1) * len, admissible);
    if (!last) universe.set_world_cap(cap);
    const std::uint64_t left = budget.units == 0 ? 0 : budget.units - std::min(budget.units, res.work);
    std::uint64_t spent = 0;
    const auto st = universe.run(spent, left == 0 && budget.units != 0 ? 1 : left, &deadline);
    res.work += spent;
    if (st == EnumStatus::Budget) {
      res.status = SearchStatus::Budget;
      res.note = "frame universe";
      return res;
    }
    std::vector<LocalFrame> pool;
    for (std::size_t i = 0; i < universe.trees().size(); ++i) {
      for (auto& f : universe.rooted(i)) pool.push_back(std::move(f));
    }
    FamilyResult attempt;
    Budget rest = budget;
    if (budget.units != 0) rest.units = std::max<std::uint64_t>(1, budget.units - std::min(budget.units, res.work));
    family_in_pool(pool, c, N, goal_idx, rest, deadline, attempt);
    res.work += attempt.work;
    if (attempt.status != SearchStatus::Exhausted || last) {
      attempt.work = res.work;
      if (!last && attempt.status == SearchStatus::Found) {
        attempt.note = "world cap " + std::to_string(cap);
      }
      return attempt;
    }
  }
  return res;
}


ValidationReport check_partial_family(const PartialFamily& family, const Formula& goal) {
  ValidationReport report;
  const ClosurePtr& c = family.closure;
  const std::size_t len = c->length();
  const std::size_t N = family.depth;
  if (family.eps.size() != family.frames.size()) {
    report.push_back({0, "shape", "one path per frame is required"});
    return report;
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < family.frames.size(); ++i) {
    if (!index.emplace(family.frames[i].canonical_key(), i).second) {
      report.push_back({i, "shape", "frame listed twice"});
    }
  }
  bool satisfied = false;
  for (std::size_t i = 0; i < family.frames.size(); ++i) {
    const LocalFrame& a = family.frames[i];
    for (const auto& issue : validate_typed_frame(a.frame(), c)) {
      report.push_back({i, "frame", issue.clause + ": " + issue.detail});
    }
    if (a.norm() > (N + 1) * len) report.push_back({i, "norm", "frame is outside I_N"});
    for (const auto& s : distinct_subframes(a)) {
      if (!index.count(s.canonical_key())) report.push_back({i, "open", "a subframe is missing"});
    }
    const std::size_t s = stratum(a);
    const auto& p = family.eps[i];
    if (s > N || p.size() != N - s + 1) {
      report.push_back({i, "path-length", "path has " + std::to_string(p.size()) + " frames"});
      continue;
    }
    if (p.empty() || p[0] != i) report.push_back({i, "path-start", "path does not start at the frame"});
    std::vector<LocalFrame> frames;
    bool in_range = true;
    for (auto x : p) {
      if (x >= family.frames.size()) {
        in_range = false;
        break;
      }
      frames.push_back(family.frames[x]);
    }
    if (!in_range) {
      report.push_back({i, "path-range", "path leaves the family"});
      continue;
    }
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
      if (!temporal_successor(frames[k], frames[k + 1])) {
        report.push_back({i, "successor", "step " + std::to_string(k) + " is not a temporal successor"});
      }
    }
    if (!is_efficient(frames)) report.push_back({i, "efficient", "path is not efficient"});
    if (s == 0 && a.root_type().contains(goal)) satisfied = true;
  }
  if (!satisfied) report.push_back({0, "goal", "no stratum-0 frame contains the goal"});
  return report;
}

PartialFamily restrict_family(const PartialFamily& family, std::size_t k) {
  if (k > family.depth) throw std::invalid_argument("restriction depth exceeds family depth");
  PartialFamily out;
  out.closure = family.closure;
  out.depth = k;
  std::vector<std::size_t> renumber(family.frames.size(), SIZE_MAX);
  for (std::size_t i = 0; i < family.frames.size(); ++i) {
    if (stratum(family.frames[i]) <= k) {
      renumber[i] = out.frames.size();
      out.frames.push_back(family.frames[i]);
    }
  }
  for (std::size_t i = 0; i < family.frames.size(); ++i) {
    if (renumber[i] == SIZE_MAX) continue;
    const std::size_t keep = k - stratum(family.frames[i]) + 1;
    std::vector<std::size_t> p;
    for (std::size_t j = 0; j < keep; ++j) {
      const std::size_t x = renumber[family.eps[i][j]];
      if (x == SIZE_MAX) throw std::logic_error("restricted path leaves I_k");
      p.push_back(x);
    }
    out.eps.push_back(std::move(p));
  }
  return out;
}

namespace {

struct CertTask {
  std::vector<Row> order;
};

struct CertOutcome {
  std::uint64_t cost = 0;
  bool found = false;
  bool cut = false;
  Quasimodel model;
};

class CertifierSearch {
 public:
  CertifierSearch(const ClosurePtr& c, const std::vector<PhiType>& types,
                  const std::vector<std::vector<bool>>& sens, std::size_t goal,
                  std::uint64_t limit, const Deadline& deadline)
      : c_(c), types_(types), sens_(sens), goal_(goal), limit_(limit), deadline_(deadline) {}

  CertOutcome run(const std::vector<Row>& R) {
    R_ = R;
    n_ = R.size();
    std::vector<Row> down(n_, 0);
    for (std::size_t w = 0; w < n_; ++w) {
      for_each_bit(R[w], [&](std::size_t v) { down[v] |= bit(w); });
    }
    cluster_.assign(n_, 0);
    for (std::size_t w = 0; w < n_; ++w) cluster_[w] = R[w] & down[w];
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    // Top clusters first, each cluster contiguous.
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const int pa = std::popcount(R[a]), pb = std::popcount(R[b]);
      if (pa != pb) return pa < pb;
      return std::countr_zero(cluster_[a]) < std::countr_zero(cluster_[b]);
    });
    assigned_.assign(n_, 0);
    try {
      assign(0);
    } catch (const BudgetExceeded&) {
      out_.cut = true;
    }
    return std::move(out_);
  }

 private:
  void charge() {
    ++out_.cost;
    if ((limit_ != 0 && out_.cost > limit_) || ((out_.cost & 0xFFF) == 0 && deadline_.passed())) {
      --out_.cost;
      throw BudgetExceeded{};
    }
  }

  bool box_ok(std::size_t w) const {
    for (const auto& b : c_->boxes()) {
      bool all = true;
      for_each_bit(R_[w], [&](std::size_t v) { all = all && types_[assigned_[v]].contains(b.arg); });
      if (types_[assigned_[w]].contains(b.self) != all) return false;
    }
    return true;
  }

  bool assign(std::size_t k) {
    if (k == n_) return leaf();
    const std::size_t w = order_[k];
    std::size_t start = 0;
    if (k > 0 && cluster_[order_[k - 1]] == cluster_[w]) start = assigned_[order_[k - 1]];
    const bool closes = (k + 1 == n_) || cluster_[order_[k + 1]] != cluster_[w];
    for (std::size_t ti = start; ti < types_.size(); ++ti) {
      charge();
      assigned_[w] = ti;
      if (closes) {
        bool ok = true;
        for_each_bit(cluster_[w], [&](std::size_t x) { ok = ok && box_ok(x); });
        if (!ok) continue;
      }
      if (assign(k + 1)) return true;
    }
    return false;
  }

  bool leaf() {
    bool has_goal = false;
    for (std::size_t w = 0; w < n_; ++w) has_goal = has_goal || types_[assigned_[w]].contains(goal_);
    if (!has_goal) return false;
    // Largest continuous sensible relation.
    std::vector<Row> g(n_, 0);
    for (std::size_t w = 0; w < n_; ++w) {
      for (std::size_t v = 0; v < n_; ++v) {
        if (sens_[assigned_[w]][assigned_[v]]) g[w] |= bit(v);
      }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t w = 0; w < n_; ++w) {
        for_each_bit(g[w], [&](std::size_t v) {
          bool ok = true;
          for_each_bit(R_[w], [&](std::size_t w2) { ok = ok && (g[w2] & R_[v]) != 0; });
          if (!ok) {
            g[w] &= ~bit(v);
            changed = true;
          }
        });
      }
    }
    Quasimodel q;
    q.frame.closure = c_;
    for (std::size_t w = 0; w < n_; ++w) q.frame.types.push_back(types_[assigned_[w]]);
    q.frame.R = R_;
    q.g = g;
    if (!validate_quasimodel(q).empty()) return false;
    // Greedy minimisation keeps certificates small and canonical.
    for (std::size_t w = 0; w < n_; ++w) {
      for (std::size_t v = 0; v < n_; ++v) {
        if (!q.step(w, v)) continue;
        q.g[w] &= ~bit(v);
        if (!validate_quasimodel(q).empty()) q.g[w] |= bit(v);
      }
    }
    out_.found = true;
    out_.model = std::move(q);
    return true;
  }

  const ClosurePtr& c_;
  const std::vector<PhiType>& types_;
  const std::vector<std::vector<bool>>& sens_;
  std::size_t goal_;
  std::uint64_t limit_;
  const Deadline& deadline_;
  std::vector<Row> R_;
  std::size_t n_ = 0;
  std::vector<Row> cluster_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> assigned_;
  CertOutcome out_;
};

}  // namespace

CertifierResult find_satisfying_quasimodel(const Formula& psi, std::size_t max_worlds,
                                           const Budget& budget, std::size_t min_worlds) {
  if (max_worlds == 0) throw std::invalid_argument("max_worlds must be at least 1");
  const auto c = Closure::of(psi);
  const std::size_t goal = c->index(psi);
  CertifierResult result;

  std::vector<PhiType> all;
  try {
    all = frame_types(c);
  } catch (const std::length_error&) {
    result.status = SearchStatus::Budget;
    return result;
  }
  // Every world of a quasimodel starts an infinite sensible type sequence.
  std::vector<bool> live(all.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!live[i]) continue;
      bool any = false;
      for (std::size_t j = 0; j < all.size() && !any; ++j) any = live[j] && sensible_pair(all[i], all[j]);
      if (!any) {
        live[i] = false;
        changed = true;
      }
    }
    const auto before = live;
    eliminate_unwitnessed(all, live);
    changed = changed || live != before;
  }
  std::vector<PhiType> types;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (live[i]) types.push_back(all[i]);
  }
  const bool goal_live = std::any_of(types.begin(), types.end(), [&](const PhiType& t) { return t.contains(goal); });
  if (!goal_live) return result;

  std::vector<std::vector<bool>> sens(types.size(), std::vector<bool>(types.size()));
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = 0; j < types.size(); ++j) sens[i][j] = sensible_pair(types[i], types[j]);
  }

  std::vector<CertTask> tasks;
  for (std::size_t n = std::max<std::size_t>(1, min_worlds); n <= max_worlds; ++n) {
    auto orders = preorders_up_to_iso(n);
    auto edges = [](const std::vector<Row>& r) {
      int e = 0;
      for (auto x : r) e += std::popcount(x);
      return e;
    };
    std::stable_sort(orders.begin(), orders.end(),
                     [&](const auto& a, const auto& b) { return edges(a) < edges(b); });
    for (auto& o : orders) tasks.push_back({std::move(o)});
  }

  const Deadline deadline(budget);
  std::vector<CertOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), budget.workers, [&](std::size_t i) {
    CertifierSearch s(c, types, sens, goal, budget.units, deadline);
    outcomes[i] = s.run(tasks[i].order);
  });

  for (auto& out : outcomes) {
    if (budget.units != 0 && result.work + out.cost > budget.units) {
      result.status = SearchStatus::Budget;
      result.work = budget.units;
      return result;
    }
    result.work += out.cost;
    if (out.found) {
      if (!validate_quasimodel(out.model).empty() || !satisfies(out.model, psi)) {
        throw std::logic_error("certifier produced an invalid quasimodel");
      }
      result.status = SearchStatus::Found;
      result.model = std::move(out.model);
      return result;
    }
    if (out.cut) {
      result.status = SearchStatus::Budget;
      return result;
    }
  }
  result.status = SearchStatus::Exhausted;
  return result;
}

ValidityResult decide_validity(const Formula& phi, std::size_t max_depth, const Budget& budget) {
  ValidityResult res;
  const Formula goal = negate(phi);
  const auto c = Closure::of(phi);
  res.depths.resize(max_depth + 1);
  for (std::size_t N = 0; N <= max_depth; ++N) res.depths[N].depth = N;

  for (std::size_t N = 0; N <= max_depth; ++N) {
    auto cert = find_satisfying_quasimodel(goal, N + 1, budget, N + 1);
    res.depths[N].certifier = cert.status;
    res.depths[N].work += cert.work;
    res.work += cert.work;
    if (cert.status == SearchStatus::Found) {
      res.verdict = Verdict::NotValid;
      res.certificate = std::move(cert.model);
      return res;
    }
  }

  const std::size_t goal_idx = c->index(goal);
  // Type-level emptiness is cheap, so look for it at every depth before
  // spending budget on frames.
  try {
    const auto types = frame_types(c);
    const auto levels = type_path_levels(types, max_depth + 1);
    for (std::size_t N = 0; N <= max_depth; ++N) {
      bool possible = false;
      for (std::size_t i = 0; i < types.size(); ++i) {
        possible = possible || (levels[N][i] && types[i].contains(goal_idx));
      }
      if (!possible) {
        res.depths[N].families = "type-empty";
        res.verdict = Verdict::Valid;
        res.depth = N;
        return res;
      }
    }
  } catch (const std::length_error&) {
  }

  for (std::size_t N = 0; N <= max_depth; ++N) {
    DepthReport& d = res.depths[N];
    if (N == 0) {
      // A goal frame of norm ≤ |φ| is already a depth-0 family; try the
      // smallest frames first.
      const std::size_t quick = std::min<std::size_t>(2, c->length());
      std::vector<PhiType> types;
      try {
        types = frame_types(c);
      } catch (const std::length_error&) {
        d.families = "budget";
        continue;
      }
      FrameUniverse u(c, types, quick);
      std::uint64_t work = 0;
      u.run(work, budget.units);
      d.work += work;
      res.work += work;
      bool found = false;
      for (std::size_t i = 0; i < u.trees().size() && !found; ++i) {
        for (const auto& f : u.rooted(i)) found = found || f.root_type().contains(goal_idx);
      }
      if (found) {
        d.families = "exist";
        continue;
      }
    }
    auto fam = find_partial_family(c, N, goal, budget);
    d.work += fam.work;
    res.work += fam.work;
    if (fam.status == SearchStatus::Exhausted) {
      d.families = fam.note == "type-empty" ? "type-empty" : "empty";
      res.verdict = Verdict::Valid;
      res.depth = N;
      return res;
    }
    d.families = fam.status == SearchStatus::Found ? "exist" : "budget";
  }
  return res;
}

}  // namespace dtl
