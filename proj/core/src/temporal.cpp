#include "dtl/temporal.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <unordered_set>

namespace dtl {
namespace {

void require_same_closure(const ClosurePtr& a, const ClosurePtr& b) {
  if (a != b && a->formula() != b->formula()) {
    throw std::invalid_argument("objects are built over different closures");
  }
}

Row all_worlds(std::size_t n) { return n == 64 ? ~Row{0} : bit(n) - 1; }

std::vector<Row> down_sets(const LocalFrame& f) {
  std::vector<Row> down(f.size(), 0);
  for (std::size_t w = 0; w < f.size(); ++w) {
    for_each_bit(f.up(w), [&](std::size_t v) { down[v] |= bit(w); });
  }
  return down;
}

// Boolean search over the pair variables x_{w,v}. pos holds pairs fixed
// true, allowed the pairs not yet fixed false. Non-confluence is
// propagated as exclusions from each true pair; continuity and totality
// as requirements that are branched on.
class SuccessorSolver {
 public:
  SuccessorSolver(const LocalFrame& a, const LocalFrame& b, const SuccessorOptions& opts)
      : a_(a), b_(b), opts_(opts), down_b_(down_sets(b)) {}

  std::optional<std::vector<Row>> run() {
    State s;
    s.pos.assign(a_.size(), 0);
    s.allowed.assign(a_.size(), 0);
    for (std::size_t w = 0; w < a_.size(); ++w) {
      for (std::size_t v = 0; v < b_.size(); ++v) {
        if (sensible_pair(a_.type(w), b_.type(v))) s.allowed[w] |= bit(v);
      }
    }
    if (!set_true(s, a_.root(), b_.root())) return std::nullopt;
    return search(std::move(s));
  }

 private:
  struct State {
    std::vector<Row> pos;
    std::vector<Row> allowed;
  };

  bool set_true(State& s, std::size_t w, std::size_t v) {
    if (!((s.allowed[w] >> v) & 1U)) return false;
    s.pos[w] |= bit(v);
    for (std::size_t u = 0; u < a_.size(); ++u) {
      if (!a_.related(w, u)) s.allowed[u] &= ~b_.up(v);
      if (!a_.related(u, w)) s.allowed[u] &= ~down_b_[v];
      if (s.pos[u] & ~s.allowed[u]) return false;
    }
    return true;
  }

  bool propagate(State& s) {
    const std::size_t n = a_.size();
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t w = 0; w < n; ++w) {
        if (s.allowed[w] == 0) return false;
        if (s.pos[w] == 0 && std::popcount(s.allowed[w]) == 1) {
          if (!set_true(s, w, std::countr_zero(s.allowed[w]))) return false;
          changed = true;
        }
      }
      for (std::size_t w = 0; w < n; ++w) {
        bool ok = true;
        for_each_bit(s.pos[w], [&](std::size_t v) {
          if (!ok) return;
          for_each_bit(a_.up(w) & ~bit(w), [&](std::size_t u) {
            if (!ok) return;
            const Row c = s.allowed[u] & b_.up(v);
            if (c == 0) {
              ok = false;
            } else if ((s.pos[u] & b_.up(v)) == 0 && std::popcount(c) == 1) {
              if (!set_true(s, u, std::countr_zero(c))) ok = false;
              changed = true;
            }
          });
        });
        if (!ok) return false;
      }
      // A pair whose continuity requirement is already unsatisfiable can
      // never be true.
      for (std::size_t w = 0; w < n; ++w) {
        for_each_bit(s.allowed[w] & ~s.pos[w], [&](std::size_t v) {
          bool dead = false;
          for_each_bit(a_.up(w) & ~bit(w), [&](std::size_t u) {
            if ((s.allowed[u] & b_.up(v)) == 0) dead = true;
          });
          if (dead) {
            s.allowed[w] &= ~bit(v);
            changed = true;
          }
        });
      }
    }
    return true;
  }

  std::optional<std::vector<Row>> search(State s) {
    ++nodes_;
    if (opts_.work) ++*opts_.work;
    if (opts_.node_limit != 0 && nodes_ > opts_.node_limit) {
      throw SearchLimit("temporal successor search exceeded its node limit");
    }
    if (!propagate(s)) return std::nullopt;

    // Open requirement with the fewest candidates.
    std::size_t best_world = 0;
    Row best = 0;
    int best_count = 65;
    const std::size_t n = a_.size();
    for (std::size_t w = 0; w < n; ++w) {
      if (s.pos[w] == 0 && std::popcount(s.allowed[w]) < best_count) {
        best_count = std::popcount(s.allowed[w]);
        best = s.allowed[w];
        best_world = w;
      }
    }
    for (std::size_t w = 0; w < n; ++w) {
      for_each_bit(s.pos[w], [&](std::size_t v) {
        for_each_bit(a_.up(w) & ~bit(w), [&](std::size_t u) {
          if ((s.pos[u] & b_.up(v)) != 0) return;
          const Row c = s.allowed[u] & b_.up(v);
          if (std::popcount(c) < best_count) {
            best_count = std::popcount(c);
            best = c;
            best_world = u;
          }
        });
      });
    }
    if (best_count == 65) return s.pos;

    const std::size_t v = std::countr_zero(best);
    {
      State take = s;
      if (set_true(take, best_world, v)) {
        if (auto r = search(std::move(take))) return r;
      }
    }
    s.allowed[best_world] &= ~bit(v);
    return search(std::move(s));
  }

  const LocalFrame& a_;
  const LocalFrame& b_;
  const SuccessorOptions& opts_;
  std::vector<Row> down_b_;
  std::size_t nodes_ = 0;
};

}  // namespace

bool sensible_pair(const PhiType& t, const PhiType& s) {
  require_same_closure(t.closure(), s.closure());
  const Closure& c = *t.closure();
  for (const auto& x : c.nexts()) {
    if (t.contains(x.self) != s.contains(x.arg)) return false;
  }
  for (const auto& x : c.henceforths()) {
    if (t.contains(x.self) != (t.contains(x.arg) && s.contains(x.self))) return false;
  }
  return true;
}

bool is_total(const FrameRelation& rel) {
  for (std::size_t w = 0; w < rel.source.size(); ++w) {
    if (rel.pairs[w] == 0) return false;
  }
  return true;
}

bool is_sensible(const FrameRelation& rel) {
  for (std::size_t w = 0; w < rel.source.size(); ++w) {
    bool ok = true;
    for_each_bit(rel.pairs[w], [&](std::size_t v) {
      if (!sensible_pair(rel.source.type(w), rel.target.type(v))) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

bool is_continuous(const FrameRelation& rel) {
  for (std::size_t w = 0; w < rel.source.size(); ++w) {
    bool ok = true;
    for_each_bit(rel.pairs[w], [&](std::size_t v) {
      for_each_bit(rel.source.up(w), [&](std::size_t w2) {
        if ((rel.pairs[w2] & rel.target.up(v)) == 0) ok = false;
      });
    });
    if (!ok) return false;
  }
  return true;
}

bool is_non_confluent(const FrameRelation& rel) {
  const std::size_t n = rel.source.size();
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t w2 = 0; w2 < n; ++w2) {
      if (rel.source.related(w, w2)) continue;
      bool bad = false;
      for_each_bit(rel.pairs[w], [&](std::size_t v) {
        if (rel.pairs[w2] & rel.target.up(v)) bad = true;
      });
      if (bad) return false;
    }
  }
  return true;
}

bool is_successor_witness(const FrameRelation& rel) {
  if (rel.pairs.size() != rel.source.size()) return false;
  const Row in_range = all_worlds(rel.target.size());
  for (auto r : rel.pairs) {
    if (r & ~in_range) return false;
  }
  return rel.contains(rel.source.root(), rel.target.root()) && is_total(rel) &&
         is_sensible(rel) && is_continuous(rel) && is_non_confluent(rel);
}

std::optional<FrameRelation> temporal_successor(const LocalFrame& a, const LocalFrame& b,
                                                const SuccessorOptions& opts) {
  require_same_closure(a.closure(), b.closure());
  if (!sensible_pair(a.root_type(), b.root_type())) return std::nullopt;
  SuccessorSolver solver(a, b, opts);
  auto pairs = solver.run();
  if (!pairs) return std::nullopt;
  return FrameRelation{a, b, std::move(*pairs)};
}

bool SuccessorCache::successor(const LocalFrame& a, const LocalFrame& b, std::size_t* work) {
  std::string key = a.canonical_key();
  key += '>';
  key += b.canonical_key();
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  SuccessorOptions opts;
  opts.work = work;
  const bool r = temporal_successor(a, b, opts).has_value();
  std::lock_guard lock(mu_);
  memo_.emplace(std::move(key), r);
  return r;
}

std::size_t SuccessorCache::size() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

LocalFrame reduce_successor(const LocalFrame& a, const LocalFrame& b, std::size_t state_limit) {
  if (!temporal_successor(a, b)) {
    throw std::invalid_argument("reduce_successor requires a temporal successor pair");
  }
  const std::size_t bound = a.norm() + a.closure()->length();
  if (b.norm() <= bound) return b;

  // Breadth-first over induced subframes containing the root: each move
  // deletes one world or the whole up-set of a world outside the root
  // cluster. Fewest moves first.
  const Row root_cluster = b.clusters()[b.cluster_of(b.root())];
  std::deque<Row> queue{all_worlds(b.size())};
  std::unordered_set<Row> seen{queue.front()};
  while (!queue.empty()) {
    const Row keep = queue.front();
    queue.pop_front();
    std::vector<Row> next;
    for_each_bit(keep & ~bit(b.root()), [&](std::size_t x) {
      next.push_back(keep & ~bit(x));
      if (!((root_cluster >> x) & 1U)) next.push_back(keep & ~b.up(x));
    });
    for (Row k : next) {
      if (!seen.insert(k).second) continue;
      if (seen.size() > state_limit) {
        throw SearchLimit("successor reduction exceeded its state limit");
      }
      LocalFrame d = induced_subframe(b, k);
      if (d.norm() <= bound && box_condition_holds(d.frame()) && temporal_successor(a, d)) {
        return d;
      }
      queue.push_back(k);
    }
  }
  throw std::logic_error("no reduced successor exists");
}

LocalFrame oplus(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A,
                 const PhiType& t) {
  if (T.empty()) throw std::invalid_argument("oplus requires a nonempty T");
  std::vector<PhiType> cluster;
  for (const auto& s : T) {
    if (std::find(cluster.begin(), cluster.end(), s) == cluster.end()) cluster.push_back(s);
  }
  auto it = std::find(cluster.begin(), cluster.end(), t);
  if (it == cluster.end()) throw std::invalid_argument("oplus root type is not in T");
  std::size_t total = cluster.size();
  for (const auto& a : A) {
    require_same_closure(a.closure(), t.closure());
    total += a.size();
  }
  if (total > kMaxWorlds) throw std::invalid_argument("frame has more than 64 worlds");

  TypedFrame f;
  f.closure = t.closure();
  for (const auto& s : cluster) {
    f.types.push_back(s);
    f.R.push_back(all_worlds(total));
  }
  std::size_t offset = cluster.size();
  for (const auto& a : A) {
    for (std::size_t w = 0; w < a.size(); ++w) {
      f.types.push_back(a.type(w));
      f.R.push_back(a.up(w) << offset);
    }
    offset += a.size();
  }
  return LocalFrame::make(std::move(f), static_cast<std::size_t>(it - cluster.begin()));
}

bool is_coherent(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A) {
  if (T.empty()) return true;
  const Closure& c = *T.front().closure();
  for (const auto& b : c.boxes()) {
    bool rhs = true;
    for (const auto& s : T) rhs = rhs && s.contains(b.arg);
    for (const auto& a : A) rhs = rhs && a.root_type().contains(b.self);
    for (const auto& t : T) {
      if (t.contains(b.self) != rhs) return false;
    }
  }
  return true;
}

bool admits(const std::vector<PhiType>& T, const std::vector<LocalFrame>& A, const PhiType& t,
            const LocalFrame& b) {
  if (!sensible_pair(b.root_type(), t)) return false;
  for (const auto& a : A) {
    if (temporal_successor(b, a)) return true;
  }
  bool partners = true;
  for_each_bit(b.clusters()[b.cluster_of(b.root())], [&](std::size_t w) {
    const bool any = std::any_of(T.begin(), T.end(),
                                 [&](const PhiType& s) { return sensible_pair(b.type(w), s); });
    partners = partners && any;
  });
  if (!partners) return false;

  // Choosing one member per class independently reduces the existence of
  // representatives plus injection to a bipartite matching.
  const auto classes = subframe_classes(b);
  std::vector<std::vector<std::size_t>> edges(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (std::size_t j = 0; j < A.size(); ++j) {
      for (const auto& c : classes[k]) {
        if (temporal_successor(c, A[j])) {
          edges[k].push_back(j);
          break;
        }
      }
    }
  }
  std::vector<std::size_t> owner(A.size(), SIZE_MAX);
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t k, std::vector<bool>& visited) -> bool {
    for (auto j : edges[k]) {
      if (visited[j]) continue;
      visited[j] = true;
      if (owner[j] == SIZE_MAX || augment(owner[j], visited)) {
        owner[j] = k;
        return true;
      }
    }
    return false;
  };
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<bool> visited(A.size(), false);
    if (!augment(k, visited)) return false;
  }
  return true;
}

}  // namespace dtl
