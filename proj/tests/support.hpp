// Shared helpers for the test suites: generators and brute-force oracles
// that do not reuse the library's search code.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dtl/closure.hpp"
#include "dtl/finite_model.hpp"
#include "dtl/formula.hpp"
#include "dtl/frames.hpp"
#include "dtl/quasimodel.hpp"
#include "dtl/temporal.hpp"

namespace support {

using dtl::Formula;
using dtl::Row;
using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline Formula random_formula(Rng& rng, const std::vector<std::string>& vars, int depth,
                              bool temporal = true, bool modal = true) {
  if (depth == 0 || coin(rng, 0.25)) return Formula::var(vars[pick(rng, vars.size())]);
  std::vector<int> ops = {0, 1, 2, 3};
  if (modal) ops.push_back(4), ops.push_back(5);
  if (temporal) ops.push_back(6), ops.push_back(7);
  switch (ops[pick(rng, ops.size())]) {
    case 0: return Formula::neg(random_formula(rng, vars, depth - 1, temporal, modal));
    case 1: return Formula::conj(random_formula(rng, vars, depth - 1, temporal, modal),
                                 random_formula(rng, vars, depth - 1, temporal, modal));
    case 2: return Formula::disj(random_formula(rng, vars, depth - 1, temporal, modal),
                                 random_formula(rng, vars, depth - 1, temporal, modal));
    case 3: return Formula::implies(random_formula(rng, vars, depth - 1, temporal, modal),
                                    random_formula(rng, vars, depth - 1, temporal, modal));
    case 4: return Formula::box(random_formula(rng, vars, depth - 1, temporal, modal));
    case 5: return Formula::diamond(random_formula(rng, vars, depth - 1, temporal, modal));
    case 6: return Formula::next(random_formula(rng, vars, depth - 1, temporal, modal));
    default: return Formula::henceforth(random_formula(rng, vars, depth - 1, temporal, modal));
  }
}

inline dtl::PhiType type_of_members(const dtl::ClosurePtr& c, const std::vector<std::string>& members) {
  std::vector<Formula> fs;
  for (const auto& m : members) fs.push_back(dtl::parse(m));
  auto t = dtl::complete_type(c, fs);
  if (!t) throw std::invalid_argument("incomplete type in test fixture");
  return *t;
}

// Independent truth-table check for formulas without modal/temporal
// operators.
inline bool eval_prop(const Formula& f, const std::map<std::string, bool>& v) {
  switch (f.op()) {
    case dtl::Op::Var: return v.at(f.name());
    case dtl::Op::Not: return !eval_prop(f.child(), v);
    case dtl::Op::And: return eval_prop(f.left(), v) && eval_prop(f.right(), v);
    default: throw std::invalid_argument("not propositional");
  }
}

inline bool is_tautology(const Formula& f) {
  const auto vars = dtl::variables(f);
  const std::vector<std::string> names(vars.begin(), vars.end());
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << names.size()); ++a) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = (a >> i) & 1U;
    if (!eval_prop(f, v)) return false;
  }
  return true;
}

// Random cluster tree on n worlds: each world joins an earlier world's
// cluster or becomes a child cluster of an earlier world. World 0 is the
// root.
inline std::vector<Row> random_tree_order(Rng& rng, std::size_t n) {
  std::vector<std::size_t> parent(n, 0);
  std::vector<bool> same(n, false);
  for (std::size_t w = 1; w < n; ++w) {
    parent[w] = pick(rng, w);
    same[w] = coin(rng, 0.3);
  }
  std::vector<Row> edges(n, 0);
  for (std::size_t w = 0; w < n; ++w) edges[w] |= dtl::bit(w);
  for (std::size_t w = 1; w < n; ++w) {
    edges[parent[w]] |= dtl::bit(w);
    if (same[w]) edges[w] |= dtl::bit(parent[w]);
  }
  return dtl::reflexive_transitive_closure(edges);
}

// Types satisfying the □ condition on `order`: non-□ atoms are random,
// □ entries are computed from the frame.
inline std::vector<dtl::PhiType> random_box_types(Rng& rng, const dtl::ClosurePtr& c,
                                                  const std::vector<Row>& order) {
  const std::size_t n = order.size();
  std::vector<std::vector<char>> val(n, std::vector<char>(c->size(), 0));
  std::vector<bool> done(c->size(), false);
  std::function<void(std::size_t)> compute = [&](std::size_t i) {
    if (done[i]) return;
    const Formula& f = c->at(i);
    switch (f.op()) {
      case dtl::Op::Not: {
        const std::size_t j = c->index(f.child());
        compute(j);
        for (std::size_t w = 0; w < n; ++w) val[w][i] = !val[w][j];
        break;
      }
      case dtl::Op::And: {
        const std::size_t l = c->index(f.left()), r = c->index(f.right());
        compute(l);
        compute(r);
        for (std::size_t w = 0; w < n; ++w) val[w][i] = val[w][l] && val[w][r];
        break;
      }
      case dtl::Op::Box: {
        const std::size_t a = c->index(f.child());
        compute(a);
        for (std::size_t w = 0; w < n; ++w) {
          bool all = true;
          dtl::for_each_bit(order[w], [&](std::size_t v) { all = all && val[v][a]; });
          val[w][i] = all;
        }
        break;
      }
      default:
        for (std::size_t w = 0; w < n; ++w) val[w][i] = coin(rng);
    }
    done[i] = true;
  };
  for (std::size_t i = 0; i < c->size(); ++i) compute(i);
  std::vector<dtl::PhiType> out;
  for (std::size_t w = 0; w < n; ++w) {
    dtl::Bits b(c->size());
    for (std::size_t i = 0; i < c->size(); ++i) b.set(i, val[w][i]);
    out.emplace_back(c, b);
  }
  return out;
}

inline dtl::LocalFrame random_local_frame(Rng& rng, const dtl::ClosurePtr& c, std::size_t n) {
  dtl::TypedFrame f;
  f.closure = c;
  f.R = random_tree_order(rng, n);
  f.types = random_box_types(rng, c, f.R);
  return dtl::LocalFrame::make(f, 0);
}

// Random local frame whose types are drawn from `pool` (□ condition not
// enforced).
inline dtl::LocalFrame random_loose_frame(Rng& rng, const std::vector<dtl::PhiType>& pool,
                                          std::size_t n) {
  dtl::TypedFrame f;
  f.closure = pool.front().closure();
  f.R = random_tree_order(rng, n);
  for (std::size_t w = 0; w < n; ++w) f.types.push_back(pool[pick(rng, pool.size())]);
  return dtl::LocalFrame::make(f, 0);
}

// ⊴ by trying every map W_a → W_b.
inline bool brute_embeds(const dtl::LocalFrame& a, const dtl::LocalFrame& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n > m) return false;
  std::vector<std::size_t> map(n, 0);
  while (true) {
    bool ok = map[a.root()] == b.root();
    std::set<std::size_t> used(map.begin(), map.end());
    ok = ok && used.size() == n;
    for (std::size_t x = 0; ok && x < n; ++x) {
      ok = a.type(x) == b.type(map[x]);
      for (std::size_t y = 0; ok && y < n; ++y) ok = a.related(x, y) == b.related(map[x], map[y]);
    }
    if (ok) return true;
    std::size_t i = 0;
    while (i < n && ++map[i] == m) map[i++] = 0;
    if (i == n) return false;
  }
}

// The ⇉ conditions, written out directly from their definitions.
inline bool brute_is_witness(const dtl::LocalFrame& a, const dtl::LocalFrame& b,
                             const std::vector<Row>& g) {
  const std::size_t n = a.size();
  if (!((g[a.root()] >> b.root()) & 1U)) return false;
  for (std::size_t w = 0; w < n; ++w) {
    if (g[w] == 0) return false;
    for (std::size_t v = 0; v < b.size(); ++v) {
      if (!((g[w] >> v) & 1U)) continue;
      if (!dtl::sensible_pair(a.type(w), b.type(v))) return false;
      for (std::size_t w2 = 0; w2 < n; ++w2) {
        if (!a.related(w, w2)) continue;
        bool square = false;
        for (std::size_t v2 = 0; v2 < b.size(); ++v2) {
          square = square || (b.related(v, v2) && ((g[w2] >> v2) & 1U));
        }
        if (!square) return false;
      }
      for (std::size_t w2 = 0; w2 < n; ++w2) {
        for (std::size_t v2 = 0; v2 < b.size(); ++v2) {
          if (((g[w2] >> v2) & 1U) && b.related(v, v2) && !a.related(w, w2)) return false;
        }
      }
    }
  }
  return true;
}

inline bool brute_successor(const dtl::LocalFrame& a, const dtl::LocalFrame& b) {
  const std::size_t n = a.size(), m = b.size();
  const std::size_t cells = n * m;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    std::vector<Row> g(n, 0);
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t v = 0; v < m; ++v) {
        if ((mask >> (w * m + v)) & 1U) g[w] |= dtl::bit(v);
      }
    }
    if (brute_is_witness(a, b, g)) return true;
  }
  return false;
}

// Semantics with ∗ as a greatest fixpoint: X = ⟦ψ⟧ ∩ f⁻¹(X).
inline Row fixpoint_eval(const dtl::FiniteDynModel& m, const Formula& f) {
  const std::size_t n = m.points;
  const Row all = n == 64 ? ~Row{0} : (Row{1} << n) - 1;
  auto preimage = [&](Row s) {
    Row out = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if ((s >> m.f[x]) & 1U) out |= dtl::bit(x);
    }
    return out;
  };
  switch (f.op()) {
    case dtl::Op::Var: {
      auto it = m.valuation.find(f.name());
      return it == m.valuation.end() ? 0 : it->second;
    }
    case dtl::Op::Not: return all & ~fixpoint_eval(m, f.child());
    case dtl::Op::And: return fixpoint_eval(m, f.left()) & fixpoint_eval(m, f.right());
    case dtl::Op::Box: {
      const Row s = fixpoint_eval(m, f.child());
      Row out = 0;
      for (std::size_t x = 0; x < n; ++x) {
        if ((m.order[x] & s) == m.order[x]) out |= dtl::bit(x);
      }
      return out;
    }
    case dtl::Op::Next: return preimage(fixpoint_eval(m, f.child()));
    case dtl::Op::Henceforth: {
      const Row s = fixpoint_eval(m, f.child());
      Row x = all;
      while (true) {
        const Row next = s & preimage(x);
        if (next == x) return x;
        x = next;
      }
    }
  }
  return 0;
}

// Every model with at most max_points points over `vars`: all labeled
// preorders, all monotone maps, all valuations.
inline void for_each_model(std::size_t max_points, const std::vector<std::string>& vars,
                           const std::function<void(const dtl::FiniteDynModel&)>& visit) {
  for (std::size_t n = 1; n <= max_points; ++n) {
    const std::size_t cells = n * n;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
      std::vector<Row> order(n, 0);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if ((mask >> (x * n + y)) & 1U) order[x] |= dtl::bit(y);
        }
      }
      if (!dtl::is_preorder(order)) continue;
      std::vector<std::size_t> f(n, 0);
      while (true) {
        bool mono = true;
        for (std::size_t x = 0; x < n && mono; ++x) {
          for (std::size_t y = 0; y < n && mono; ++y) {
            if (((order[x] >> y) & 1U) && !((order[f[x]] >> f[y]) & 1U)) mono = false;
          }
        }
        if (mono) {
          const std::size_t bits = n * vars.size();
          for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
            dtl::FiniteDynModel m;
            m.points = n;
            m.order = order;
            m.f = f;
            for (std::size_t k = 0; k < vars.size(); ++k) {
              m.valuation[vars[k]] = (v >> (k * n)) & ((Row{1} << n) - 1);
            }
            visit(m);
          }
        }
        std::size_t i = 0;
        while (i < n && ++f[i] == n) f[i++] = 0;
        if (i == n) break;
      }
    }
  }
}

}  // namespace support
