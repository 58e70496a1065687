#include "dtl/quasimodel.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <stdexcept>

#include "dtl/finite_model.hpp"
#include "dtl/temporal.hpp"

namespace dtl {

std::vector<Row> reachability(const std::vector<Row>& g) { return reflexive_transitive_closure(g); }

ValidationReport validate_quasimodel(const Quasimodel& q) {
  const Closure& c = *q.closure();
  ValidationReport report = validate_typed_frame(q.frame, q.closure());
  const std::size_t n = q.size();
  if (q.g.size() != n) {
    report.push_back({0, "g-range", "g has " + std::to_string(q.g.size()) + " rows for " +
                                        std::to_string(n) + " worlds"});
    return report;
  }
  const Row in_range = n == 64 ? ~Row{0} : bit(n) - 1;
  bool range_ok = true;
  for (std::size_t w = 0; w < n; ++w) {
    if (q.g[w] & ~in_range) {
      report.push_back({w, "g-range", "g points outside the world set"});
      range_ok = false;
    }
  }
  if (!range_ok) return report;

  for (std::size_t w = 0; w < n; ++w) {
    if (q.g[w] == 0) report.push_back({w, "g-total", "g(w) is empty"});
    for_each_bit(q.g[w], [&](std::size_t v) {
      if (!sensible_pair(q.frame.types[w], q.frame.types[v])) {
        report.push_back({w, "sensible", "pair (" + std::to_string(w) + ", " + std::to_string(v) +
                                             ") is not sensible"});
      }
      for_each_bit(q.frame.R[w], [&](std::size_t w2) {
        if ((q.g[w2] & q.frame.R[v]) == 0) {
          report.push_back({w, "continuity", "g " + std::to_string(w) + " " + std::to_string(v) +
                                                 " and R " + std::to_string(w) + " " +
                                                 std::to_string(w2) + " cannot be completed"});
        }
      });
    });
  }

  const auto reach = reachability(q.g);
  for (std::size_t w = 0; w < n; ++w) {
    for (const auto& h : c.henceforths()) {
      bool witness = false;
      for_each_bit(reach[w], [&](std::size_t v) {
        if (!q.frame.types[v].contains(h.arg)) witness = true;
      });
      const bool eventuality = !q.frame.types[w].contains(h.self);
      const std::string name = c.at(c.negation(h.self)).to_string();
      if (eventuality && !witness) {
        report.push_back({w, "omega-sensible",
                          name + " in t(w) but no g-reachable world refutes " +
                              c.at(h.arg).to_string()});
      } else if (!eventuality && witness) {
        report.push_back({w, "omega-sensible",
                          name + " not in t(w) but a g-reachable world refutes " +
                              c.at(h.arg).to_string()});
      }
    }
  }
  return report;
}

std::optional<std::size_t> satisfies(const Quasimodel& q, const Formula& psi) {
  const std::size_t i = q.closure()->index(psi);
  for (std::size_t w = 0; w < q.size(); ++w) {
    if (q.frame.types[w].contains(i)) return w;
  }
  return std::nullopt;
}

bool is_g_path(const Quasimodel& q, const std::vector<std::size_t>& path) {
  for (auto w : path) {
    if (w >= q.size()) return false;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!q.step(path[i], path[i + 1])) return false;
  }
  return true;
}

bool is_g_path(const Quasimodel& q, const LassoPath& p) {
  if (p.cycle.empty()) return false;
  std::vector<std::size_t> flat = p.prefix;
  flat.insert(flat.end(), p.cycle.begin(), p.cycle.end());
  flat.push_back(p.cycle.front());
  return is_g_path(q, flat);
}

bool is_realizing(const Quasimodel& q, const LassoPath& p) {
  if (!is_g_path(q, p)) return false;
  const Closure& c = *q.closure();
  const std::size_t horizon = p.prefix.size() + 2 * p.cycle.size();
  for (std::size_t n = 0; n < p.prefix.size() + p.cycle.size(); ++n) {
    for (const auto& h : c.henceforths()) {
      if (q.frame.types[p.at(n)].contains(h.self)) continue;
      bool realized = false;
      for (std::size_t k = n; k < horizon && !realized; ++k) {
        realized = !q.frame.types[p.at(k)].contains(h.arg);
      }
      if (!realized) return false;
    }
  }
  return true;
}

namespace {

// Shortest g-path from `from` (exclusive) to a world refuting entry `arg`.
std::vector<std::size_t> shortest_witness(const Quasimodel& q, std::size_t from, std::size_t arg) {
  const std::size_t n = q.size();
  std::vector<std::size_t> parent(n, SIZE_MAX);
  std::deque<std::size_t> queue;
  // Start from the successors so that the witness path is nonempty.
  for_each_bit(q.g[from], [&](std::size_t v) {
    if (parent[v] == SIZE_MAX) {
      parent[v] = from;
      queue.push_back(v);
    }
  });
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    if (!q.frame.types[x].contains(arg)) {
      std::vector<std::size_t> out;
      for (std::size_t y = x;; y = parent[y]) {
        out.insert(out.begin(), y);
        if (parent[y] == from) break;
      }
      return out;
    }
    for_each_bit(q.g[x], [&](std::size_t v) {
      if (parent[v] == SIZE_MAX) {
        parent[v] = x;
        queue.push_back(v);
      }
    });
  }
  throw std::logic_error("eventuality has no g-reachable witness");
}

// One round from start world x: the segment that follows x.
std::vector<std::size_t> round_from(const Quasimodel& q, std::size_t x) {
  const Closure& c = *q.closure();
  std::vector<std::size_t> segment;
  std::size_t current = x;
  auto seen_refutation = [&](std::size_t arg) {
    if (!q.frame.types[x].contains(arg)) return true;
    for (auto y : segment) {
      if (!q.frame.types[y].contains(arg)) return true;
    }
    return false;
  };
  for (const auto& h : c.henceforths()) {
    if (q.frame.types[x].contains(h.self)) continue;
    if (seen_refutation(h.arg)) continue;
    auto path = shortest_witness(q, current, h.arg);
    segment.insert(segment.end(), path.begin(), path.end());
    current = segment.back();
  }
  if (segment.empty()) {
    if (q.g[x] == 0) throw std::logic_error("g is not total");
    segment.push_back(static_cast<std::size_t>(std::countr_zero(q.g[x])));
  }
  return segment;
}

}  // namespace

LassoPath extend_to_realizing(const Quasimodel& q, const std::vector<std::size_t>& path) {
  if (path.empty()) throw std::invalid_argument("path must be nonempty");
  if (!is_g_path(q, path)) throw std::invalid_argument("path is not a g-path");

  std::vector<std::size_t> full = path;
  std::map<std::size_t, std::size_t> start_position;  // round-start world -> index in full
  std::size_t x = path.back();
  std::size_t pos = path.size() - 1;
  while (true) {
    auto [it, fresh] = start_position.emplace(x, pos);
    if (!fresh) {
      LassoPath out;
      out.prefix.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(it->second) + 1);
      out.cycle.assign(full.begin() + static_cast<std::ptrdiff_t>(it->second) + 1,
                       full.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
      return normalize(std::move(out));
    }
    auto segment = round_from(q, x);
    full.insert(full.end(), segment.begin(), segment.end());
    pos += segment.size();
    x = segment.back();
  }
}

std::vector<std::size_t> lift_path(const Quasimodel& q, const std::vector<std::size_t>& path,
                                   std::size_t v0) {
  if (path.empty() || !is_g_path(q, path)) throw std::invalid_argument("path is not a g-path");
  if (v0 >= q.size() || !q.frame.related(path.front(), v0)) {
    throw std::invalid_argument("lift start is not R-above the path start");
  }
  std::vector<std::size_t> out{v0};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Row options = q.g[out.back()] & q.frame.R[path[i]];
    if (options == 0) throw std::logic_error("square completion failed; g is not continuous");
    out.push_back(static_cast<std::size_t>(std::countr_zero(options)));
  }
  return out;
}

LassoPath normalize(LassoPath p) {
  if (p.cycle.empty()) return p;
  const std::size_t c = p.cycle.size();
  for (std::size_t d = 1; d < c; ++d) {
    if (c % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < c && periodic; ++i) periodic = p.cycle[i] == p.cycle[i - d];
    if (periodic) {
      p.cycle.resize(d);
      break;
    }
  }
  while (!p.prefix.empty() && p.prefix.back() == p.cycle.back()) {
    std::rotate(p.cycle.rbegin(), p.cycle.rbegin() + 1, p.cycle.rend());
    p.prefix.pop_back();
  }
  return p;
}

LassoPath shift(const LassoPath& p) {
  LassoPath out = p;
  if (!out.prefix.empty()) {
    out.prefix.erase(out.prefix.begin());
  } else if (!out.cycle.empty()) {
    std::rotate(out.cycle.begin(), out.cycle.begin() + 1, out.cycle.end());
  }
  return out;
}

bool basis_member(const Quasimodel& q, const LassoPath& center, std::size_t N,
                  const LassoPath& candidate) {
  for (std::size_t n = 0; n <= N; ++n) {
    if (!q.frame.related(center.at(n), candidate.at(n))) return false;
  }
  return true;
}

Quasimodel from_finite_model(const FiniteDynModel& m, const ClosurePtr& c) {
  const auto ext = evaluate(m, c);
  Quasimodel q;
  q.frame.closure = c;
  for (std::size_t x = 0; x < m.points; ++x) {
    q.frame.types.push_back(ext.type_at(x));
    q.frame.R.push_back(m.order[x]);
    q.g.push_back(bit(m.f[x]));
  }
  return q;
}

Quasimodel from_finite_model(const FiniteDynModel& m, const Formula& phi) {
  return from_finite_model(m, Closure::of(phi));
}

}  // namespace dtl
