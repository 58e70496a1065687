#include "dtl/finite_model.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace dtl {
namespace {

Row all_points(std::size_t n) { return n == 64 ? ~Row{0} : bit(n) - 1; }

}  // namespace

ValidationReport validate_model(const FiniteDynModel& m) {
  ValidationReport report;
  const std::size_t n = m.points;
  if (n == 0 || n > kMaxWorlds || m.order.size() != n || m.f.size() != n) {
    report.push_back({0, "size", "model needs 1..64 points with one order row and one f entry each"});
    return report;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (m.order[x] & ~all_points(n)) report.push_back({x, "size", "order row out of range"});
    if (!m.leq(x, x)) report.push_back({x, "reflexive", "x ≤ x fails"});
    for_each_bit(m.order[x] & all_points(n), [&](std::size_t y) {
      if (m.order[y] & ~m.order[x]) {
        report.push_back({x, "transitive", "≤ is not transitive through " + std::to_string(y)});
      }
    });
    if (m.f[x] >= n) report.push_back({x, "f-range", "f(x) is not a point"});
  }
  for (const auto& [name, set] : m.valuation) {
    if (set & ~all_points(n)) report.push_back({0, "valuation", "V(" + name + ") out of range"});
  }
  if (!report.empty()) return report;
  for (std::size_t x = 0; x < n; ++x) {
    for_each_bit(m.order[x], [&](std::size_t y) {
      if (!m.leq(m.f[x], m.f[y])) {
        report.push_back({x, "continuity", "x ≤ " + std::to_string(y) + " but f(x) ≰ f(" +
                                               std::to_string(y) + ")"});
      }
    });
  }
  return report;
}

PhiType Extension::type_at(std::size_t x) const {
  Bits b(closure->size());
  for (std::size_t i = 0; i < sets.size(); ++i) b.set(i, (sets[i] >> x) & 1U);
  return PhiType(closure, std::move(b));
}

Extension evaluate(const FiniteDynModel& m, const ClosurePtr& c) {
  const std::size_t n = m.points;
  const Row all = all_points(n);
  Extension ext{c, std::vector<Row>(c->size(), 0)};
  std::vector<bool> done(c->size(), false);
  std::function<Row(std::size_t)> eval = [&](std::size_t i) -> Row {
    if (done[i]) return ext.sets[i];
    const Formula& f = c->at(i);
    Row r = 0;
    switch (f.op()) {
      case Op::Var: {
        auto it = m.valuation.find(f.name());
        r = it == m.valuation.end() ? 0 : (it->second & all);
        break;
      }
      case Op::Not:
        r = all & ~eval(c->negation(i));
        break;
      case Op::And:
        r = eval(c->index(f.left())) & eval(c->index(f.right()));
        break;
      case Op::Box: {
        const Row s = eval(c->index(f.child()));
        for (std::size_t x = 0; x < n; ++x) {
          if ((m.order[x] & ~s) == 0) r |= bit(x);
        }
        break;
      }
      case Op::Next: {
        const Row s = eval(c->index(f.child()));
        for (std::size_t x = 0; x < n; ++x) {
          if ((s >> m.f[x]) & 1U) r |= bit(x);
        }
        break;
      }
      case Op::Henceforth: {
        const Row s = eval(c->index(f.child()));
        for (std::size_t x = 0; x < n; ++x) {
          // The orbit repeats after at most n steps.
          bool stays = true;
          std::size_t y = x;
          for (std::size_t k = 0; k < n && stays; ++k) {
            stays = (s >> y) & 1U;
            y = m.f[y];
          }
          if (stays) r |= bit(x);
        }
        break;
      }
    }
    ext.sets[i] = r;
    done[i] = true;
    return r;
  };
  for (std::size_t i = 0; i < c->size(); ++i) eval(i);
  return ext;
}

Extension evaluate(const FiniteDynModel& m, const Formula& phi) {
  return evaluate(m, Closure::of(phi));
}

PhiType type_of(const FiniteDynModel& m, std::size_t x, const ClosurePtr& c) {
  if (x >= m.points) throw std::out_of_range("point out of range");
  return evaluate(m, c).type_at(x);
}

namespace {

std::uint64_t encode(const std::vector<Row>& rows, const std::vector<std::size_t>& perm) {
  // perm[old] = new position.
  const std::size_t n = rows.size();
  std::uint64_t code = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for_each_bit(rows[x], [&](std::size_t y) { code |= std::uint64_t{1} << (perm[x] * n + perm[y]); });
  }
  return code;
}

std::vector<Row> decode(std::uint64_t code, std::size_t n) {
  std::vector<Row> rows(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if ((code >> (x * n + y)) & 1U) rows[x] |= bit(y);
    }
  }
  return rows;
}

std::uint64_t canonical_code(const std::vector<Row>& rows) {
  std::vector<std::size_t> perm(rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = ~std::uint64_t{0};
  do {
    best = std::min(best, encode(rows, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<std::vector<Row>> preorders_up_to_iso(std::size_t n) {
  if (n == 0) return {};
  if (n > 7) throw std::invalid_argument("preorder enumeration is limited to 7 points");
  std::vector<std::uint64_t> level{1};  // one point, reflexive
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<std::uint64_t> next;
    for (auto code : level) {
      const auto rows = decode(code, k);
      std::vector<Row> down(k, 0);
      for (std::size_t x = 0; x < k; ++x) {
        for_each_bit(rows[x], [&](std::size_t y) { down[y] |= bit(x); });
      }
      for (Row D = 0; D < bit(k); ++D) {
        bool down_closed = true;
        for_each_bit(D, [&](std::size_t x) { down_closed = down_closed && (down[x] & ~D) == 0; });
        if (!down_closed) continue;
        for (Row U = 0; U < bit(k); ++U) {
          bool ok = true;
          for_each_bit(U, [&](std::size_t y) { ok = ok && (rows[y] & ~U) == 0; });
          for_each_bit(D, [&](std::size_t x) { ok = ok && (U & ~rows[x]) == 0; });
          if (!ok) continue;
          std::vector<Row> ext(k + 1, 0);
          for (std::size_t x = 0; x < k; ++x) {
            ext[x] = rows[x];
            if ((D >> x) & 1U) ext[x] |= bit(k);
          }
          ext[k] = U | bit(k);
          next.push_back(canonical_code(ext));
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  std::vector<std::vector<Row>> out;
  for (auto code : level) out.push_back(decode(code, n));
  return out;
}

std::vector<std::vector<std::size_t>> monotone_maps(const std::vector<Row>& order) {
  const std::size_t n = order.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> f(n, 0);
  auto leq = [&](std::size_t x, std::size_t y) { return (order[x] >> y) & 1U; };
  std::function<void(std::size_t)> rec = [&](std::size_t x) {
    if (x == n) {
      out.push_back(f);
      return;
    }
    for (std::size_t y = 0; y < n; ++y) {
      f[x] = y;
      bool ok = true;
      for (std::size_t z = 0; z < x && ok; ++z) {
        if (leq(z, x) && !leq(f[z], y)) ok = false;
        if (leq(x, z) && !leq(y, f[z])) ok = false;
      }
      if (ok) rec(x + 1);
    }
  };
  rec(0);
  return out;
}

OracleResult oracle_refute(const Formula& phi, std::size_t max_points, const Budget& budget) {
  if (max_points == 0) throw std::invalid_argument("max_points must be at least 1");
  const auto c = Closure::of(phi);
  const std::size_t goal = c->index(phi);
  std::vector<std::string> vars;
  for (const auto& v : variables(phi)) vars.push_back(v);

  struct Task {
    std::vector<Row> order;
  };
  std::vector<Task> tasks;
  for (std::size_t n = 1; n <= max_points; ++n) {
    for (auto& rows : preorders_up_to_iso(n)) tasks.push_back({std::move(rows)});
  }

  struct Outcome {
    std::uint64_t cost = 0;
    bool found = false;
    bool cut = false;
    FiniteDynModel model;
    std::size_t point = 0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  const Deadline deadline(budget);

  // Each preorder class is searched on its own with the full budget; the
  // sequential replay below then yields exactly the sequential verdict.
  parallel_for(tasks.size(), budget.workers, [&](std::size_t i) {
    Outcome& out = outcomes[i];
    const auto& order = tasks[i].order;
    const std::size_t n = order.size();
    const std::size_t bits = n * vars.size();
    if (bits >= 63) {
      out.cut = true;
      return;
    }
    FiniteDynModel m;
    m.points = n;
    m.order = order;
    for (const auto& f : monotone_maps(order)) {
      m.f = f;
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
        if ((budget.units != 0 && out.cost >= budget.units) || deadline.passed()) {
          out.cut = true;
          return;
        }
        ++out.cost;
        for (std::size_t v = 0; v < vars.size(); ++v) {
          m.valuation[vars[v]] = (code >> (v * n)) & all_points(n);
        }
        const Row refuted = all_points(n) & ~evaluate(m, c).sets[goal];
        if (refuted != 0) {
          out.found = true;
          out.model = m;
          out.point = static_cast<std::size_t>(std::countr_zero(refuted));
          return;
        }
      }
    }
  });

  OracleResult result;
  for (auto& out : outcomes) {
    if (budget.units != 0 && result.work + out.cost > budget.units) {
      result.status = OracleStatus::Budget;
      result.work = budget.units;
      return result;
    }
    result.work += out.cost;
    if (out.found) {
      result.status = OracleStatus::Found;
      result.model = std::move(out.model);
      result.point = out.point;
      return result;
    }
    if (out.cut) {
      result.status = OracleStatus::Budget;
      return result;
    }
  }
  result.status = OracleStatus::Exhausted;
  return result;
}

namespace {

void check_chi_range(const SimulationCandidate& c, ValidationReport& report) {
  for (const auto& [w, x] : c.chi) {
    if (w >= c.frame.size() || x >= c.model.points) {
      report.push_back({w, "range", "pair (" + std::to_string(w) + ", " + std::to_string(x) +
                                        ") is out of range"});
    }
  }
}

}  // namespace

ValidationReport check_simulation(const SimulationCandidate& c, const ClosurePtr& closure) {
  ValidationReport report;
  check_chi_range(c, report);
  if (!report.empty()) return report;
  const auto ext = evaluate(c.model, closure);
  for (const auto& [w, x] : c.chi) {
    if (ext.type_at(x).bits() != c.frame.types[w].bits()) {
      report.push_back({w, "type", "τ(" + std::to_string(x) + ") differs from t(" +
                                       std::to_string(w) + ")"});
    }
  }
  // Preimages of principal up-sets must be R-up-closed; unions follow.
  for (const auto& [w, x] : c.chi) {
    for_each_bit(c.frame.R[w], [&](std::size_t w2) {
      const bool ok = std::any_of(c.chi.begin(), c.chi.end(), [&](const auto& p) {
        return p.first == w2 && c.model.leq(x, p.second);
      });
      if (!ok) {
        report.push_back({w, "continuity", "R " + std::to_string(w) + " " + std::to_string(w2) +
                                               " but no point above " + std::to_string(x) +
                                               " is simulated by " + std::to_string(w2)});
      }
    });
  }
  return report;
}

ValidationReport check_omega_simulation(const SimulationCandidate& c, const std::vector<Row>& g,
                                        const ClosurePtr& closure) {
  ValidationReport report = check_simulation(c, closure);
  if (g.size() != c.frame.size()) {
    report.push_back({0, "range", "g has the wrong number of rows"});
    return report;
  }
  for (const auto& [w, x] : c.chi) {
    if (w >= c.frame.size() || x >= c.model.points) continue;
    const std::size_t fx = c.model.f[x];
    const bool ok = std::any_of(c.chi.begin(), c.chi.end(), [&](const auto& p) {
      return p.second == fx && ((g[w] >> p.first) & 1U);
    });
    if (!ok) {
      report.push_back({w, "omega", "(" + std::to_string(w) + ", " + std::to_string(x) +
                                        "): no g-successor of w simulates f(x) = " +
                                        std::to_string(fx)});
    }
  }
  return report;
}

Quasimodel restrict_to_domain(const TypedFrame& frame, const std::vector<Row>& g,
                              const std::vector<std::pair<std::size_t, std::size_t>>& chi) {
  Row dom = 0;
  for (const auto& p : chi) {
    if (p.first >= frame.size()) throw std::invalid_argument("χ mentions an unknown world");
    dom |= bit(p.first);
  }
  if (dom == 0) throw std::invalid_argument("dom(χ) is empty");
  std::vector<std::size_t> index(frame.size(), SIZE_MAX);
  std::size_t k = 0;
  for_each_bit(dom, [&](std::size_t w) { index[w] = k++; });
  auto remap = [&](Row r) {
    Row out = 0;
    for_each_bit(r & dom, [&](std::size_t v) { out |= bit(index[v]); });
    return out;
  };
  Quasimodel q;
  q.frame.closure = frame.closure;
  for_each_bit(dom, [&](std::size_t w) {
    q.frame.types.push_back(frame.types[w]);
    q.frame.R.push_back(remap(frame.R[w]));
    q.g.push_back(remap(g[w]));
  });
  return q;
}

}  // namespace dtl
