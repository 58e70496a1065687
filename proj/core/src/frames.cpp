#include "dtl/frames.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace dtl {

std::vector<Row> reflexive_transitive_closure(std::vector<Row> rows) {
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) rows[i] |= bit(i);
  // Warshall over bit rows.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((rows[i] >> k) & 1U) rows[i] |= rows[k];
    }
  }
  return rows;
}

bool is_preorder(const std::vector<Row>& rows) {
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!((rows[i] >> i) & 1U)) return false;
    bool ok = true;
    for_each_bit(rows[i], [&](std::size_t j) {
      if ((rows[j] & ~rows[i]) != 0) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

bool box_condition_holds(const TypedFrame& f) {
  const auto& boxes = f.closure->boxes();
  for (std::size_t w = 0; w < f.size(); ++w) {
    for (const auto& b : boxes) {
      bool all = true;
      for_each_bit(f.R[w], [&](std::size_t v) {
        if (!f.types[v].contains(b.arg)) all = false;
      });
      if (f.types[w].contains(b.self) != all) return false;
    }
  }
  return true;
}

ValidationReport validate_typed_frame(const TypedFrame& f, const ClosurePtr& c) {
  ValidationReport report;
  const std::size_t n = f.size();
  if (n > kMaxWorlds) throw std::invalid_argument("frame has more than 64 worlds");
  if (f.R.size() != n) throw std::invalid_argument("relation size does not match world count");
  for (std::size_t w = 0; w < n; ++w) {
    if (f.types[w].closure() != c && f.types[w].closure()->formula() != c->formula()) {
      throw std::invalid_argument("type of world " + std::to_string(w) +
                                  " is built over a different closure");
    }
  }
  for (std::size_t w = 0; w < n; ++w) {
    if (!f.related(w, w)) report.push_back({w, "reflexive", "R w w fails"});
    for_each_bit(f.R[w], [&](std::size_t v) {
      const Row missing = f.R[v] & ~f.R[w];
      if (missing != 0) {
        report.push_back({w, "transitive",
                          "R " + std::to_string(w) + " " + std::to_string(v) + " and R " +
                              std::to_string(v) + " " +
                              std::to_string(std::countr_zero(missing)) + " but not R " +
                              std::to_string(w) + " " +
                              std::to_string(std::countr_zero(missing))});
      }
    });
  }
  for (std::size_t w = 0; w < n; ++w) {
    if (auto v = type_violation(f.types[w].bits(), *c)) {
      report.push_back({w, "type", "not a φ-type at " + c->at(v->entry).to_string()});
    }
    for (const auto& b : c->boxes()) {
      std::optional<std::size_t> counter;
      for_each_bit(f.R[w], [&](std::size_t v) {
        if (!counter && !f.types[v].contains(b.arg)) counter = v;
      });
      const bool has = f.types[w].contains(b.self);
      if (has && counter) {
        report.push_back({w, "box", c->at(b.self).to_string() + " in t(w) but " +
                                        c->at(b.arg).to_string() + " fails at world " +
                                        std::to_string(*counter)});
      } else if (!has && !counter) {
        report.push_back({w, "box", c->at(b.self).to_string() +
                                        " not in t(w) but its argument holds at every successor"});
      }
    }
  }
  return report;
}

namespace {

struct ClusterInfo {
  std::vector<Row> clusters;
  std::vector<std::size_t> cluster_of;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::optional<std::size_t>> parent;
};

// Cluster quotient; clusters sorted so that ancestors come first. Returns
// nullopt if the quotient is not a tree.
std::optional<ClusterInfo> quotient(const TypedFrame& f) {
  const std::size_t n = f.size();
  std::vector<Row> down(n, 0);
  for (std::size_t w = 0; w < n; ++w) {
    for_each_bit(f.R[w], [&](std::size_t v) { down[v] |= bit(w); });
  }
  ClusterInfo info;
  info.cluster_of.assign(n, SIZE_MAX);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Larger up-sets first; ties broken by index.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(f.R[a]) > std::popcount(f.R[b]);
  });
  for (auto w : order) {
    if (info.cluster_of[w] != SIZE_MAX) continue;
    const Row members = f.R[w] & down[w];
    const std::size_t id = info.clusters.size();
    info.clusters.push_back(members);
    for_each_bit(members, [&](std::size_t v) { info.cluster_of[v] = id; });
  }
  const std::size_t k = info.clusters.size();
  info.children.assign(k, {});
  info.parent.assign(k, std::nullopt);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t rep = static_cast<std::size_t>(std::countr_zero(info.clusters[c]));
    const Row strict_down = down[rep] & ~info.clusters[c];
    // Strict predecessors must form a chain.
    std::vector<std::size_t> preds;
    for_each_bit(strict_down, [&](std::size_t v) {
      const std::size_t pc = info.cluster_of[v];
      if (std::find(preds.begin(), preds.end(), pc) == preds.end()) preds.push_back(pc);
    });
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (std::size_t j = i + 1; j < preds.size(); ++j) {
        const std::size_t a = std::countr_zero(info.clusters[preds[i]]);
        const std::size_t b = std::countr_zero(info.clusters[preds[j]]);
        if (!f.related(a, b) && !f.related(b, a)) return std::nullopt;
      }
    }
    if (!preds.empty()) {
      // Immediate predecessor: the one with the smallest up-set.
      std::size_t best = preds.front();
      for (auto p : preds) {
        if (std::popcount(f.R[std::countr_zero(info.clusters[p])]) <
            std::popcount(f.R[std::countr_zero(info.clusters[best])])) {
          best = p;
        }
      }
      info.parent[c] = best;
      info.children[best].push_back(c);
    }
  }
  return info;
}

std::string cluster_key(const TypedFrame& f, const ClusterInfo& info, std::size_t c) {
  std::vector<std::string> types;
  for_each_bit(info.clusters[c], [&](std::size_t w) { types.push_back(f.types[w].bits().hex()); });
  std::sort(types.begin(), types.end());
  std::vector<std::string> kids;
  for (auto ch : info.children[c]) kids.push_back(cluster_key(f, info, ch));
  std::sort(kids.begin(), kids.end());
  std::string out = "(";
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += ',';
    out += types[i];
  }
  out += ';';
  for (const auto& k : kids) out += k;
  out += ')';
  return out;
}

std::size_t cluster_height(const ClusterInfo& info, std::size_t c) {
  std::size_t h = 0;
  for (auto ch : info.children[c]) h = std::max(h, cluster_height(info, ch));
  return h + 1;
}

}  // namespace

LocalFrame LocalFrame::make(TypedFrame frame, std::size_t root) {
  const std::size_t n = frame.size();
  if (n == 0) throw std::invalid_argument("local frame must have at least one world");
  if (n > kMaxWorlds) throw std::invalid_argument("frame has more than 64 worlds");
  if (frame.R.size() != n) throw std::invalid_argument("relation size does not match world count");
  if (root >= n) throw std::invalid_argument("root out of range");
  if (!is_preorder(frame.R)) throw std::invalid_argument("R is not reflexive and transitive");
  const Row all = (n == 64) ? ~Row{0} : (bit(n) - 1);
  if (frame.R[root] != all) {
    throw std::invalid_argument("root does not see every world");
  }
  auto info = quotient(frame);
  if (!info) throw std::invalid_argument("frame is not tree-like");

  auto impl = std::make_shared<Impl>();
  impl->root = root;
  impl->clusters = info->clusters;
  impl->cluster_of = info->cluster_of;
  impl->children = info->children;

  FrameNorm& m = impl->norm;
  m.hgt = cluster_height(*info, 0);
  m.wdt = 0;
  m.dpt = 0;
  for (std::size_t c = 0; c < info->clusters.size(); ++c) {
    if (info->children[c].empty()) ++m.wdt;  // leaves = maximum antichain in a tree
    m.dpt = std::max<std::size_t>(m.dpt, std::popcount(info->clusters[c]));
  }
  m.norm = std::max({m.hgt, m.wdt, m.dpt});

  impl->unrooted_key = cluster_key(frame, *info, 0);
  impl->key = frame.types[root].bits().hex() + ":" + impl->unrooted_key;
  impl->frame = std::move(frame);
  return LocalFrame(std::move(impl));
}

std::string LocalFrame::to_string() const {
  std::ostringstream os;
  os << "frame(root=" << root() << ", norm=" << norm() << ") {";
  for (std::size_t w = 0; w < size(); ++w) {
    os << "\n  " << w << ": " << type(w).to_string() << " ->";
    for_each_bit(up(w), [&](std::size_t v) { os << ' ' << v; });
  }
  os << "\n}";
  return os.str();
}

LocalFrame singleton_frame(const PhiType& t) {
  TypedFrame f{t.closure(), {t}, {bit(0)}};
  return LocalFrame::make(std::move(f), 0);
}

LocalFrame induced_subframe(const LocalFrame& a, Row keep) {
  if (!((keep >> a.root()) & 1U)) throw std::invalid_argument("induced subframe must keep the root");
  std::vector<std::size_t> index(a.size(), SIZE_MAX);
  std::vector<std::size_t> worlds;
  for_each_bit(keep, [&](std::size_t w) {
    index[w] = worlds.size();
    worlds.push_back(w);
  });
  TypedFrame f;
  f.closure = a.closure();
  for (auto w : worlds) {
    f.types.push_back(a.type(w));
    Row r = 0;
    for_each_bit(a.up(w) & keep, [&](std::size_t v) { r |= bit(index[v]); });
    f.R.push_back(r);
  }
  return LocalFrame::make(std::move(f), index[a.root()]);
}

LocalFrame subframe(const LocalFrame& a, std::size_t v) {
  if (v >= a.size()) throw std::out_of_range("world out of range");
  const Row keep = a.up(v);
  std::vector<std::size_t> index(a.size(), SIZE_MAX);
  std::vector<std::size_t> worlds;
  for_each_bit(keep, [&](std::size_t w) {
    index[w] = worlds.size();
    worlds.push_back(w);
  });
  TypedFrame f;
  f.closure = a.closure();
  for (auto w : worlds) {
    f.types.push_back(a.type(w));
    Row r = 0;
    for_each_bit(a.up(w), [&](std::size_t u) { r |= bit(index[u]); });
    f.R.push_back(r);
  }
  return LocalFrame::make(std::move(f), index[v]);
}

std::vector<LocalFrame> distinct_subframes(const LocalFrame& a) {
  std::vector<LocalFrame> out;
  std::vector<std::string> seen;
  for (std::size_t v = 0; v < a.size(); ++v) {
    LocalFrame s = subframe(a, v);
    if (std::find(seen.begin(), seen.end(), s.canonical_key()) != seen.end()) continue;
    seen.push_back(s.canonical_key());
    out.push_back(std::move(s));
  }
  return out;
}

bool preceq(const LocalFrame& b, const LocalFrame& a) {
  if (b.size() > a.size()) return false;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (std::popcount(a.up(v)) != static_cast<int>(b.size())) continue;
    if (a.type(v) != b.root_type()) continue;
    if (subframe(a, v).canonical_key() == b.canonical_key()) return true;
  }
  return false;
}

bool sim(const LocalFrame& a, const LocalFrame& b) {
  return a.unrooted_key() == b.unrooted_key();
}

namespace {

bool strictly_below(const LocalFrame& b, const LocalFrame& a) {
  return preceq(b, a) && !sim(a, b);
}

}  // namespace

bool prec1(const LocalFrame& b, const LocalFrame& a) {
  if (!strictly_below(b, a)) return false;
  for (const auto& c : distinct_subframes(a)) {
    if (strictly_below(b, c) && strictly_below(c, a)) return false;
  }
  return true;
}

std::vector<std::vector<LocalFrame>> subframe_classes(const LocalFrame& a) {
  std::vector<std::vector<LocalFrame>> classes;
  const auto subs = distinct_subframes(a);
  for (const auto& b : subs) {
    if (!strictly_below(b, a)) continue;
    bool immediate = true;
    for (const auto& c : subs) {
      if (strictly_below(b, c) && strictly_below(c, a)) {
        immediate = false;
        break;
      }
    }
    if (!immediate) continue;
    auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& cls) {
      return cls.front().unrooted_key() == b.unrooted_key();
    });
    if (it == classes.end()) {
      classes.push_back({b});
    } else {
      it->push_back(b);
    }
  }
  return classes;
}

std::vector<LocalFrame> subframe_representatives(const LocalFrame& a) {
  std::vector<LocalFrame> out;
  for (auto& cls : subframe_classes(a)) out.push_back(cls.front());
  return out;
}

std::optional<std::vector<std::size_t>> embeds(const LocalFrame& a, const LocalFrame& b) {
  if (a.closure() != b.closure() && a.closure()->formula() != b.closure()->formula()) {
    throw std::invalid_argument("embedding between frames over different closures");
  }
  if (a.size() > b.size()) return std::nullopt;
  if (a.root_type() != b.root_type()) return std::nullopt;
  const auto& ma = a.measures();
  const auto& mb = b.measures();
  if (ma.hgt > mb.hgt || ma.wdt > mb.wdt || ma.dpt > mb.dpt) return std::nullopt;

  // Place the root first, then the remaining worlds cluster by cluster
  // (clusters are topologically ordered), larger clusters first among
  // siblings so that depth conflicts surface early.
  std::vector<std::size_t> order{a.root()};
  std::vector<std::size_t> cl(a.clusters().size());
  for (std::size_t i = 0; i < cl.size(); ++i) cl[i] = i;
  std::stable_sort(cl.begin() + 1, cl.end(), [&](std::size_t x, std::size_t y) {
    return std::popcount(a.clusters()[x]) > std::popcount(a.clusters()[y]);
  });
  // Keep ancestors before descendants: a stable sort by size could break
  // that, so re-sort by depth of the cluster as primary key.
  std::vector<std::size_t> depth(cl.size(), 0);
  for (std::size_t c = 0; c < cl.size(); ++c) {
    for (auto ch : a.children(c)) depth[ch] = depth[c] + 1;
  }
  std::stable_sort(cl.begin(), cl.end(),
                   [&](std::size_t x, std::size_t y) { return depth[x] < depth[y]; });
  for (auto c : cl) {
    for_each_bit(a.clusters()[c], [&](std::size_t w) {
      if (w != a.root()) order.push_back(w);
    });
  }

  std::vector<std::size_t> map(a.size(), SIZE_MAX);
  Row used = 0;
  std::function<bool(std::size_t)> place = [&](std::size_t k) -> bool {
    if (k == order.size()) return true;
    const std::size_t w = order[k];
    Row candidates = (k == 0) ? bit(b.root()) : ~used;
    if (b.size() < 64) candidates &= bit(b.size()) - 1;
    bool found = false;
    for_each_bit(candidates, [&](std::size_t x) {
      if (found) return;
      if (b.type(x) != a.type(w)) return;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t u = order[j];
        if (a.related(u, w) != b.related(map[u], x)) return;
        if (a.related(w, u) != b.related(x, map[u])) return;
      }
      map[w] = x;
      used |= bit(x);
      if (place(k + 1)) {
        found = true;
        return;
      }
      used &= ~bit(x);
      map[w] = SIZE_MAX;
    });
    return found;
  };
  if (!place(0)) return std::nullopt;
  return map;
}

bool EmbeddingCache::embeds(const LocalFrame& a, const LocalFrame& b) {
  std::string key = a.canonical_key();
  key += '|';
  key += b.canonical_key();
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const bool r = dtl::embeds(a, b).has_value();
  std::lock_guard lock(mu_);
  memo_.emplace(std::move(key), r);
  return r;
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

std::string to_dot(const TypedFrame& f, const std::vector<Row>* extra_edges,
                   std::optional<std::size_t> root) {
  std::ostringstream os;
  os << "digraph frame {\n  rankdir=BT;\n";
  for (std::size_t w = 0; w < f.size(); ++w) {
    std::string label = f.types[w].to_string();
    std::string escaped;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') escaped += '\\';
      escaped += ch;
    }
    os << "  w" << w << " [label=\"" << w << ": " << escaped << "\"";
    if (root && *root == w) os << ", shape=doublecircle";
    os << "];\n";
  }
  // Draw only the Hasse-like skeleton: skip reflexive and implied edges.
  for (std::size_t w = 0; w < f.size(); ++w) {
    for_each_bit(f.R[w], [&](std::size_t v) {
      if (v == w) return;
      bool implied = false;
      for_each_bit(f.R[w], [&](std::size_t u) {
        if (u != w && u != v && f.related(u, v) && !f.related(u, w) && !f.related(v, u)) {
          implied = true;
        }
      });
      if (!implied) os << "  w" << w << " -> w" << v << " [label=\"R\"];\n";
    });
  }
  if (extra_edges) {
    for (std::size_t w = 0; w < extra_edges->size(); ++w) {
      for_each_bit((*extra_edges)[w], [&](std::size_t v) {
        os << "  w" << w << " -> w" << v << " [style=dashed, label=\"g\"];\n";
      });
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace dtl
