#include "dtl/frame_enum.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace dtl {

FrameUniverse::FrameUniverse(ClosurePtr c, std::vector<PhiType> types, std::size_t norm_bound,
                             std::function<bool(const Tree&)> admissible)
    : closure_(std::move(c)),
      types_(std::move(types)),
      bound_(norm_bound),
      admissible_(std::move(admissible)) {
  if (closure_->boxes().size() > 64) throw std::invalid_argument("more than 64 □-entries");
}

namespace {

struct Budgeted {
  std::uint64_t& work;
  std::uint64_t limit;
  const Deadline* deadline;

  // Charges one unit; false once the budget is spent.
  bool charge() {
    ++work;
    if (limit != 0 && work > limit) return false;
    if (deadline && (work & 0xFFF) == 0 && deadline->passed()) return false;
    return true;
  }
};

struct OutOfBudget {};

}  // namespace

void FrameUniverse::build_clusters(const std::function<bool()>& charge) {
  const auto& boxes = closure_->boxes();
  auto box_bits = [&](const PhiType& t) {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      if (t.contains(boxes[k].self)) m |= std::uint64_t{1} << k;
    }
    return m;
  };
  auto arg_bits = [&](const PhiType& t) {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      if (t.contains(boxes[k].arg)) m |= std::uint64_t{1} << k;
    }
    return m;
  };
  // Types in one cluster agree on every □-entry.
  std::map<std::uint64_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < types_.size(); ++i) groups[box_bits(types_[i])].push_back(i);

  std::vector<std::uint64_t> args(types_.size());
  for (std::size_t i = 0; i < types_.size(); ++i) args[i] = arg_bits(types_[i]);

  for (const auto& [profile, members] : groups) {
    std::vector<std::uint32_t> current;
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t start, std::uint64_t a) {
      if (!charge()) throw OutOfBudget{};
      if (!current.empty()) {
        // A □ψ held by the cluster needs ψ throughout it.
        if ((profile & ~a) == 0) clusters_.push_back({current, profile, a});
      }
      if (current.size() == std::min(bound_, world_cap_)) return;
      for (std::size_t j = start; j < members.size(); ++j) {
        const std::uint64_t na = a & args[members[j]];
        if ((profile & ~na) != 0) continue;
        current.push_back(members[j]);
        rec(j, na);
        current.pop_back();
      }
    };
    rec(0, ~std::uint64_t{0});
  }
}

EnumStatus FrameUniverse::run(std::uint64_t& work, std::uint64_t limit, const Deadline* deadline) {
  Budgeted budget{work, limit, deadline};
  // Clusters wider than kMaxWorlds are never built.
  bool overflow = bound_ > kMaxWorlds && world_cap_ == kMaxWorlds;
  const bool capped = world_cap_ < kMaxWorlds;
  const std::size_t nboxes = closure_->boxes().size();
  const std::uint64_t all_boxes = nboxes == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << nboxes) - 1;
  try {
    build_clusters([&] { return budget.charge(); });
    // Height one.
    for (const auto& c : clusters_) {
      if (!budget.charge()) throw OutOfBudget{};
      if ((c.boxes & all_boxes) != (c.args & all_boxes)) continue;
      Tree t;
      t.cluster = c.types;
      t.hgt = 1;
      t.wdt = 1;
      t.dpt = static_cast<std::uint32_t>(c.types.size());
      t.worlds = t.dpt;
      t.boxes = c.boxes;
      if (t.worlds > world_cap_) {
        overflow = overflow || !capped;
        continue;
      }
      if (!admissible_ || admissible_(t)) trees_.push_back(std::move(t));
    }
    std::size_t level_begin = 0;
    for (std::uint32_t h = 2; h <= bound_; ++h) {
      const std::size_t level_end = trees_.size();
      if (level_end == level_begin) break;
      std::vector<std::uint32_t> chosen;
      std::function<void(std::size_t, std::uint32_t, bool, std::uint64_t, std::uint32_t, std::uint32_t)>
          rec = [&](std::size_t start, std::uint32_t width, bool has_top, std::uint64_t child_boxes,
                    std::uint32_t worlds, std::uint32_t dpt) {
            if (!budget.charge()) throw OutOfBudget{};
            if (has_top) {
              for (const auto& c : clusters_) {
                if (!budget.charge()) throw OutOfBudget{};
                if ((c.boxes & all_boxes) != (c.args & child_boxes & all_boxes)) continue;
                Tree t;
                t.cluster = c.types;
                t.children = chosen;
                t.hgt = h;
                t.wdt = width;
                t.dpt = std::max<std::uint32_t>(dpt, static_cast<std::uint32_t>(c.types.size()));
                t.worlds = worlds + static_cast<std::uint32_t>(c.types.size());
                t.boxes = c.boxes;
                if (t.worlds > world_cap_) {
                  overflow = overflow || !capped;
                  continue;
                }
                if (!admissible_ || admissible_(t)) trees_.push_back(std::move(t));
              }
            }
            for (std::size_t j = start; j < level_end; ++j) {
              const Tree& child = trees_[j];
              if (width + child.wdt > bound_) continue;
              if (capped && worlds + child.worlds >= world_cap_) continue;
              chosen.push_back(static_cast<std::uint32_t>(j));
              rec(j, width + child.wdt, has_top || j >= level_begin, child_boxes & child.boxes,
                  worlds + child.worlds, std::max(dpt, child.dpt));
              chosen.pop_back();
            }
          };
      rec(0, 0, false, all_boxes, 0, 0);
      level_begin = level_end;
    }
  } catch (const OutOfBudget&) {
    return EnumStatus::Budget;
  }
  return overflow ? EnumStatus::Budget : EnumStatus::Complete;
}

void FrameUniverse::emit(std::size_t tree, TypedFrame& f, std::vector<Row>& below,
                         std::size_t& next) const {
  const Tree& t = trees_[tree];
  const std::size_t first = next;
  Row cluster = 0;
  for (auto ty : t.cluster) {
    f.types.push_back(types_[ty]);
    f.R.push_back(0);
    cluster |= bit(next++);
  }
  Row subtree = cluster;
  for (auto ch : t.children) {
    const std::size_t start = next;
    emit(ch, f, below, next);
    for (std::size_t w = start; w < next; ++w) subtree |= bit(w);
  }
  for (std::size_t w = first; w < first + t.cluster.size(); ++w) f.R[w] = subtree;
  below.push_back(subtree);
}

std::vector<LocalFrame> FrameUniverse::rooted(std::size_t tree) const {
  TypedFrame f;
  f.closure = closure_;
  std::vector<Row> below;
  std::size_t next = 0;
  emit(tree, f, below, next);
  std::vector<LocalFrame> out;
  const Tree& t = trees_[tree];
  for (std::size_t i = 0; i < t.cluster.size(); ++i) {
    if (i > 0 && t.cluster[i] == t.cluster[i - 1]) continue;
    out.push_back(LocalFrame::make(f, i));
  }
  return out;
}

EnumStatus enumerate_frames(const ClosurePtr& c, std::size_t K,
                            const std::function<bool(const LocalFrame&)>& pred,
                            const std::function<void(const LocalFrame&)>& sink,
                            std::uint64_t work_limit) {
  FrameUniverse u(c, enumerate_types(c), (K + 1) * c->length());
  std::uint64_t work = 0;
  const EnumStatus status = u.run(work, work_limit);
  for (std::size_t i = 0; i < u.trees().size(); ++i) {
    for (const auto& f : u.rooted(i)) {
      if (!pred || pred(f)) sink(f);
    }
  }
  return status;
}

}  // namespace dtl
