#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dtl/budget.hpp"
#include "dtl/frames.hpp"

namespace dtl {

enum class EnumStatus { Complete, Budget };

/// Bottom-up generator of tree-like typed frames, one per isomorphism
/// class of unrooted cluster trees. Clusters are multisets of types; a
/// tree is a cluster plus a multiset of child trees.
class FrameUniverse {
 public:
  struct Tree {
    std::vector<std::uint32_t> cluster;   // indices into types(), sorted
    std::vector<std::uint32_t> children;  // tree ids, sorted
    std::uint32_t hgt = 0;
    std::uint32_t wdt = 0;
    std::uint32_t dpt = 0;
    std::uint32_t worlds = 0;
    std::uint64_t boxes = 0;  // □-entries true throughout the root cluster

    std::uint32_t norm() const { return std::max({hgt, wdt, dpt}); }
  };

  /// `admissible` may reject a tree; rejected trees are not used as
  /// children either, so it must be closed under taking subtrees.
  FrameUniverse(ClosurePtr c, std::vector<PhiType> types, std::size_t norm_bound,
                std::function<bool(const Tree&)> admissible = {});

  /// Generates every tree. `work` is charged one unit per (cluster,
  /// children) combination examined; stops with Budget once `limit` (if
  /// nonzero) is reached or the deadline passes.
  EnumStatus run(std::uint64_t& work, std::uint64_t limit, const Deadline* deadline = nullptr);

  /// Only trees with at most `n` worlds; larger ones are skipped without
  /// affecting the status. Call before run().
  void set_world_cap(std::size_t n) { world_cap_ = std::min(n, kMaxWorlds); }

  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<PhiType>& types() const { return types_; }

  /// The rooted frames of one tree: one per distinct root-cluster type.
  std::vector<LocalFrame> rooted(std::size_t tree) const;

 private:
  struct ClusterShape {
    std::vector<std::uint32_t> types;
    std::uint64_t boxes;    // uniform □ values
    std::uint64_t args;     // □ψ whose ψ holds throughout the cluster
  };
  void build_clusters(const std::function<bool()>& charge);
  void emit(std::size_t tree, TypedFrame& f, std::vector<Row>& below, std::size_t& next) const;

  ClosurePtr closure_;
  std::vector<PhiType> types_;
  std::size_t bound_;
  std::size_t world_cap_ = kMaxWorlds;
  std::function<bool(const Tree&)> admissible_;
  std::vector<ClusterShape> clusters_;
  std::vector<Tree> trees_;
};

/// Streams every tree-like local frame with norm ≤ (K+1)|φ| over all
/// φ-types that satisfies the □ condition and `pred`, once per rooted
/// isomorphism class. Frames with more than 64 worlds are skipped and make
/// the status Budget.
EnumStatus enumerate_frames(const ClosurePtr& c, std::size_t K,
                            const std::function<bool(const LocalFrame&)>& pred,
                            const std::function<void(const LocalFrame&)>& sink,
                            std::uint64_t work_limit = 0);

}  // namespace dtl
