#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtl/bits.hpp"
#include "dtl/closure.hpp"

namespace dtl {

/// One finding of a validator: which world, which clause, and a readable
/// explanation. An empty report means the object is well-formed.
struct ValidationIssue {
  std::size_t world;
  std::string clause;
  std::string detail;
};
using ValidationReport = std::vector<ValidationIssue>;

/// ⟨W, R, t⟩ with W = {0..n-1}. R[w] has bit v set iff R w v.
struct TypedFrame {
  ClosurePtr closure;
  std::vector<PhiType> types;
  std::vector<Row> R;

  std::size_t size() const { return types.size(); }
  bool related(std::size_t w, std::size_t v) const { return (R[w] >> v) & 1U; }
};

/// Reflexive-transitive closure of a relation given as rows.
std::vector<Row> reflexive_transitive_closure(std::vector<Row> rows);

bool is_preorder(const std::vector<Row>& rows);

/// R-axioms and the □ condition at every world. Throws std::invalid_argument
/// if some world's type belongs to a different closure than `c`.
ValidationReport validate_typed_frame(const TypedFrame& f, const ClosurePtr& c);

/// Only the □ condition, assuming R is a preorder. Cheap predicate form.
bool box_condition_holds(const TypedFrame& f);

struct FrameNorm {
  std::size_t hgt = 0;
  std::size_t wdt = 0;
  std::size_t dpt = 0;
  std::size_t norm = 0;
};

/// Rooted, tree-like, finite typed frame. Immutable; copies share state.
///
/// Construction checks that R is a preorder, that the root sees every
/// world and that the cluster quotient is a tree. It does not check the □
/// condition; use validate_typed_frame for that.
class LocalFrame {
 public:
  static LocalFrame make(TypedFrame frame, std::size_t root);

  const TypedFrame& frame() const { return impl_->frame; }
  const ClosurePtr& closure() const { return impl_->frame.closure; }
  std::size_t size() const { return impl_->frame.size(); }
  std::size_t root() const { return impl_->root; }
  const PhiType& type(std::size_t w) const { return impl_->frame.types[w]; }
  const PhiType& root_type() const { return type(root()); }
  bool related(std::size_t w, std::size_t v) const { return impl_->frame.related(w, v); }
  Row up(std::size_t w) const { return impl_->frame.R[w]; }

  /// Clusters in topological order (root cluster first), as world masks.
  const std::vector<Row>& clusters() const { return impl_->clusters; }
  std::size_t cluster_of(std::size_t w) const { return impl_->cluster_of[w]; }
  /// Immediate successor clusters of cluster c.
  const std::vector<std::size_t>& children(std::size_t c) const { return impl_->children[c]; }

  const FrameNorm& measures() const { return impl_->norm; }
  std::size_t norm() const { return impl_->norm.norm; }

  /// Equal keys iff the frames are isomorphic as rooted typed frames.
  const std::string& canonical_key() const { return impl_->key; }
  /// Key of the cluster tree without the root marker: equal iff a ∼ b.
  const std::string& unrooted_key() const { return impl_->unrooted_key; }

  std::string to_string() const;

 private:
  struct Impl {
    TypedFrame frame;
    std::size_t root = 0;
    std::vector<Row> clusters;
    std::vector<std::size_t> cluster_of;
    std::vector<std::vector<std::size_t>> children;
    FrameNorm norm;
    std::string key;
    std::string unrooted_key;
  };
  explicit LocalFrame(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// The singleton frame {t} with the reflexive relation.
LocalFrame singleton_frame(const PhiType& t);

/// 𝔞^v: restriction to the R-upset of v, rooted at v.
LocalFrame subframe(const LocalFrame& a, std::size_t v);

/// Restriction to the worlds in `keep` (which must contain the root).
LocalFrame induced_subframe(const LocalFrame& a, Row keep);

/// b ⪯ a: b is isomorphic to 𝔞^v for some v.
bool preceq(const LocalFrame& b, const LocalFrame& a);
/// a ∼ b: mutual ⪯.
bool sim(const LocalFrame& a, const LocalFrame& b);
/// b ≺₁ a: strict ⪯ with no frame strictly in between.
bool prec1(const LocalFrame& b, const LocalFrame& a);

/// Subframes 𝔞^v, one per isomorphism class, in world order of first v.
std::vector<LocalFrame> distinct_subframes(const LocalFrame& a);

/// The ∼-classes of {b : b ≺₁ a}; each class lists its members up to
/// isomorphism. Any choice of one member per class is a set of subframe
/// representatives.
std::vector<std::vector<LocalFrame>> subframe_classes(const LocalFrame& a);

/// One representative per class (the first member of each class).
std::vector<LocalFrame> subframe_representatives(const LocalFrame& a);

/// Decides a ⊴ b. The witness maps worlds of a to worlds of b injectively,
/// preserving types and R in both directions and sending root to root.
/// Throws std::invalid_argument on closure mismatch.
std::optional<std::vector<std::size_t>> embeds(const LocalFrame& a, const LocalFrame& b);

/// Memo table for ⊴ keyed by canonical forms. Safe for concurrent use.
class EmbeddingCache {
 public:
  bool embeds(const LocalFrame& a, const LocalFrame& b);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, bool> memo_;
};

/// Graphviz rendering of a frame; `extra_edges` are drawn dashed (used for
/// a temporal relation).
std::string to_dot(const TypedFrame& f, const std::vector<Row>* extra_edges = nullptr,
                   std::optional<std::size_t> root = std::nullopt);

}  // namespace dtl
