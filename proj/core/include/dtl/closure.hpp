#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtl/bits.hpp"
#include "dtl/formula.hpp"

namespace dtl {

/// Signed subformula closure of a formula, with ¬¬ψ identified with ψ.
///
/// Entry order: subformulas in post-order (first occurrence), followed by
/// the negations of those subformulas that are not already present. The
/// order is stable across runs, so membership vectors can be hashed.
class Closure {
 public:
  static std::shared_ptr<const Closure> of(const Formula& phi);

  const Formula& formula() const { return formula_; }
  std::size_t size() const { return entries_.size(); }
  const Formula& at(std::size_t i) const { return entries_[i]; }
  const std::vector<Formula>& entries() const { return entries_; }

  /// |sub(φ)|, the quantity used as |φ| in all norm bounds.
  std::size_t length() const { return sub_count_; }

  std::optional<std::size_t> find(const Formula& f) const;
  std::size_t index(const Formula& f) const;  // throws std::out_of_range
  bool contains(const Formula& f) const { return find(f).has_value(); }

  /// Index of the (identified) negation of entry i.
  std::size_t negation(std::size_t i) const { return neg_[i]; }

  struct Binary {
    std::size_t self, left, right;
  };
  struct Unary {
    std::size_t self, arg;
  };
  /// ψ₁∧ψ₂ entries.
  const std::vector<Binary>& conjunctions() const { return conj_; }
  /// □ψ entries with the index of ψ.
  const std::vector<Unary>& boxes() const { return box_; }
  /// ○ψ entries with the index of ψ.
  const std::vector<Unary>& nexts() const { return next_; }
  /// ∗ψ entries with the index of ψ.
  const std::vector<Unary>& henceforths() const { return always_; }
  /// Bits of all □ψ entries.
  const Bits& box_mask() const { return box_mask_; }

  /// Entries whose top connective is not ∧, not ¬, one per negation pair.
  /// A type is determined by its values on these.
  const std::vector<std::size_t>& free_atoms() const { return free_; }

 private:
  Closure() = default;

  Formula formula_ = Formula::var("_");
  std::vector<Formula> entries_;
  std::unordered_map<Formula, std::size_t, FormulaHash> index_;
  std::vector<std::size_t> neg_;
  std::size_t sub_count_ = 0;
  std::vector<Binary> conj_;
  std::vector<Unary> box_, next_, always_;
  std::vector<std::size_t> free_;
  Bits box_mask_;
};

using ClosurePtr = std::shared_ptr<const Closure>;

/// A φ-type: membership vector over a closure.
class PhiType {
 public:
  PhiType(ClosurePtr closure, Bits members);

  const ClosurePtr& closure() const { return closure_; }
  const Bits& bits() const { return bits_; }
  bool contains(std::size_t i) const { return bits_.test(i); }
  bool contains(const Formula& f) const;

  std::vector<Formula> members() const;
  std::string to_string() const;

  /// Same closure object and same members.
  friend bool operator==(const PhiType& a, const PhiType& b) {
    return a.closure_ == b.closure_ && a.bits_ == b.bits_;
  }
  friend auto operator<=>(const PhiType& a, const PhiType& b) { return a.bits_ <=> b.bits_; }

 private:
  ClosurePtr closure_;
  Bits bits_;
};

enum class TypeCondition { Negation, Conjunction };

struct TypeViolation {
  TypeCondition condition;
  std::size_t entry;  // the ψ (or ψ₁∧ψ₂) at which the condition fails
};

/// First violated closure condition, scanning negation conditions in entry
/// order, then conjunction conditions. Empty iff the set is a φ-type.
std::optional<TypeViolation> type_violation(const Bits& set, const Closure& c);

bool is_type(const Bits& set, const Closure& c);

/// All φ-types, each once, in a fixed order (binary counting over the
/// free atoms, first atom least significant).
std::vector<PhiType> enumerate_types(const ClosurePtr& c);

/// Build a type from a partial list of members. The free atoms must all be
/// decided by `members`; conjunction entries are then derived. Returns
/// nullopt if the members are contradictory or undecided.
std::optional<PhiType> complete_type(const ClosurePtr& c, const std::vector<Formula>& members);

/// t^◇ = {ψ ∈ sub±(φ) : ◇ψ ∈ t}.
std::vector<std::size_t> type_diamond(const PhiType& t);

}  // namespace dtl
