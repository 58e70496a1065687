#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtl {

enum class Op : unsigned char { Var, Not, And, Box, Next, Henceforth };

/// Immutable DTL formula over the primitive connectives. Derived
/// connectives are desugared by the parser and never stored.
///
/// Copies share structure; equality is structural.
class Formula {
 public:
  static Formula var(std::string name);
  static Formula neg(Formula f);
  static Formula conj(Formula l, Formula r);
  static Formula box(Formula f);
  static Formula next(Formula f);
  static Formula henceforth(Formula f);

  // Sugar, expanded on construction.
  static Formula disj(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);
  static Formula iff(Formula l, Formula r);
  static Formula diamond(Formula f);

  Op op() const;
  const std::string& name() const;  // Var only
  const Formula& child() const;     // unary only
  const Formula& left() const;      // And only
  const Formula& right() const;     // And only

  std::size_t hash() const;
  /// Number of nodes in the tree (with repetition).
  std::size_t tree_size() const;

  /// Concrete ASCII syntax; parse(to_string()) reproduces the tree.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  static Formula make(Op op, std::vector<Formula> kids);
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

/// ¬ with ¬¬ψ identified with ψ.
Formula negate(const Formula& f);

/// Names of propositional variables occurring in f, sorted.
std::set<std::string> variables(const Formula& f);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Parse the ASCII (or UTF-8 symbol) concrete syntax.
/// Throws ParseError with a byte offset and the set of expected tokens.
Formula parse(std::string_view text);

}  // namespace dtl
