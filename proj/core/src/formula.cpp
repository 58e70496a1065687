#include "dtl/formula.hpp"

#include <cassert>
#include <functional>
#include <utility>

namespace dtl {

struct Formula::Node {
  Op op;
  std::string name;
  std::vector<Formula> kids;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->hash = mix(17, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::make(Op op, std::vector<Formula> kids) {
  auto n = std::make_shared<Node>();
  n->op = op;
  std::size_t h = mix(31, static_cast<std::size_t>(op));
  for (const auto& k : kids) {
    h = mix(h, k.hash());
    n->size += k.tree_size();
  }
  n->hash = h;
  n->kids = std::move(kids);
  return Formula(std::move(n));
}

Formula Formula::neg(Formula f) { return make(Op::Not, {std::move(f)}); }
Formula Formula::conj(Formula l, Formula r) { return make(Op::And, {std::move(l), std::move(r)}); }
Formula Formula::box(Formula f) { return make(Op::Box, {std::move(f)}); }
Formula Formula::next(Formula f) { return make(Op::Next, {std::move(f)}); }
Formula Formula::henceforth(Formula f) { return make(Op::Henceforth, {std::move(f)}); }

Formula Formula::disj(Formula l, Formula r) {
  return neg(conj(neg(std::move(l)), neg(std::move(r))));
}

Formula Formula::implies(Formula l, Formula r) {
  return neg(conj(std::move(l), neg(std::move(r))));
}

Formula Formula::iff(Formula l, Formula r) {
  return conj(implies(l, r), implies(r, l));
}

Formula Formula::diamond(Formula f) { return neg(box(neg(std::move(f)))); }

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }
const Formula& Formula::child() const { return node_->kids[0]; }
const Formula& Formula::left() const { return node_->kids[0]; }
const Formula& Formula::right() const { return node_->kids[1]; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::tree_size() const { return node_->size; }

bool operator==(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return true;
  if (x.node_->hash != y.node_->hash || x.node_->size != y.node_->size) return false;
  return (x <=> y) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return std::strong_ordering::equal;
  if (auto c = x.op() <=> y.op(); c != 0) return c;
  switch (x.op()) {
    case Op::Var:
      return x.name().compare(y.name()) <=> 0;
    case Op::And:
      if (auto c = x.left() <=> y.left(); c != 0) return c;
      return x.right() <=> y.right();
    default:
      return x.child() <=> y.child();
  }
}

Formula negate(const Formula& f) {
  if (f.op() == Op::Not) return f.child();
  return Formula::neg(f);
}

namespace {

void collect_vars(const Formula& f, std::set<std::string>& out) {
  switch (f.op()) {
    case Op::Var:
      out.insert(f.name());
      return;
    case Op::And:
      collect_vars(f.left(), out);
      collect_vars(f.right(), out);
      return;
    default:
      collect_vars(f.child(), out);
  }
}

void print(const Formula& f, std::string& out) {
  switch (f.op()) {
    case Op::Var:
      out += f.name();
      return;
    case Op::And: {
      // & is left-associative: only a right-hand conjunction needs brackets.
      print(f.left(), out);
      out += " & ";
      const bool paren = f.right().op() == Op::And;
      if (paren) out += '(';
      print(f.right(), out);
      if (paren) out += ')';
      return;
    }
    case Op::Not:
      out += '!';
      break;
    case Op::Box:
      out += "[]";
      break;
    case Op::Next:
      out += 'X';
      break;
    case Op::Henceforth:
      out += '*';
      break;
  }
  const bool paren = f.child().op() == Op::And;
  if (paren) out += '(';
  print(f.child(), out);
  if (paren) out += ')';
}

}  // namespace

std::set<std::string> variables(const Formula& f) {
  std::set<std::string> out;
  collect_vars(f, out);
  return out;
}

std::string Formula::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

}  // namespace dtl
