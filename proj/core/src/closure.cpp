#include "dtl/closure.hpp"

#include <functional>
#include <stdexcept>

namespace dtl {
namespace {

// Removes every ¬¬ pair, at any depth.
Formula strip_double_negation(const Formula& f) {
  switch (f.op()) {
    case Op::Var:
      return f;
    case Op::Not:
      if (f.child().op() == Op::Not) return strip_double_negation(f.child().child());
      return Formula::neg(strip_double_negation(f.child()));
    case Op::And:
      return Formula::conj(strip_double_negation(f.left()), strip_double_negation(f.right()));
    case Op::Box:
      return Formula::box(strip_double_negation(f.child()));
    case Op::Next:
      return Formula::next(strip_double_negation(f.child()));
    case Op::Henceforth:
      return Formula::henceforth(strip_double_negation(f.child()));
  }
  return f;
}

void post_order(const Formula& f, std::vector<Formula>& out) {
  switch (f.op()) {
    case Op::Var:
      break;
    case Op::And:
      post_order(f.left(), out);
      post_order(f.right(), out);
      break;
    default:
      post_order(f.child(), out);
  }
  out.push_back(f);
}

}  // namespace

std::shared_ptr<const Closure> Closure::of(const Formula& phi) {
  std::shared_ptr<Closure> c(new Closure());
  c->formula_ = phi;

  std::vector<Formula> subs;
  post_order(phi, subs);
  auto add = [&](const Formula& f) {
    Formula g = strip_double_negation(f);
    if (c->index_.count(g) != 0) return;
    c->index_.emplace(g, c->entries_.size());
    c->entries_.push_back(std::move(g));
  };
  for (const auto& f : subs) add(f);
  c->sub_count_ = c->entries_.size();
  for (std::size_t i = 0; i < c->sub_count_; ++i) add(negate(c->entries_[i]));

  const std::size_t n = c->entries_.size();
  c->neg_.resize(n);
  c->box_mask_ = Bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Formula& f = c->entries_[i];
    c->neg_[i] = c->index(negate(f));
    switch (f.op()) {
      case Op::Not:
        break;
      case Op::And:
        c->conj_.push_back({i, c->index(f.left()), c->index(f.right())});
        break;
      case Op::Box:
        c->box_.push_back({i, c->index(f.child())});
        c->box_mask_.set(i);
        c->free_.push_back(i);
        break;
      case Op::Next:
        c->next_.push_back({i, c->index(f.child())});
        c->free_.push_back(i);
        break;
      case Op::Henceforth:
        c->always_.push_back({i, c->index(f.child())});
        c->free_.push_back(i);
        break;
      case Op::Var:
        c->free_.push_back(i);
        break;
    }
  }
  return c;
}

std::optional<std::size_t> Closure::find(const Formula& f) const {
  auto it = index_.find(strip_double_negation(f));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Closure::index(const Formula& f) const {
  if (auto i = find(f)) return *i;
  throw std::out_of_range("formula not in closure: " + f.to_string());
}

PhiType::PhiType(ClosurePtr closure, Bits members)
    : closure_(std::move(closure)), bits_(std::move(members)) {
  if (bits_.size() != closure_->size()) {
    throw std::invalid_argument("type width does not match closure size");
  }
}

bool PhiType::contains(const Formula& f) const { return bits_.test(closure_->index(f)); }

std::vector<Formula> PhiType::members() const {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < closure_->size(); ++i) {
    if (bits_.test(i)) out.push_back(closure_->at(i));
  }
  return out;
}

std::string PhiType::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& f : members()) {
    if (!first) out += ", ";
    first = false;
    out += f.to_string();
  }
  return out + "}";
}

std::optional<TypeViolation> type_violation(const Bits& set, const Closure& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (set.test(i) == set.test(c.negation(i))) {
      return TypeViolation{TypeCondition::Negation, i};
    }
  }
  for (const auto& k : c.conjunctions()) {
    if (set.test(k.self) != (set.test(k.left) && set.test(k.right))) {
      return TypeViolation{TypeCondition::Conjunction, k.self};
    }
  }
  return std::nullopt;
}

bool is_type(const Bits& set, const Closure& c) { return !type_violation(set, c).has_value(); }

namespace {

// Derive a full membership vector from values on the free atoms.
Bits saturate(const Closure& c, const std::vector<int>& value) {
  const std::size_t n = c.size();
  std::vector<int> v = value;
  std::function<int(std::size_t)> eval = [&](std::size_t i) -> int {
    if (v[i] >= 0) return v[i];
    const Formula& f = c.at(i);
    int r;
    if (f.op() == Op::Not) {
      r = 1 - eval(c.negation(i));
    } else {
      // Only conjunctions remain undecided.
      r = eval(c.index(f.left())) & eval(c.index(f.right()));
    }
    v[i] = r;
    return r;
  };
  Bits out(n);
  for (std::size_t i = 0; i < n; ++i) out.set(i, eval(i) == 1);
  return out;
}

}  // namespace

std::vector<PhiType> enumerate_types(const ClosurePtr& c) {
  const auto& free = c->free_atoms();
  if (free.size() >= 31) throw std::length_error("too many free atoms to enumerate types");
  std::vector<PhiType> out;
  const std::size_t total = std::size_t{1} << free.size();
  out.reserve(total);
  std::vector<int> value(c->size(), -1);
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t k = 0; k < free.size(); ++k) value[free[k]] = (mask >> k) & 1U;
    out.emplace_back(c, saturate(*c, value));
  }
  return out;
}

std::optional<PhiType> complete_type(const ClosurePtr& c, const std::vector<Formula>& members) {
  std::vector<int> value(c->size(), -1);
  std::vector<std::size_t> listed;
  for (const auto& f : members) {
    auto i = c->find(f);
    if (!i) throw std::out_of_range("formula not in closure: " + f.to_string());
    listed.push_back(*i);
    // Record the decision on the positive representative of the pair.
    const Formula& g = c->at(*i);
    if (g.op() == Op::Not) {
      const std::size_t pos = c->negation(*i);
      if (c->at(pos).op() != Op::And) {
        if (value[pos] == 1) return std::nullopt;
        value[pos] = 0;
      }
    } else if (g.op() != Op::And) {
      if (value[*i] == 0) return std::nullopt;
      value[*i] = 1;
    }
  }
  for (auto i : c->free_atoms()) {
    if (value[i] < 0) return std::nullopt;
  }
  Bits bits = saturate(*c, value);
  for (auto i : listed) {
    if (!bits.test(i)) return std::nullopt;
  }
  return PhiType(c, std::move(bits));
}

std::vector<std::size_t> type_diamond(const PhiType& t) {
  const Closure& c = *t.closure();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    // ◇ψ = ¬□¬ψ; it is in sub± iff □¬ψ is.
    for (const auto& b : c.boxes()) {
      if (b.arg == c.negation(i)) {
        if (!t.contains(b.self)) out.push_back(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace dtl
