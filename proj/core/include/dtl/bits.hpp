#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dtl {

/// Fixed-width bit vector sized at construction. Used for type membership
/// vectors over a closure.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool none() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  /// True iff every bit of *this is also set in other.
  bool subset_of(const Bits& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~other.words_[i]) return false;
    }
    return true;
  }

  void set_all() {
    for (auto& w : words_) w = ~std::uint64_t{0};
    trim();
  }

  Bits& operator&=(const Bits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Bits& operator|=(const Bits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
  friend Bits operator|(Bits a, const Bits& b) { return a |= b; }

  friend bool operator==(const Bits&, const Bits&) = default;
  friend auto operator<=>(const Bits& a, const Bits& b) {
    return a.words_ <=> b.words_;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  std::size_t hash() const {
    std::size_t h = size_;
    for (auto w : words_) h = h * 0x9e3779b97f4a7c15ULL + std::hash<std::uint64_t>{}(w);
    return h;
  }

  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(words_.size() * 16);
    for (auto w : words_) {
      for (int shift = 60; shift >= 0; shift -= 4) out.push_back(kDigits[(w >> shift) & 0xF]);
    }
    return out;
  }

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Row of a relation over at most 64 worlds.
using Row = std::uint64_t;
inline constexpr std::size_t kMaxWorlds = 64;

inline constexpr Row bit(std::size_t i) { return Row{1} << i; }

template <class F>
void for_each_bit(Row row, F&& f) {
  while (row != 0) {
    const int i = std::countr_zero(row);
    f(static_cast<std::size_t>(i));
    row &= row - 1;
  }
}

}  // namespace dtl
