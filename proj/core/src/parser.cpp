#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "dtl/formula.hpp"

namespace dtl {
namespace {

enum class Tok { Atom, Not, Box, Diamond, Next, Always, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Atom: return "atom";
    case Tok::Not: return "'!'";
    case Tok::Box: return "'[]'";
    case Tok::Diamond: return "'<>'";
    case Tok::Next: return "'X'";
    case Tok::Always: return "'*'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Utf8Alias {
  std::string_view bytes;
  Tok kind;
};

// ¬ ∧ ∨ → ↔ □ ◇ ○ ∗
constexpr Utf8Alias kAliases[] = {
    {"\xC2\xAC", Tok::Not},         {"\xE2\x88\xA7", Tok::And},     {"\xE2\x88\xA8", Tok::Or},
    {"\xE2\x86\x92", Tok::Implies}, {"\xE2\x86\x94", Tok::Iff},     {"\xE2\x96\xA1", Tok::Box},
    {"\xE2\x97\x87", Tok::Diamond}, {"\xE2\x97\x8B", Tok::Next},    {"\xE2\x88\x97", Tok::Always},
};

const std::vector<std::string> kOperandStart = {"atom", "'!'", "'[]'", "'<>'", "'X'", "'*'", "'('"};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, pos_, ""});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  bool starts(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  Token next() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    if (c >= 'a' && c <= 'z') {
      std::size_t end = pos_ + 1;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        ++end;
      }
      std::string name(text_.substr(pos_, end - pos_));
      pos_ = end;
      return {Tok::Atom, at, std::move(name)};
    }
    struct Fixed {
      std::string_view s;
      Tok kind;
    };
    static constexpr Fixed kFixed[] = {
        {"<->", Tok::Iff}, {"->", Tok::Implies}, {"[]", Tok::Box}, {"<>", Tok::Diamond},
        {"!", Tok::Not},   {"X", Tok::Next},     {"*", Tok::Always}, {"&", Tok::And},
        {"|", Tok::Or},    {"(", Tok::LParen},   {")", Tok::RParen},
    };
    for (const auto& f : kFixed) {
      if (starts(f.s)) {
        pos_ += f.s.size();
        return {f.kind, at, std::string(f.s)};
      }
    }
    for (const auto& a : kAliases) {
      if (starts(a.bytes)) {
        pos_ += a.bytes.size();
        return {a.kind, at, std::string(a.bytes)};
      }
    }
    throw ParseError(at, kOperandStart,
                     "unexpected character at byte " + std::to_string(at));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Precedence, loosest first: -> / <-> (right-assoc), |, &, unary.
class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula run() {
    Formula f = implication();
    if (peek().kind != Tok::End) fail({"'&'", "'|'", "'->'", "'<->'", "end of input"});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "syntax error at byte " + std::to_string(t.offset) + ": found " +
                      describe(t.kind) + ", expected one of";
    for (const auto& e : expected) msg += " " + e;
    throw ParseError(t.offset, std::move(expected), msg);
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) return Formula::implies(std::move(lhs), implication());
    if (accept(Tok::Iff)) return Formula::iff(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (accept(Tok::Or)) lhs = Formula::disj(std::move(lhs), conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (accept(Tok::And)) lhs = Formula::conj(std::move(lhs), unary());
    return lhs;
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: ++pos_; return Formula::neg(unary());
      case Tok::Box: ++pos_; return Formula::box(unary());
      case Tok::Diamond: ++pos_; return Formula::diamond(unary());
      case Tok::Next: ++pos_; return Formula::next(unary());
      case Tok::Always: ++pos_; return Formula::henceforth(unary());
      case Tok::Atom: ++pos_; return Formula::var(t.text);
      case Tok::LParen: {
        ++pos_;
        Formula inner = implication();
        if (!accept(Tok::RParen)) fail({"')'", "'&'", "'|'", "'->'", "'<->'"});
        return inner;
      }
      default:
        fail(kOperandStart);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(Lexer(text).run()).run(); }

}  // namespace dtl
