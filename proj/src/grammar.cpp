#include "driftlab/grammar.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace driftlab {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  CallExpr parse_top() {
    CallExpr call = parse_call();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return call;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("cannot parse '" + std::string(text_) + "' at offset " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_space();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  CallExpr parse_call() {
    CallExpr call;
    call.name = identifier();
    expect('(');
    if (peek(')')) {
      ++pos_;
      return call;
    }
    while (true) {
      std::string key = identifier();
      expect('=');
      call.args.emplace_back(std::move(key), parse_value());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(')');
      return call;
    }
  }

  GrammarValue parse_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected value");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      Vec values;
      if (!peek(']')) {
        values.push_back(number());
        while (peek(',')) {
          ++pos_;
          values.push_back(number());
        }
      }
      expect(']');
      return {values};
    }
    if (c == '"') {
      const std::size_t close = text_.find('"', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      std::string word(text_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return {word};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      return {number()};
    }
    // Identifier followed by '(' is a nested call; otherwise a bare word.
    std::size_t look = pos_;
    while (look < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[look])) || text_[look] == '_')) {
      ++look;
    }
    std::size_t after = look;
    while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
    if (look > pos_ && after < text_.size() && text_[after] == '(') {
      return {std::make_shared<CallExpr>(parse_call())};
    }
    const std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(') ++depth;
      if (d == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (d == ',' && depth == 0) break;
      ++pos_;
    }
    std::string word(text_.substr(start, pos_ - start));
    while (!word.empty() && std::isspace(static_cast<unsigned char>(word.back()))) word.pop_back();
    if (word.empty()) fail("expected value");
    return {word};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

CallExpr parse_call(std::string_view text) { return Parser(text).parse_top(); }

const GrammarValue& CallExpr::at(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return v;
  }
  throw std::invalid_argument(name + ": missing argument '" + std::string(key) + "'");
}

bool CallExpr::has(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return true;
  }
  return false;
}

double CallExpr::number(std::string_view key) const {
  const auto& v = at(key).value;
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw std::invalid_argument(name + ": argument '" + std::string(key) + "' must be a number");
}

double CallExpr::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

Vec CallExpr::vector(std::string_view key) const {
  const auto& v = at(key).value;
  if (const double* d = std::get_if<double>(&v)) return Vec{*d};
  if (const Vec* list = std::get_if<Vec>(&v)) return *list;
  throw std::invalid_argument(name + ": argument '" + std::string(key) +
                              "' must be a number or a [list]");
}

std::string CallExpr::word(std::string_view key) const {
  const auto& v = at(key).value;
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw std::invalid_argument(name + ": argument '" + std::string(key) + "' must be a word");
}

const CallExpr& CallExpr::call(std::string_view key) const {
  const auto& v = at(key).value;
  if (const auto* c = std::get_if<std::shared_ptr<CallExpr>>(&v)) return **c;
  throw std::invalid_argument(name + ": argument '" + std::string(key) + "' must be a call");
}

void CallExpr::expect_keys(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [k, v] : args) {
    bool ok = false;
    for (auto a : allowed) ok = ok || (a == k);
    if (!ok) throw std::invalid_argument(name + ": unknown argument '" + k + "'");
  }
}

}  // namespace driftlab
