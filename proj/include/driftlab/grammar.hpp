#pragma once

#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "driftlab/vec.hpp"

namespace driftlab {

struct CallExpr;

/// Argument value in the call grammar: a number, a bracketed list of numbers,
/// a bare word (file paths) or a nested call.
struct GrammarValue {
  std::variant<double, Vec, std::string, std::shared_ptr<CallExpr>> value;
};

/// `name(key=value, ...)`. Used by the kernel and measure config strings.
struct CallExpr {
  std::string name;
  std::vector<std::pair<std::string, GrammarValue>> args;

  bool has(std::string_view key) const;
  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  /// Accepts either a list or a single number (promoted to a 1-vector).
  Vec vector(std::string_view key) const;
  std::string word(std::string_view key) const;
  const CallExpr& call(std::string_view key) const;
  /// Throws std::invalid_argument naming the first key not in `allowed`.
  void expect_keys(std::initializer_list<std::string_view> allowed) const;

 private:
  const GrammarValue& at(std::string_view key) const;
};

/// Throws std::invalid_argument with the offending position on malformed text.
CallExpr parse_call(std::string_view text);

}  // namespace driftlab
