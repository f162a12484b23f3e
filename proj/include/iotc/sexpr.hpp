#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iotc {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// A symbol or a list. Positions are 1-based and refer to the first
/// character of the symbol or the opening paren.
struct SExpr {
  std::variant<std::string, std::vector<SExpr>> value;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_symbol() const { return value.index() == 0; }
  bool is_list() const { return value.index() == 1; }
  const std::string& symbol() const;
  const std::vector<SExpr>& list() const;

  /// Structural equality; positions are ignored.
  friend bool operator==(const SExpr& a, const SExpr& b) {
    return a.value == b.value;
  }
};

/// Reads every top-level form. `;` starts a line comment. Symbols at top
/// level are rejected as stray tokens.
std::vector<SExpr> read_sexprs(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace iotc
