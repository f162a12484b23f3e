#include "iotc/sexpr.hpp"

namespace iotc {

SyntaxError::SyntaxError(std::size_t line, std::size_t column,
                         const std::string& what)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

const std::string& SExpr::symbol() const {
  if (auto* s = std::get_if<std::string>(&value)) return *s;
  throw SyntaxError(line, column, "expected a symbol, found a list");
}

const std::vector<SExpr>& SExpr::list() const {
  if (auto* l = std::get_if<std::vector<SExpr>>(&value)) return *l;
  throw SyntaxError(line, column,
                    "expected a list, found '" + std::get<std::string>(value) + "'");
}

std::vector<SExpr> read_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> open;  // lists under construction, outermost first
  std::size_t line = 1, column = 1;
  std::size_t i = 0;

  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
      advance();
    } else if (c == '(') {
      open.push_back(SExpr{std::vector<SExpr>{}, line, column});
      advance();
    } else if (c == ')') {
      if (open.empty()) throw SyntaxError(line, column, "unbalanced ')'");
      SExpr done = std::move(open.back());
      open.pop_back();
      (open.empty() ? top : std::get<1>(open.back().value)).push_back(std::move(done));
      advance();
    } else {
      const std::size_t start_line = line, start_column = column;
      const std::size_t start = i;
      while (i < text.size()) {
        const char d = text[i];
        if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' ||
            d == '\n' || d == '\r' || d == '\f')
          break;
        advance();
      }
      std::string sym(text.substr(start, i - start));
      if (open.empty())
        throw SyntaxError(start_line, start_column, "stray token '" + sym + "'");
      std::get<1>(open.back().value)
          .push_back(SExpr{std::move(sym), start_line, start_column});
    }
  }
  if (!open.empty())
    throw SyntaxError(open.front().line, open.front().column, "unbalanced '('");
  return top;
}

std::string to_string(const SExpr& e) {
  if (e.is_symbol()) return e.symbol();
  std::string out = "(";
  bool first = true;
  for (const auto& child : e.list()) {
    if (!first) out += ' ';
    first = false;
    out += to_string(child);
  }
  out += ')';
  return out;
}

}  // namespace iotc
