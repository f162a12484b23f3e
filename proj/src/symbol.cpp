#include "iotc/symbol.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace iotc {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
}  // namespace

std::string normalize_symbol(std::string_view s, SymbolRole role) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  if (tokens.size() > 1 && std::all_of(tokens[0].begin(), tokens[0].end(), is_digit))
    tokens.erase(tokens.begin());

  std::string out;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (t) out += '_';
    out += tokens[t];
  }
  for (char& c : out)
    if (c == '(' || c == ')' || c == ';' || c == '"') c = '_';
  if (out.empty())
    throw SymbolError("'" + std::string(s) + "' normalizes to an empty symbol");
  if (out.front() == '?') out.front() = '_';

  if (role == SymbolRole::ThingId) return "SemanticWebThing_" + out;
  return out;
}

}  // namespace iotc
