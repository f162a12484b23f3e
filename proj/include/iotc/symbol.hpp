#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iotc {

class SymbolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SymbolRole {
  Plain,    // names, descriptions, units, protocol names, ...
  ThingId,  // becomes SemanticWebThing_<id>
};

/// Turns free text into a planner symbol: whitespace runs, parens and `;`
/// become `_`, a leading all-digit token followed by more tokens is dropped
/// ("02 long LED" -> long_LED), and a leading `?` is escaped so the result is
/// never a variable. Throws SymbolError when nothing is left.
std::string normalize_symbol(std::string_view s,
                             SymbolRole role = SymbolRole::Plain);

}  // namespace iotc
