#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace iotc {

/// Raised by load_vocabulary. `line()` is 1-based, 0 when not tied to a line.
class VocabError : public std::runtime_error {
 public:
  VocabError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TermKind { Class, Property, Unknown };

/// Minimal class/property model of the ontology referenced by thing
/// annotations. Terms are stored as full IRIs.
struct Vocabulary {
  std::map<std::string, std::string> prefix_map;  // prefix -> IRI base
  std::set<std::string> classes;
  std::set<std::string> properties;
  std::set<std::pair<std::string, std::string>> subclass_edges;  // (child, parent)

  /// Expands `prefix:local`, `prefix.local`, `<iri>` or a bare IRI with a
  /// scheme. Surrounding whitespace is ignored. Returns nullopt when the
  /// prefix is not declared or the term is bare.
  std::optional<std::string> expand(std::string_view term) const;
};

Vocabulary load_vocabulary(std::string_view text);
Vocabulary load_vocabulary_file(const std::string& path);

TermKind classify_term(const Vocabulary& v, std::string_view compact_or_full);

/// Reflexive-transitive subclass test over full IRIs (compact forms are
/// expanded first).
bool is_subclass_of(const Vocabulary& v, std::string_view child,
                    std::string_view parent);

/// Splits a compact term on its first `:` or `.`; nullopt if there is no
/// separator or the term is an absolute IRI.
std::optional<std::pair<std::string, std::string>> split_compact(
    std::string_view term);

/// Fragment or last path segment of an IRI, or the local part of a compact
/// term; bare terms are returned unchanged.
std::string local_name(std::string_view term);

std::string_view trim(std::string_view s);

}  // namespace iotc
