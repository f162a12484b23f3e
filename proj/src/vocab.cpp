#include "iotc/vocab.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace iotc {

VocabError::VocabError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                              : what),
      line_(line) {}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::pair<std::string, std::string>> split_compact(
    std::string_view term) {
  term = trim(term);
  if (term.find("://") != std::string_view::npos) return std::nullopt;
  if (!term.empty() && term.front() == '<') return std::nullopt;
  const auto sep = term.find_first_of(":.");
  if (sep == std::string_view::npos || sep == 0 || sep + 1 == term.size())
    return std::nullopt;
  return std::pair{std::string(term.substr(0, sep)),
                   std::string(term.substr(sep + 1))};
}

std::string local_name(std::string_view term) {
  term = trim(term);
  if (term.size() >= 2 && term.front() == '<' && term.back() == '>')
    term = term.substr(1, term.size() - 2);
  if (term.find("://") != std::string_view::npos) {
    const auto cut = term.find_last_of("#/");
    return std::string(term.substr(cut + 1));
  }
  if (auto parts = split_compact(term)) return parts->second;
  return std::string(term);
}

std::optional<std::string> Vocabulary::expand(std::string_view term) const {
  term = trim(term);
  if (term.size() >= 2 && term.front() == '<' && term.back() == '>')
    return std::string(term.substr(1, term.size() - 2));
  if (term.find("://") != std::string_view::npos) return std::string(term);
  auto parts = split_compact(term);
  if (!parts) return std::nullopt;
  auto it = prefix_map.find(parts->first);
  if (it == prefix_map.end()) return std::nullopt;
  return it->second + parts->second;
}

namespace {

std::vector<std::string> tokenize_line(std::string_view line,
                                       std::size_t line_no) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      break;
    } else if (c == '<') {
      const auto close = line.find('>', i);
      if (close == std::string_view::npos)
        throw VocabError(line_no, "unterminated IRI");
      tokens.emplace_back(line.substr(i, close - i + 1));
      i = close + 1;
    } else {
      auto end = line.find_first_of(" \t\r", i);
      if (end == std::string_view::npos) end = line.size();
      tokens.emplace_back(line.substr(i, end - i));
      i = end;
    }
  }
  return tokens;
}

void check_acyclic(const Vocabulary& v) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [child, parent] : v.subclass_edges)
    parents[child].push_back(parent);

  enum class Mark { Fresh, Active, Done };
  std::map<std::string, Mark> marks;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    auto& m = marks[n];
    if (m == Mark::Done) return;
    if (m == Mark::Active) throw VocabError(0, "subclass cycle through " + n);
    m = Mark::Active;
    if (auto it = parents.find(n); it != parents.end())
      for (const auto& p : it->second) visit(p);
    marks[n] = Mark::Done;
  };
  for (const auto& c : v.classes) visit(c);
}

}  // namespace

Vocabulary load_vocabulary(std::string_view text) {
  Vocabulary v;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto tokens = tokenize_line(line, line_no);
    if (tokens.empty()) continue;

    auto expand = [&](const std::string& term) {
      auto iri = v.expand(term);
      if (!iri || iri->empty())
        throw VocabError(line_no, "cannot expand term '" + term + "'");
      return *iri;
    };
    auto add_class = [&](const std::string& iri) {
      if (v.properties.count(iri))
        throw VocabError(line_no, iri + " is already a property");
      v.classes.insert(iri);
    };

    if (tokens[0] == "prefix") {
      if (tokens.size() != 3)
        throw VocabError(line_no, "expected: prefix <name> <iri-base>");
      const auto& name = tokens[1];
      std::string base = tokens[2];
      if (base.size() >= 2 && base.front() == '<' && base.back() == '>')
        base = base.substr(1, base.size() - 2);
      if (name.find_first_of(":.<>") != std::string::npos)
        throw VocabError(line_no, "invalid prefix name '" + name + "'");
      if (auto it = v.prefix_map.find(name); it != v.prefix_map.end()) {
        if (it->second != base)
          throw VocabError(line_no, "prefix '" + name + "' redeclared");
        continue;
      }
      for (const auto& [other, other_base] : v.prefix_map)
        if (other_base == base)
          throw VocabError(line_no, "prefixes '" + other + "' and '" + name +
                                        "' share base " + base);
      v.prefix_map.emplace(name, base);
    } else if (tokens.size() == 2 && tokens[1] == "class") {
      add_class(expand(tokens[0]));
    } else if (tokens.size() == 2 && tokens[1] == "property") {
      const auto iri = expand(tokens[0]);
      if (v.classes.count(iri))
        throw VocabError(line_no, iri + " is already a class");
      v.properties.insert(iri);
    } else if (tokens.size() == 3 && tokens[1] == "subClassOf") {
      const auto child = expand(tokens[0]);
      const auto parent = expand(tokens[2]);
      if (child == parent)
        throw VocabError(line_no, "subclass cycle through " + child);
      add_class(child);
      add_class(parent);
      v.subclass_edges.emplace(child, parent);
    } else {
      throw VocabError(line_no, "unrecognised statement '" +
                                    std::string(trim(line)) + "'");
    }
  }
  check_acyclic(v);
  return v;
}

Vocabulary load_vocabulary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabError(0, "cannot open vocabulary file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_vocabulary(buf.str());
}

TermKind classify_term(const Vocabulary& v, std::string_view compact_or_full) {
  const auto iri = v.expand(compact_or_full);
  if (!iri) return TermKind::Unknown;
  if (v.classes.count(*iri)) return TermKind::Class;
  if (v.properties.count(*iri)) return TermKind::Property;
  return TermKind::Unknown;
}

bool is_subclass_of(const Vocabulary& v, std::string_view child,
                    std::string_view parent) {
  const std::string from = v.expand(child).value_or(std::string(trim(child)));
  const std::string to = v.expand(parent).value_or(std::string(trim(parent)));
  if (from == to) return true;
  std::vector<std::string> frontier{from};
  std::set<std::string> seen{from};
  while (!frontier.empty()) {
    const auto node = frontier.back();
    frontier.pop_back();
    for (auto it = v.subclass_edges.lower_bound({node, std::string()});
         it != v.subclass_edges.end() && it->first == node; ++it) {
      if (it->second == to) return true;
      if (seen.insert(it->second).second) frontier.push_back(it->second);
    }
  }
  return false;
}

}  // namespace iotc
