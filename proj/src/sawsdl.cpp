#include <map>
#include <memory>
#include <set>

#include "iotc/thing_model.hpp"

namespace iotc {

namespace {

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlElement> children;
  std::string text;

  std::string_view local() const {
    const auto colon = name.find(':');
    return colon == std::string::npos ? std::string_view(name)
                                      : std::string_view(name).substr(colon + 1);
  }

  const std::string* attribute(std::string_view local_name) const {
    for (const auto& [key, value] : attributes) {
      const auto colon = key.find(':');
      const std::string_view l = colon == std::string::npos
                                     ? std::string_view(key)
                                     : std::string_view(key).substr(colon + 1);
      if (l == local_name) return &value;
    }
    return nullptr;
  }
};

// Enough XML for WSDL files: elements, attributes, text, comments, CDATA,
// processing instructions and the predefined/numeric entities.
class XmlReader {
 public:
  explicit XmlReader(std::string_view text) : text_(text) {}

  XmlElement read_document() {
    skip_misc();
    if (peek() != '<') fail("expected root element");
    XmlElement root = read_element();
    skip_misc();
    if (pos_ != text_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    throw ThingModelError("XML syntax error at line " + std::to_string(line) +
                          ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  void skip_past(std::string_view terminator) {
    const auto end = text_.find(terminator, pos_);
    if (end == std::string_view::npos)
      fail("missing '" + std::string(terminator) + "'");
    pos_ = end + terminator.size();
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<?")) skip_past("?>");
      else if (starts_with("<!--")) skip_past("-->");
      else if (starts_with("<!DOCTYPE")) skip_past(">");
      else return;
    }
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.' || c == ':' || static_cast<unsigned char>(c) >= 0x80;
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity");
      const auto entity = raw.substr(i + 1, semi - i - 1);
      if (entity == "lt") out += '<';
      else if (entity == "gt") out += '>';
      else if (entity == "amp") out += '&';
      else if (entity == "quot") out += '"';
      else if (entity == "apos") out += '\'';
      else if (!entity.empty() && entity[0] == '#') {
        const bool hex = entity.size() > 1 && entity[1] == 'x';
        const std::string digits(entity.substr(hex ? 2 : 1));
        char* end = nullptr;
        const long cp = std::strtol(digits.c_str(), &end, hex ? 16 : 10);
        if (digits.empty() || *end != '\0' || cp <= 0 || cp > 0x7F)
          fail("unsupported character reference");
        out += static_cast<char>(cp);
      } else {
        fail("unknown entity '&" + std::string(entity) + ";'");
      }
      i = semi;
    }
    return out;
  }

  XmlElement read_element() {
    ++pos_;  // '<'
    XmlElement el;
    el.name = read_name();
    while (true) {
      skip_ws();
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (pos_ >= text_.size()) fail("unterminated start tag <" + el.name + ">");
      std::string key = read_name();
      skip_ws();
      if (peek() != '=') fail("expected '=' after attribute " + key);
      ++pos_;
      skip_ws();
      const char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      const auto end = text_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      for (const auto& [existing, unused] : el.attributes)
        if (existing == key) fail("duplicate attribute " + key);
      el.attributes.emplace_back(std::move(key),
                                 decode(text_.substr(pos_, end - pos_)));
      pos_ = end + 1;
    }

    while (true) {
      if (pos_ >= text_.size()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const auto closing = read_name();
        if (closing != el.name)
          fail("mismatched </" + closing + ">, expected </" + el.name + ">");
        skip_ws();
        if (peek() != '>') fail("expected '>'");
        ++pos_;
        return el;
      }
      if (starts_with("<!--")) {
        skip_past("-->");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = text_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        el.text += text_.substr(pos_, end - pos_);
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_past("?>");
      } else if (peek() == '<') {
        el.children.push_back(read_element());
      } else {
        const auto next = text_.find('<', pos_);
        const auto end = next == std::string_view::npos ? text_.size() : next;
        el.text += decode(text_.substr(pos_, end - pos_));
        pos_ = end;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string strip_qname(std::string_view qname) {
  const auto colon = qname.find(':');
  return std::string(colon == std::string_view::npos ? qname
                                                     : qname.substr(colon + 1));
}

bool valid_reference(std::string_view ref) {
  ref = trim(ref);
  if (ref.empty()) return true;
  if (ref.find_first_of(" \t\n<>\"") != std::string_view::npos) return false;
  if (ref.find("://") != std::string_view::npos) return true;
  return split_compact(ref).has_value();
}

}  // namespace

CloudServiceDescription parse_sawsdl(std::string_view xml) {
  const XmlElement root = XmlReader(xml).read_document();
  if (root.local() != "definitions")
    throw ThingModelError("root element must be wsdl:definitions");

  CloudServiceDescription c;
  if (const auto* name = root.attribute("name")) c.service_id = *name;
  if (c.service_id.empty())
    throw ThingModelError("wsdl:definitions has no name attribute");
  c.name = c.service_id;

  std::map<std::string, std::vector<std::string>> messages;
  for (const auto& child : root.children) {
    if (child.local() == "documentation" && !trim(child.text).empty()) {
      c.name = std::string(trim(child.text));
    } else if (child.local() == "message") {
      const auto* name = child.attribute("name");
      if (!name) throw ThingModelError("wsdl:message without name");
      auto& parts = messages[*name];
      for (const auto& part : child.children) {
        if (part.local() != "part") continue;
        const auto* part_name = part.attribute("name");
        if (!part_name) throw ThingModelError("wsdl:part without name");
        parts.push_back(*part_name);
      }
    }
  }

  auto message_parts = [&](const XmlElement& io) -> std::vector<std::string> {
    const auto* ref = io.attribute("message");
    if (!ref) return {};
    auto it = messages.find(strip_qname(*ref));
    if (it == messages.end())
      throw ThingModelError("unknown message '" + *ref + "'");
    return it->second;
  };

  bool saw_port_type = false;
  std::set<std::string> op_names;
  for (const auto& port_type : root.children) {
    if (port_type.local() != "portType") continue;
    saw_port_type = true;
    for (const auto& op_el : port_type.children) {
      if (op_el.local() != "operation") continue;
      CloudOperation op;
      if (const auto* name = op_el.attribute("name")) op.name = *name;
      if (op.name.empty()) throw ThingModelError("operation without name");
      if (!op_names.insert(op.name).second)
        throw ThingModelError("duplicate operation '" + op.name + "'");
      if (const auto* ref = op_el.attribute("modelReference"))
        op.model_reference = std::string(trim(*ref));
      if (!valid_reference(op.model_reference))
        throw ThingModelError("operation '" + op.name +
                              "' has an invalid modelReference");
      for (const auto& io : op_el.children) {
        if (io.local() == "input") op.inputs = message_parts(io);
        else if (io.local() == "output") op.outputs = message_parts(io);
      }
      c.operations.push_back(std::move(op));
    }
  }
  if (!saw_port_type) throw ThingModelError("no portType found");
  if (c.operations.empty()) throw ThingModelError("no operations");
  return c;
}

}  // namespace iotc
