#include "iotc/json.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace iotc {

JsonError::JsonError(std::size_t offset, std::size_t line, std::size_t column,
                     const std::string& what)
    : std::runtime_error("JSON error at " + std::to_string(line) + ":" +
                         std::to_string(column) + " (byte " +
                         std::to_string(offset) + "): " + what),
      offset_(offset),
      line_(line),
      column_(column) {}

JsonNode JsonNode::boolean(bool b) {
  JsonNode n;
  n.value_ = b;
  return n;
}

JsonNode JsonNode::number(double d) {
  if (!std::isfinite(d))
    throw std::invalid_argument("JSON numbers must be finite");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return number_lexeme(std::string(buf, end));
}

JsonNode JsonNode::number_lexeme(std::string lexeme) {
  JsonNode n;
  n.value_ = Number{std::move(lexeme)};
  return n;
}

JsonNode JsonNode::string(std::string s) {
  JsonNode n;
  n.value_ = std::move(s);
  return n;
}

JsonNode JsonNode::array(Array items) {
  JsonNode n;
  n.value_ = std::move(items);
  return n;
}

JsonNode JsonNode::object(Object members) {
  JsonNode n;
  n.value_ = std::move(members);
  return n;
}

namespace {
[[noreturn]] void wrong_kind(const char* wanted) {
  throw std::logic_error(std::string("JSON value is not ") + wanted);
}
}  // namespace

bool JsonNode::as_bool() const {
  if (auto* b = std::get_if<bool>(&value_)) return *b;
  wrong_kind("a boolean");
}

double JsonNode::as_number() const {
  return std::strtod(lexeme().c_str(), nullptr);
}

const std::string& JsonNode::lexeme() const {
  if (auto* n = std::get_if<Number>(&value_)) return n->lexeme;
  wrong_kind("a number");
}

const std::string& JsonNode::as_string() const {
  if (auto* s = std::get_if<std::string>(&value_)) return *s;
  wrong_kind("a string");
}

const JsonNode::Array& JsonNode::items() const {
  if (auto* a = std::get_if<Array>(&value_)) return *a;
  wrong_kind("an array");
}

JsonNode::Array& JsonNode::items() {
  if (auto* a = std::get_if<Array>(&value_)) return *a;
  wrong_kind("an array");
}

const JsonNode::Object& JsonNode::members() const {
  if (auto* o = std::get_if<Object>(&value_)) return *o;
  wrong_kind("an object");
}

JsonNode::Object& JsonNode::members() {
  if (auto* o = std::get_if<Object>(&value_)) return *o;
  wrong_kind("an object");
}

const JsonNode* JsonNode::find(std::string_view name) const {
  for (const auto& [key, value] : members())
    if (key == name) return &value;
  return nullptr;
}

std::vector<const JsonNode*> JsonNode::find_all(std::string_view name) const {
  std::vector<const JsonNode*> out;
  for (const auto& [key, value] : members())
    if (key == name) out.push_back(&value);
  return out;
}

std::size_t JsonNode::count(std::string_view name) const {
  return find_all(name).size();
}

void JsonNode::add(std::string name, JsonNode value) {
  members().emplace_back(std::move(name), std::move(value));
}

void JsonNode::push_back(JsonNode value) { items().push_back(std::move(value)); }

namespace {

constexpr int kMaxDepth = 512;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  JsonNode parse_document() {
    skip_ws();
    JsonNode root = parse_value(0);
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after JSON value");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw JsonError(at, line, column, what);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end()) {
      const char c = text_[pos_];
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') break;
      ++pos_;
    }
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect_word(std::string_view word) {
    if (text_.substr(pos_, word.size()) != word)
      fail("invalid literal, expected '" + std::string(word) + "'");
    pos_ += word.size();
  }

  JsonNode parse_value(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    switch (peek()) {
      case '{':
        return parse_object(depth);
      case '[':
        return parse_array(depth);
      case '"':
        return JsonNode::string(parse_string());
      case 't':
        expect_word("true");
        return JsonNode::boolean(true);
      case 'f':
        expect_word("false");
        return JsonNode::boolean(false);
      case 'n':
        expect_word("null");
        return JsonNode::null();
      case '\0':
        if (at_end()) fail("unexpected end of input");
        [[fallthrough]];
      default:
        if (peek() == '-' || (peek() >= '0' && peek() <= '9'))
          return parse_number();
        fail(std::string("unexpected character '") + peek() + "'");
    }
  }

  JsonNode parse_object(int depth) {
    expect('{');
    JsonNode node = JsonNode::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return node;
    }
    while (true) {
      skip_ws();
      if (peek() != '"') fail("expected member name");
      std::string name = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      node.add(std::move(name), parse_value(depth + 1));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        return node;
      }
      fail("expected ',' or '}' in object");
    }
  }

  JsonNode parse_array(int depth) {
    expect('[');
    JsonNode node = JsonNode::array();
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return node;
    }
    while (true) {
      skip_ws();
      node.push_back(parse_value(depth + 1));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return node;
      }
      fail("expected ',' or ']' in array");
    }
  }

  JsonNode parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      return pos_ - from;
    };
    if (peek() == '-') ++pos_;
    if (peek() == '0') {
      ++pos_;
    } else if (digits() == 0) {
      fail("invalid number");
    }
    if (peek() == '.') {
      ++pos_;
      if (digits() == 0) fail("expected digits after decimal point");
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) fail("expected exponent digits");
    }
    return JsonNode::number_lexeme(std::string(text_.substr(start, pos_ - start)));
  }

  unsigned parse_hex4() {
    if (pos_ + 4 > text_.size()) fail("truncated \\u escape");
    unsigned value = 0;
    for (int i = 0; i < 4; ++i) {
      const char c = text_[pos_++];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<unsigned>(c - 'A' + 10);
      else fail("invalid hex digit in \\u escape");
    }
    return value;
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string parse_string() {
    const std::size_t start = pos_;
    expect('"');
    std::string out;
    while (true) {
      if (at_end()) fail_at(start, "unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (static_cast<unsigned char>(c) < 0x20)
        fail_at(pos_ - 1, "control character in string");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail_at(start, "unterminated string");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': {
          unsigned cp = parse_hex4();
          if (cp >= 0xD800 && cp <= 0xDBFF) {
            if (text_.substr(pos_, 2) != "\\u") fail("unpaired surrogate");
            pos_ += 2;
            const unsigned low = parse_hex4();
            if (low < 0xDC00 || low > 0xDFFF) fail("invalid low surrogate");
            cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
          } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
            fail("unpaired surrogate");
          }
          append_utf8(out, cp);
          break;
        }
        default:
          fail_at(pos_ - 1, std::string("invalid escape '\\") + e + "'");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write(std::string& out, const JsonNode& node, int indent, int level) {
  auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (node.kind()) {
    case JsonNode::Kind::Null: out += "null"; break;
    case JsonNode::Kind::Bool: out += node.as_bool() ? "true" : "false"; break;
    case JsonNode::Kind::Number: out += node.lexeme(); break;
    case JsonNode::Kind::String:
      out += '"';
      out += json_escape(node.as_string());
      out += '"';
      break;
    case JsonNode::Kind::Array: {
      const auto& items = node.items();
      out += '[';
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        newline(level + 1);
        write(out, items[i], indent, level + 1);
      }
      if (!items.empty()) newline(level);
      out += ']';
      break;
    }
    case JsonNode::Kind::Object: {
      const auto& members = node.members();
      out += '{';
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out += ',';
        newline(level + 1);
        out += '"';
        out += json_escape(members[i].first);
        out += indent < 0 ? "\":" : "\": ";
        write(out, members[i].second, indent, level + 1);
      }
      if (!members.empty()) newline(level);
      out += '}';
      break;
    }
  }
}

}  // namespace

JsonNode parse_json_preserving(std::string_view text) {
  return Parser(text).parse_document();
}

std::string serialize_json(const JsonNode& node, int indent) {
  std::string out;
  write(out, node, indent, 0);
  return out;
}

std::string json_escape(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += "\\u00";
          out += kHex[(c >> 4) & 0xF];
          out += kHex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace iotc
