#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace iotc {

class JsonError : public std::runtime_error {
 public:
  JsonError(std::size_t offset, std::size_t line, std::size_t column,
            const std::string& what);
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t offset_, line_, column_;
};

/// JSON value whose objects are ordered member lists. Duplicate member names
/// are kept in source order and numbers keep their source lexeme, so
/// parse/serialize is lossless.
class JsonNode {
 public:
  enum class Kind { Null, Bool, Number, String, Array, Object };
  using Member = std::pair<std::string, JsonNode>;
  using Array = std::vector<JsonNode>;
  using Object = std::vector<Member>;

  JsonNode() = default;

  static JsonNode null() { return {}; }
  static JsonNode boolean(bool b);
  static JsonNode number(double d);
  static JsonNode number_lexeme(std::string lexeme);
  static JsonNode string(std::string s);
  static JsonNode array(Array items = {});
  static JsonNode object(Object members = {});

  Kind kind() const { return static_cast<Kind>(value_.index()); }
  bool is_null() const { return kind() == Kind::Null; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_number() const { return kind() == Kind::Number; }
  bool is_string() const { return kind() == Kind::String; }
  bool is_array() const { return kind() == Kind::Array; }
  bool is_object() const { return kind() == Kind::Object; }

  bool as_bool() const;
  double as_number() const;
  const std::string& lexeme() const;
  const std::string& as_string() const;
  const Array& items() const;
  Array& items();
  const Object& members() const;
  Object& members();

  /// First member with this name, or nullptr. Objects only.
  const JsonNode* find(std::string_view name) const;
  std::vector<const JsonNode*> find_all(std::string_view name) const;
  std::size_t count(std::string_view name) const;
  void add(std::string name, JsonNode value);
  void push_back(JsonNode value);

  friend bool operator==(const JsonNode& a, const JsonNode& b) {
    return a.value_ == b.value_;
  }

 private:
  struct Number {
    std::string lexeme;
    bool operator==(const Number&) const = default;
  };
  std::variant<std::monostate, bool, Number, std::string, Array, Object>
      value_;
};

JsonNode parse_json_preserving(std::string_view text);

/// indent < 0 gives the compact single-line form.
std::string serialize_json(const JsonNode& node, int indent = -1);

std::string json_escape(std::string_view s);

}  // namespace iotc
