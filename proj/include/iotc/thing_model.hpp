#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iotc/json.hpp"
#include "iotc/vocab.hpp"

namespace iotc {

class ThingModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IoDirection { Input, Output };
enum class ResourceKind { Sensor, Actuator, PhysicalObject };

std::string_view to_string(IoDirection d);
std::string_view to_string(ResourceKind k);

struct IoValueSpec {
  IoDirection direction = IoDirection::Output;
  std::string name;
  std::string description;
  std::string unit;
  bool operator==(const IoValueSpec&) const = default;
};

struct ResourceSpec {
  ResourceKind kind = ResourceKind::PhysicalObject;
  std::string type_term;  // @type as written, used by validation
  std::string name;
  std::string description;
  std::optional<IoValueSpec> io;
  bool operator==(const ResourceSpec&) const = default;
};

struct NamedEntry {
  std::string name;
  std::string description;
  bool operator==(const NamedEntry&) const = default;
};

struct ThingDescription {
  std::string type_term;
  std::string thing_id;
  std::string name;
  std::string description;
  std::vector<ResourceSpec> resources;
  std::vector<NamedEntry> protocols;
  std::vector<NamedEntry> security_problems;
  bool operator==(const ThingDescription&) const = default;
};

struct CloudOperation {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string model_reference;
  bool operator==(const CloudOperation&) const = default;
};

struct CloudServiceDescription {
  std::string service_id;
  std::string name;
  std::vector<CloudOperation> operations;
  bool operator==(const CloudServiceDescription&) const = default;
};

/// Expands a JSON-LD thing annotation. `{"value": x}` objects unwrap to x and
/// repeated members accumulate in source order.
ThingDescription expand_thing(const JsonNode& doc, const Vocabulary& v);

/// Parses the SAWSDL subset: definitions, documentation, message/part,
/// portType/operation with sawsdl:modelReference, input/output.
CloudServiceDescription parse_sawsdl(std::string_view xml);

/// Empty iff every invariant holds and every referenced term is known.
std::vector<std::string> validate_description(const ThingDescription& d,
                                              const Vocabulary& v);

/// Every `@type` value and every prefixed member name in `doc`, in document
/// order.
std::vector<std::string> collect_terms(const JsonNode& doc);

/// Canonical JSON forms used by `validate --dump`.
JsonNode to_json(const ThingDescription& d);
JsonNode to_json(const CloudServiceDescription& c);

/// The @context block used by thing annotations.
JsonNode standard_context();

}  // namespace iotc
