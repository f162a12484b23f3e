#include "iotc/thing_model.hpp"

#include <map>
#include <set>

#include "iotc/symbol.hpp"

namespace iotc {

std::string_view to_string(IoDirection d) {
  return d == IoDirection::Input ? "Input" : "Output";
}

std::string_view to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::Sensor: return "Sensor";
    case ResourceKind::Actuator: return "Actuator";
    case ResourceKind::PhysicalObject: return "PhysicalObject";
  }
  return "PhysicalObject";
}

JsonNode standard_context() {
  JsonNode ctx = JsonNode::object();
  ctx.add("rdf", JsonNode::string("http://www.w3.org/1999/02/22-rdf-syntax-ns#"));
  ctx.add("rdfs", JsonNode::string("http://www.w3.org/2000/01/rdf-schema#"));
  ctx.add("owl", JsonNode::string("http://www.w3.org/2002/07/owl#"));
  ctx.add("myont", JsonNode::string(
                       "http://iot.foi.hr/ontologies/ThingAsAServiceOntology.owl#"));
  return ctx;
}

namespace {

// Resolves terms against the document @context first, then the vocabulary
// prefixes. Bare terms use the prefix of the document's root @type.
class TermResolver {
 public:
  TermResolver(const Vocabulary& v, const JsonNode& context) : v_(v) {
    for (const auto& [name, value] : context.members())
      if (value.is_string()) context_[name] = value.as_string();
  }

  void set_default_prefix(std::string_view root_type) {
    if (auto parts = split_compact(root_type)) default_prefix_ = parts->first;
  }

  std::optional<std::string> iri(std::string_view term) const {
    term = trim(term);
    if (auto parts = split_compact(term)) {
      if (auto it = context_.find(parts->first); it != context_.end())
        return it->second + parts->second;
      return v_.expand(term);
    }
    if (term.find(':') == std::string_view::npos && !default_prefix_.empty() &&
        !term.empty())
      return iri(default_prefix_ + ":" + std::string(term));
    return v_.expand(term);
  }

  bool is_class(std::string_view term) const {
    auto full = iri(term);
    return full && v_.classes.count(*full);
  }

  // True when `term` is a class that has (or is) a class with this local name.
  bool is_a(std::string_view term, std::string_view ancestor_local) const {
    auto full = iri(term);
    if (!full || !v_.classes.count(*full)) return false;
    for (const auto& c : v_.classes)
      if (local_name(c) == ancestor_local && is_subclass_of(v_, *full, c))
        return true;
    return false;
  }

  // Member name with a known prefix stripped.
  std::string key_name(std::string_view key) const {
    if (auto parts = split_compact(key))
      if (context_.count(parts->first) || v_.prefix_map.count(parts->first))
        return parts->second;
    return std::string(key);
  }

 private:
  const Vocabulary& v_;
  std::map<std::string, std::string> context_;
  std::string default_prefix_;
};

std::string literal(const JsonNode& node, std::string_view member) {
  switch (node.kind()) {
    case JsonNode::Kind::String: return node.as_string();
    case JsonNode::Kind::Number: return node.lexeme();
    case JsonNode::Kind::Bool: return node.as_bool() ? "true" : "false";
    case JsonNode::Kind::Object:
      if (node.members().size() == 1 && node.members()[0].first == "value") {
        const auto& inner = node.members()[0].second;
        if (inner.is_string() || inner.is_number() || inner.is_bool())
          return literal(inner, member);
      }
      [[fallthrough]];
    default:
      throw ThingModelError("malformed value wrapper in member '" +
                            std::string(member) + "'");
  }
}

std::string type_of(const JsonNode& obj, std::string_view what) {
  const auto* t = obj.find("@type");
  if (!t) throw ThingModelError(std::string(what) + " is missing @type");
  if (!t->is_string())
    throw ThingModelError(std::string(what) + " @type must be a string");
  return std::string(trim(t->as_string()));
}

// Objects may appear singly or as arrays; both accumulate.
template <typename Fn>
void for_each_object(const JsonNode& value, std::string_view member, Fn&& fn) {
  if (value.is_array()) {
    for (const auto& item : value.items()) for_each_object(item, member, fn);
    return;
  }
  if (!value.is_object())
    throw ThingModelError("member '" + std::string(member) +
                          "' must hold an object");
  fn(value);
}

IoValueSpec parse_values(const JsonNode& obj, const TermResolver& terms) {
  const auto type = type_of(obj, "hasValues");
  IoValueSpec io;
  std::string prefix;
  if (terms.is_a(type, "Output")) {
    io.direction = IoDirection::Output;
    prefix = "output";
  } else if (terms.is_a(type, "Input")) {
    io.direction = IoDirection::Input;
    prefix = "input";
  } else {
    throw ThingModelError("hasValues has unknown @type '" + type + "'");
  }
  for (const auto& [key, value] : obj.members()) {
    const auto name = terms.key_name(key);
    if (name == prefix + "Name") io.name = literal(value, key);
    else if (name == prefix + "Description") io.description = literal(value, key);
    else if (name == prefix + "Unit") io.unit = literal(value, key);
  }
  return io;
}

ResourceSpec parse_resource(const JsonNode& obj, const TermResolver& terms) {
  ResourceSpec r;
  r.type_term = type_of(obj, "resource");
  for (const auto& [key, value] : obj.members()) {
    const auto name = terms.key_name(key);
    if (name == "poName") {
      r.name = literal(value, key);
    } else if (name == "poDescription") {
      r.description = literal(value, key);
    } else if (name == "hasValues") {
      if (r.io) throw ThingModelError("resource has more than one hasValues");
      if (!value.is_object())
        throw ThingModelError("hasValues must hold an object");
      r.io = parse_values(value, terms);
    }
  }
  if (terms.is_a(r.type_term, "Actuator")) {
    r.kind = ResourceKind::Actuator;
  } else if (terms.is_a(r.type_term, "Sensor")) {
    r.kind = ResourceKind::Sensor;
  } else if (terms.is_a(r.type_term, "PhysicalObject")) {
    r.kind = r.io && r.io->direction == IoDirection::Output
                 ? ResourceKind::Sensor
                 : ResourceKind::PhysicalObject;
  } else {
    throw ThingModelError("resource has unknown kind '" + r.type_term + "'");
  }
  return r;
}

NamedEntry parse_entry(const JsonNode& obj, const TermResolver& terms,
                       std::string_view name_key, std::string_view desc_key) {
  NamedEntry e;
  for (const auto& [key, value] : obj.members()) {
    const auto name = terms.key_name(key);
    if (name == name_key) e.name = literal(value, key);
    else if (name == desc_key) e.description = literal(value, key);
  }
  return e;
}

}  // namespace

ThingDescription expand_thing(const JsonNode& doc, const Vocabulary& v) {
  if (!doc.is_object()) throw ThingModelError("thing annotation must be an object");
  const auto* context = doc.find("@context");
  if (!context || !context->is_object())
    throw ThingModelError("missing @context object");

  TermResolver terms(v, *context);
  ThingDescription d;
  d.type_term = type_of(doc, "thing");
  terms.set_default_prefix(d.type_term);
  if (!terms.is_class(d.type_term))
    throw ThingModelError("@type '" + d.type_term + "' is not a known class");
  if (!terms.is_a(d.type_term, "SemanticWebThing"))
    throw ThingModelError("@type '" + d.type_term + "' is not a SemanticWebThing");

  std::set<std::string> scalars_seen;
  auto scalar = [&](std::string& field, const std::string& key,
                    const JsonNode& value) {
    if (!scalars_seen.insert(terms.key_name(key)).second)
      throw ThingModelError("member '" + key + "' repeated");
    field = literal(value, key);
  };

  for (const auto& [key, value] : doc.members()) {
    if (!key.empty() && key.front() == '@') continue;
    const auto name = terms.key_name(key);
    if (name == "thingId") {
      scalar(d.thing_id, key, value);
    } else if (name == "thingName") {
      scalar(d.name, key, value);
    } else if (name == "thingDescription") {
      scalar(d.description, key, value);
    } else if (name == "hasResources") {
      for_each_object(value, key, [&](const JsonNode& o) {
        d.resources.push_back(parse_resource(o, terms));
      });
    } else if (name == "supportsProtocols") {
      for_each_object(value, key, [&](const JsonNode& o) {
        d.protocols.push_back(parse_entry(o, terms, "proName", "proDescription"));
      });
    } else if (name == "hasSecurityProblems") {
      for_each_object(value, key, [&](const JsonNode& o) {
        d.security_problems.push_back(
            parse_entry(o, terms, "secName", "secDescription"));
      });
    }
  }
  return d;
}

std::vector<std::string> validate_description(const ThingDescription& d,
                                              const Vocabulary& v) {
  std::vector<std::string> diags;
  if (d.thing_id.empty()) diags.push_back("thing has an empty thingId");
  if (!d.type_term.empty() && classify_term(v, d.type_term) != TermKind::Class)
    diags.push_back("unknown class term '" + d.type_term + "'");

  for (const auto& r : d.resources) {
    const std::string who = "resource '" + r.name + "'";
    if (r.name.empty()) diags.push_back("resource with empty poName");
    if (!r.type_term.empty() && classify_term(v, r.type_term) != TermKind::Class)
      diags.push_back(who + ": unknown class term '" + r.type_term + "'");
    if (!r.io) continue;
    if (r.io->name.empty()) diags.push_back(who + ": value spec has empty name");
    if (r.io->unit.empty()) diags.push_back(who + ": value spec has empty unit");
    if (r.kind == ResourceKind::Sensor && r.io->direction != IoDirection::Output)
      diags.push_back(who + ": sensor values must be Output");
    if (r.kind == ResourceKind::Actuator && r.io->direction != IoDirection::Input)
      diags.push_back(who + ": actuator values must be Input");
  }

  auto check_unique = [&](const std::vector<NamedEntry>& entries,
                          std::string_view what) {
    std::set<std::string> seen;
    for (const auto& e : entries) {
      try {
        if (!seen.insert(normalize_symbol(e.name)).second)
          diags.push_back("duplicate " + std::string(what) + " '" + e.name + "'");
      } catch (const SymbolError&) {
        diags.push_back("empty " + std::string(what) + " name");
      }
    }
  };
  check_unique(d.protocols, "protocol");
  check_unique(d.security_problems, "security problem");
  return diags;
}

std::vector<std::string> collect_terms(const JsonNode& doc) {
  std::vector<std::string> out;
  if (doc.is_array()) {
    for (const auto& item : doc.items()) {
      auto sub = collect_terms(item);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (doc.is_object()) {
    for (const auto& [key, value] : doc.members()) {
      if (key == "@context") continue;
      if (key == "@type" && value.is_string()) {
        out.emplace_back(trim(value.as_string()));
        continue;
      }
      if (!key.empty() && key.front() != '@' && split_compact(key))
        out.push_back(key);
      auto sub = collect_terms(value);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

namespace {
JsonNode entries_json(const std::vector<NamedEntry>& entries) {
  JsonNode arr = JsonNode::array();
  for (const auto& e : entries) {
    JsonNode o = JsonNode::object();
    o.add("name", JsonNode::string(e.name));
    o.add("description", JsonNode::string(e.description));
    arr.push_back(std::move(o));
  }
  return arr;
}

JsonNode strings_json(const std::vector<std::string>& items) {
  JsonNode arr = JsonNode::array();
  for (const auto& s : items) arr.push_back(JsonNode::string(s));
  return arr;
}
}  // namespace

JsonNode to_json(const ThingDescription& d) {
  JsonNode o = JsonNode::object();
  o.add("thing_id", JsonNode::string(d.thing_id));
  o.add("type", JsonNode::string(d.type_term));
  o.add("name", JsonNode::string(d.name));
  o.add("description", JsonNode::string(d.description));
  JsonNode resources = JsonNode::array();
  for (const auto& r : d.resources) {
    JsonNode ro = JsonNode::object();
    ro.add("kind", JsonNode::string(std::string(to_string(r.kind))));
    ro.add("type", JsonNode::string(r.type_term));
    ro.add("name", JsonNode::string(r.name));
    ro.add("description", JsonNode::string(r.description));
    if (r.io) {
      JsonNode io = JsonNode::object();
      io.add("direction", JsonNode::string(std::string(to_string(r.io->direction))));
      io.add("name", JsonNode::string(r.io->name));
      io.add("description", JsonNode::string(r.io->description));
      io.add("unit", JsonNode::string(r.io->unit));
      ro.add("io", std::move(io));
    } else {
      ro.add("io", JsonNode::null());
    }
    resources.push_back(std::move(ro));
  }
  o.add("resources", std::move(resources));
  o.add("protocols", entries_json(d.protocols));
  o.add("security_problems", entries_json(d.security_problems));
  return o;
}

JsonNode to_json(const CloudServiceDescription& c) {
  JsonNode o = JsonNode::object();
  o.add("service_id", JsonNode::string(c.service_id));
  o.add("name", JsonNode::string(c.name));
  JsonNode ops = JsonNode::array();
  for (const auto& op : c.operations) {
    JsonNode oo = JsonNode::object();
    oo.add("name", JsonNode::string(op.name));
    oo.add("inputs", strings_json(op.inputs));
    oo.add("outputs", strings_json(op.outputs));
    oo.add("model_reference", JsonNode::string(op.model_reference));
    ops.push_back(std::move(oo));
  }
  o.add("operations", std::move(ops));
  return o;
}

}  // namespace iotc
