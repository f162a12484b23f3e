#include "iotc/services.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <httplib.h>

#include "iotc/symbol.hpp"

namespace iotc {

std::string_view to_string(ServiceError::Kind k) {
  switch (k) {
    case ServiceError::Kind::Network: return "network";
    case ServiceError::Kind::HttpStatus: return "http_status";
    case ServiceError::Kind::Payload: return "payload";
    case ServiceError::Kind::Config: return "config";
    case ServiceError::Kind::Unbound: return "unbound";
    case ServiceError::Kind::Execution: return "execution";
  }
  return "execution";
}

std::string_view to_string(HttpVerb v) { return v == HttpVerb::GET ? "GET" : "POST"; }

std::string_view to_string(StepRole r) {
  switch (r) {
    case StepRole::ReadSensor: return "read_sensor";
    case StepRole::Decide: return "decide";
    case StepRole::Actuate: return "actuate";
    case StepRole::Store: return "store";
  }
  return "decide";
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw ServiceError(ServiceError::Kind::Config, what);
}

[[noreturn]] void payload_error(const std::string& what) {
  throw ServiceError(ServiceError::Kind::Payload, what);
}

const std::string& required_string(const JsonNode& obj, std::string_view field,
                                   std::string_view where) {
  const auto* v = obj.find(field);
  if (!v || !v->is_string())
    config_error(std::string(where) + ": '" + std::string(field) + "' must be a string");
  return v->as_string();
}

std::vector<std::string> template_holes(std::string_view tmpl) {
  std::vector<std::string> holes;
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    const auto close = tmpl.find('}', pos);
    if (close == std::string_view::npos) break;
    holes.emplace_back(tmpl.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return holes;
}

void json_holes(const JsonNode& node, std::vector<std::string>& out) {
  if (node.is_string()) {
    auto h = template_holes(node.as_string());
    out.insert(out.end(), h.begin(), h.end());
  } else if (node.is_array()) {
    for (const auto& item : node.items()) json_holes(item, out);
  } else if (node.is_object()) {
    for (const auto& [key, value] : node.members()) json_holes(value, out);
  }
}

JsonNode fill_json(const JsonNode& node, const std::map<std::string, std::string>& args) {
  if (node.is_string()) return JsonNode::string(fill_template(node.as_string(), args));
  if (node.is_array()) {
    JsonNode out = JsonNode::array();
    for (const auto& item : node.items()) out.push_back(fill_json(item, args));
    return out;
  }
  if (node.is_object()) {
    JsonNode out = JsonNode::object();
    for (const auto& [key, value] : node.members()) out.add(key, fill_json(value, args));
    return out;
  }
  return node;
}

StepRole parse_role(const std::string& s) {
  if (s == "read_sensor") return StepRole::ReadSensor;
  if (s == "decide") return StepRole::Decide;
  if (s == "actuate") return StepRole::Actuate;
  if (s == "store") return StepRole::Store;
  config_error("unknown step role '" + s + "'");
}

}  // namespace

std::vector<Binding> parse_bindings(const JsonNode& doc) {
  if (!doc.is_array()) config_error("bindings file must hold a JSON array");
  std::vector<Binding> out;
  std::set<std::string> heads;
  for (const auto& item : doc.items()) {
    if (!item.is_object()) config_error("each binding must be an object");
    Binding b;
    b.operator_head = required_string(item, "operator_head", "binding");
    const std::string where = "binding " + b.operator_head;
    if (b.operator_head.empty() || b.operator_head.front() != '!')
      config_error(where + ": operator_head must start with '!'");
    if (!heads.insert(b.operator_head).second)
      config_error(where + ": duplicate binding");

    const auto* params = item.find("parameter_names");
    if (!params || !params->is_array()) config_error(where + ": parameter_names must be an array");
    for (const auto& p : params->items()) {
      if (!p.is_string()) config_error(where + ": parameter names must be strings");
      b.parameter_names.push_back(p.as_string());
    }
    const std::set<std::string> known(b.parameter_names.begin(), b.parameter_names.end());

    const auto* steps = item.find("steps");
    if (!steps || !steps->is_array()) config_error(where + ": steps must be an array");
    for (const auto& s : steps->items()) {
      if (!s.is_object()) config_error(where + ": each step must be an object");
      BindingStep step;
      step.role = parse_role(required_string(s, "role", where));
      const auto* ep = s.find("endpoint");
      if (ep && !ep->is_null()) {
        if (!ep->is_object()) config_error(where + ": endpoint must be an object");
        EndpointDescriptor e;
        e.base_url = required_string(*ep, "base_url", where);
        e.path_template = required_string(*ep, "path_template", where);
        const auto& verb = required_string(*ep, "verb", where);
        if (verb == "GET") e.verb = HttpVerb::GET;
        else if (verb == "POST") e.verb = HttpVerb::POST;
        else config_error(where + ": verb must be GET or POST");
        if (const auto* pt = ep->find("payload_template"); pt && !pt->is_null())
          e.payload_template = *pt;

        auto holes = template_holes(e.path_template);
        if (e.payload_template) json_holes(*e.payload_template, holes);
        for (const auto& h : holes)
          if (!known.count(h)) config_error(where + ": template hole {" + h + "} is not a parameter");
        step.endpoint = std::move(e);
      }
      if (step.role != StepRole::Decide && !step.endpoint)
        config_error(where + ": " + std::string(to_string(step.role)) + " step needs an endpoint");
      b.steps.push_back(std::move(step));
    }
    out.push_back(std::move(b));
  }
  return out;
}

void check_threshold(const ThresholdRule& r) {
  if (!(r.low < r.high)) config_error("threshold: low must be below high");
  if (!(0.0 <= r.off_value && r.off_value <= r.on_value && r.on_value <= 100.0))
    config_error("threshold: need 0 <= off <= on <= 100");
}

ThresholdRule parse_threshold(const JsonNode& doc) {
  if (!doc.is_object()) config_error("threshold config must be an object");
  auto number = [&](std::string_view field) {
    const auto* v = doc.find(field);
    if (!v || !v->is_number())
      config_error("threshold: '" + std::string(field) + "' must be a number");
    return v->as_number();
  };
  ThresholdRule r{number("low"), number("high"), number("on"), number("off")};
  check_threshold(r);
  return r;
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& args) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string name(tmpl.substr(open + 1, close - open - 1));
    auto it = args.find(name);
    if (it == args.end()) config_error("no value for template hole {" + name + "}");
    out += it->second;
    pos = close + 1;
  }
  out.append(tmpl.substr(pos));
  return out;
}

Reading parse_gsn_reading(const JsonNode& doc) {
  if (!doc.is_object()) payload_error("reading payload must be a JSON object");
  auto field = [&](std::string_view name) -> const JsonNode& {
    const auto* v = doc.find(name);
    if (!v) payload_error("reading payload is missing field '" + std::string(name) + "'");
    return *v;
  };
  Reading r;
  const auto& sensor = field("sensor");
  const auto& value = field("value");
  const auto& unit = field("unit");
  const auto& ts = field("timestamp");
  if (!sensor.is_string()) payload_error("reading field 'sensor' must be a string");
  if (!value.is_number()) payload_error("reading field 'value' must be a number");
  if (!unit.is_string() || unit.as_string().empty())
    payload_error("reading field 'unit' must be a non-empty string");
  if (!ts.is_number() || ts.lexeme().find_first_of(".eE") != std::string::npos)
    payload_error("reading field 'timestamp' must be an integer");
  r.source = sensor.as_string();
  r.value = value.as_number();
  r.unit = unit.as_string();
  r.timestamp = std::stoll(ts.lexeme());
  return r;
}

namespace {

struct HttpResponse {
  int status = 0;
  std::string body;
};

HttpResponse http_call(HttpVerb verb, const std::string& base_url,
                       const std::string& path, const std::string& body) {
  httplib::Client client(base_url);
  if (!client.is_valid()) config_error("invalid base URL '" + base_url + "'");
  client.set_connection_timeout(std::chrono::seconds(2));
  client.set_read_timeout(std::chrono::seconds(5));
  auto res = verb == HttpVerb::GET ? client.Get(path)
                                   : client.Post(path, body, "application/json");
  if (!res)
    throw ServiceError(ServiceError::Kind::Network,
                       "request to " + base_url + path + " failed: " +
                           httplib::to_string(res.error()));
  return {res->status, res->body};
}

bool success(int status) { return status >= 200 && status < 300; }

}  // namespace

Reading fetch_reading(const EndpointDescriptor& e,
                      const std::map<std::string, std::string>& args) {
  const auto path = fill_template(e.path_template, args);
  const auto res = http_call(e.verb, e.base_url, path, "");
  if (!success(res.status))
    throw ServiceError(ServiceError::Kind::HttpStatus,
                       "GET " + e.base_url + path + " returned " + std::to_string(res.status));
  try {
    return parse_gsn_reading(parse_json_preserving(res.body));
  } catch (const JsonError& err) {
    payload_error(std::string("reading payload is not JSON: ") + err.what());
  }
}

JsonNode upgrade_gsn_json(const JsonNode& doc, const ThingDescription& thing) {
  const Reading r = parse_gsn_reading(doc);
  const ResourceSpec* sensor = nullptr;
  for (const auto& res : thing.resources) {
    if (res.kind != ResourceKind::Sensor || !res.io ||
        res.io->direction != IoDirection::Output)
      continue;
    if (res.name == r.source || normalize_symbol(res.name) == r.source) {
      sensor = &res;
      break;
    }
  }
  if (!sensor)
    payload_error("thing '" + thing.name + "' has no sensor output named '" + r.source + "'");

  JsonNode out = JsonNode::object();
  out.add("@context", standard_context());
  out.add("@type", JsonNode::string("myont.Output"));
  out.add("outputName", JsonNode::string(sensor->io->name));
  out.add("outputUnit", JsonNode::string(sensor->io->unit));
  for (const auto& member : doc.members()) out.add(member.first, member.second);
  return out;
}

double decide_actuation(const Reading& r, const ThresholdRule& rule) {
  if (r.unit != "celsius")
    throw ServiceError(ServiceError::Kind::Payload,
                       "threshold rules expect celsius, got '" + r.unit + "'");
  return (r.value < rule.low || r.value > rule.high) ? rule.on_value : rule.off_value;
}

JsonNode to_json(const ExecutionReport& r) {
  JsonNode records = JsonNode::array();
  for (const auto& rec : r.records) {
    JsonNode o = JsonNode::object();
    o.add("step", JsonNode::string(to_string(rec.step)));
    o.add("role", JsonNode::string(std::string(to_string(rec.role))));
    o.add("endpoint", JsonNode::string(rec.endpoint));
    o.add("request_payload", JsonNode::string(rec.request_payload));
    o.add("response_status", JsonNode::number(rec.response_status));
    o.add("response_body", JsonNode::string(rec.response_body));
    o.add("duration_ms", JsonNode::number(rec.duration_ms));
    if (!rec.error.empty()) o.add("error", JsonNode::string(rec.error));
    records.push_back(std::move(o));
  }
  JsonNode out = JsonNode::object();
  out.add("status", JsonNode::string(r.completed() ? "Completed" : "Failed"));
  if (!r.completed()) {
    out.add("failed_step", JsonNode::number(static_cast<double>(r.failed_step)));
    if (r.error_kind) out.add("error_kind", JsonNode::string(std::string(to_string(*r.error_kind))));
    out.add("error", JsonNode::string(r.error));
  }
  out.add("records", std::move(records));
  return out;
}

ExecutionReport execute_plan(const Plan& plan, const std::vector<Binding>& bindings,
                             const ThresholdRule& rule, const ExecutionOptions& options) {
  ExecutionReport report;
  auto fail = [&](std::size_t step, ServiceError::Kind kind, const std::string& what) {
    report.status = ExecutionReport::Status::Failed;
    report.failed_step = step;
    report.error_kind = kind;
    report.error = what;
  };

  std::vector<const Binding*> resolved;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const Binding* found = nullptr;
    for (const auto& b : bindings)
      if (b.operator_head == step.head) found = &b;
    if (!found) {
      fail(i, ServiceError::Kind::Unbound, "no binding for " + step.head);
      return report;
    }
    if (found->parameter_names.size() != step.args.size()) {
      fail(i, ServiceError::Kind::Unbound,
           "binding for " + step.head + " expects " +
               std::to_string(found->parameter_names.size()) + " parameters");
      return report;
    }
    resolved.push_back(found);
  }

  std::optional<Reading> latest;
  std::optional<JsonNode> latest_raw;
  std::optional<double> decided;

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const Binding& binding = *resolved[i];
    std::map<std::string, std::string> args;
    for (std::size_t a = 0; a < step.args.size(); ++a)
      args[binding.parameter_names[a]] = step.args[a].text;

    for (const auto& bs : binding.steps) {
      StepRecord rec;
      rec.step = step;
      rec.role = bs.role;
      const auto started = std::chrono::steady_clock::now();
      try {
        if (bs.role == StepRole::Decide) {
          if (!latest)
            throw ServiceError(ServiceError::Kind::Execution, "decide step without a reading");
          decided = decide_actuation(*latest, rule);
          rec.response_body = format_number(*decided);
        } else {
          const auto& e = *bs.endpoint;
          const std::string base = options.base_url_override.value_or(e.base_url);
          const std::string path = fill_template(e.path_template, args);
          rec.endpoint = std::string(to_string(e.verb)) + " " + base + path;

          if (bs.role == StepRole::Actuate) {
            if (!decided)
              throw ServiceError(ServiceError::Kind::Execution, "actuate step without a decision");
            JsonNode body = e.payload_template ? fill_json(*e.payload_template, args)
                                               : JsonNode::object();
            if (!body.is_object())
              throw ServiceError(ServiceError::Kind::Config, "actuate payload must be an object");
            auto& members = body.members();
            std::erase_if(members, [](const auto& m) { return m.first == "percent"; });
            body.add("percent", JsonNode::number(*decided));
            rec.request_payload = serialize_json(body);
          } else if (bs.role == StepRole::Store) {
            if (!latest_raw)
              throw ServiceError(ServiceError::Kind::Execution, "store step without a reading");
            const ThingDescription* owner = nullptr;
            for (const auto& t : options.things)
              for (const auto& r : t.resources)
                if (r.kind == ResourceKind::Sensor &&
                    (r.name == latest->source || normalize_symbol(r.name) == latest->source))
                  owner = &t;
            if (!owner)
              throw ServiceError(ServiceError::Kind::Execution,
                                 "no thing description owns sensor '" + latest->source + "'");
            rec.request_payload = serialize_json(upgrade_gsn_json(*latest_raw, *owner));
          } else if (e.payload_template) {
            rec.request_payload = serialize_json(fill_json(*e.payload_template, args));
          }

          const auto res = http_call(e.verb, base, path, rec.request_payload);
          rec.response_status = res.status;
          rec.response_body = res.body;
          if (!success(res.status))
            throw ServiceError(ServiceError::Kind::HttpStatus,
                               rec.endpoint + " returned " + std::to_string(res.status));
          if (bs.role == StepRole::ReadSensor) {
            try {
              latest_raw = parse_json_preserving(res.body);
            } catch (const JsonError& err) {
              payload_error(std::string("reading payload is not JSON: ") + err.what());
            }
            latest = parse_gsn_reading(*latest_raw);
          }
        }
      } catch (const ServiceError& err) {
        rec.error = err.what();
        rec.duration_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started).count();
        report.records.push_back(std::move(rec));
        fail(i, err.kind(), err.what());
        return report;
      }
      rec.duration_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - started).count();
      report.records.push_back(std::move(rec));
    }
  }
  return report;
}

}  // namespace iotc
