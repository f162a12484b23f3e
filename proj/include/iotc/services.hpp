#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotc/json.hpp"
#include "iotc/shop.hpp"
#include "iotc/thing_model.hpp"

namespace iotc {

class ServiceError : public std::runtime_error {
 public:
  enum class Kind { Network, HttpStatus, Payload, Config, Unbound, Execution };
  ServiceError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ServiceError::Kind k);

enum class HttpVerb { GET, POST };
enum class StepRole { ReadSensor, Decide, Actuate, Store };

std::string_view to_string(HttpVerb v);
std::string_view to_string(StepRole r);

struct EndpointDescriptor {
  std::string base_url;
  std::string path_template;  // `{name}` holes
  HttpVerb verb = HttpVerb::GET;
  std::optional<JsonNode> payload_template;
};

struct BindingStep {
  StepRole role = StepRole::ReadSensor;
  std::optional<EndpointDescriptor> endpoint;
};

struct Binding {
  std::string operator_head;
  std::vector<std::string> parameter_names;
  std::vector<BindingStep> steps;
};

/// Parses the bindings file: a JSON array of Binding objects whose field
/// names match the struct members. Checks that every template hole names a
/// parameter and that I/O roles carry an endpoint.
std::vector<Binding> parse_bindings(const JsonNode& doc);

struct Reading {
  std::string source;
  double value = 0.0;
  std::string unit;
  std::int64_t timestamp = 0;  // ms since epoch
};

struct ThresholdRule {
  double low = 18.0;
  double high = 26.0;
  double on_value = 100.0;
  double off_value = 0.0;
};

/// `{"low": n, "high": n, "on": n, "off": n}`
ThresholdRule parse_threshold(const JsonNode& doc);
void check_threshold(const ThresholdRule& rule);

/// Replaces `{name}` holes; unknown holes are a Config error.
std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& args);

/// GSN-style reading: `{"sensor", "value", "unit", "timestamp"}`.
Reading parse_gsn_reading(const JsonNode& doc);

Reading fetch_reading(const EndpointDescriptor& e,
                      const std::map<std::string, std::string>& args);

/// Adds the annotation @context and `@type: myont.Output` plus the thing's
/// output name/unit in front of the original GSN fields.
JsonNode upgrade_gsn_json(const JsonNode& doc, const ThingDescription& thing);

/// on_value when strictly outside [low, high], off_value otherwise.
double decide_actuation(const Reading& r, const ThresholdRule& rule);

struct StepRecord {
  PAtom step;
  StepRole role = StepRole::ReadSensor;
  std::string endpoint;  // "VERB url", empty for local steps
  std::string request_payload;
  int response_status = 0;
  std::string response_body;
  double duration_ms = 0.0;
  std::string error;
};

struct ExecutionReport {
  enum class Status { Completed, Failed };
  std::vector<StepRecord> records;
  Status status = Status::Completed;
  std::size_t failed_step = 0;  // plan step index, valid when Failed
  std::optional<ServiceError::Kind> error_kind;
  std::string error;

  bool completed() const { return status == Status::Completed; }
};

JsonNode to_json(const ExecutionReport& r);

struct ExecutionOptions {
  std::vector<ThingDescription> things;  // used to upgrade stored readings
  std::optional<std::string> base_url_override;
};

/// Runs each plan step's binding in order and stops at the first failure.
/// All steps are checked for a binding before any request is made.
ExecutionReport execute_plan(const Plan& plan, const std::vector<Binding>& bindings,
                             const ThresholdRule& rule,
                             const ExecutionOptions& options = {});

struct MockConfig {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks an ephemeral port
  std::map<std::string, double> sensors;
  std::string unit = "celsius";
};

/// In-process stand-in for devices, GSN and cloud storage. Starts serving
/// on construction; stops on destruction.
class MockServer {
 public:
  explicit MockServer(MockConfig config = {});
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const;
  std::string base_url() const;

  void seed_sensor(const std::string& name, double value);
  std::optional<double> actuator_last(const std::string& name) const;
  std::map<std::string, std::string> stored_objects() const;
  std::size_t request_count() const;

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iotc
