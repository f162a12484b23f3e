#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "iotc/services.hpp"

namespace iotc {

struct MockServer::Impl {
  MockConfig config;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  mutable std::mutex mutex;
  std::map<std::string, std::pair<double, std::int64_t>> sensors;
  std::map<std::string, double> actuators;
  std::map<std::string, std::string> storage;
  std::size_t next_key = 1;
  std::atomic<std::size_t> requests{0};

  static std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  static void reply(httplib::Response& res, int status, const JsonNode& body) {
    res.status = status;
    res.set_content(serialize_json(body), "application/json");
  }

  static void error(httplib::Response& res, int status, const std::string& what) {
    JsonNode body = JsonNode::object();
    body.add("error", JsonNode::string(what));
    reply(res, status, body);
  }

  // Parses a JSON object body holding one numeric member.
  static std::optional<double> number_member(const std::string& body,
                                             std::string_view field) {
    try {
      const auto doc = parse_json_preserving(body);
      if (!doc.is_object()) return std::nullopt;
      const auto* v = doc.find(field);
      if (!v || !v->is_number()) return std::nullopt;
      return v->as_number();
    } catch (const JsonError&) {
      return std::nullopt;
    }
  }

  void routes() {
    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      ++requests;
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get(R"(/sensors/([^/]+)/latest)", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
      const std::string name = req.matches[1];
      std::lock_guard lock(mutex);
      auto it = sensors.find(name);
      if (it == sensors.end()) return error(res, 404, "unknown sensor " + name);
      JsonNode body = JsonNode::object();
      body.add("sensor", JsonNode::string(name));
      body.add("value", JsonNode::number(it->second.first));
      body.add("unit", JsonNode::string(config.unit));
      body.add("timestamp", JsonNode::number_lexeme(std::to_string(it->second.second)));
      reply(res, 200, body);
    });

    server.Post(R"(/admin/sensors/([^/]+))", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
      const std::string name = req.matches[1];
      auto value = number_member(req.body, "value");
      if (!value) return error(res, 400, "body must be {\"value\": number}");
      {
        std::lock_guard lock(mutex);
        sensors[name] = {*value, now_ms()};
      }
      JsonNode body = JsonNode::object();
      body.add("sensor", JsonNode::string(name));
      body.add("value", JsonNode::number(*value));
      reply(res, 200, body);
    });

    server.Post(R"(/actuators/([^/]+)/input)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
      const std::string name = req.matches[1];
      auto percent = number_member(req.body, "percent");
      if (!percent || *percent < 0 || *percent > 100)
        return error(res, 400, "body must be {\"percent\": 0..100}");
      {
        std::lock_guard lock(mutex);
        actuators[name] = *percent;
      }
      JsonNode body = JsonNode::object();
      body.add("actuator", JsonNode::string(name));
      body.add("percent", JsonNode::number(*percent));
      reply(res, 200, body);
    });

    server.Get(R"(/actuators/([^/]+)/last)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
      const std::string name = req.matches[1];
      std::lock_guard lock(mutex);
      auto it = actuators.find(name);
      if (it == actuators.end()) return error(res, 404, "no input recorded for " + name);
      JsonNode body = JsonNode::object();
      body.add("actuator", JsonNode::string(name));
      body.add("percent", JsonNode::number(it->second));
      reply(res, 200, body);
    });

    server.Post("/storage/putObject", [this](const httplib::Request& req,
                                              httplib::Response& res) {
      try {
        const auto doc = parse_json_preserving(req.body);
        if (!doc.is_object() || !doc.find("@context"))
          return error(res, 400, "body must be a JSON-LD object");
      } catch (const JsonError& e) {
        return error(res, 400, e.what());
      }
      std::string key;
      {
        std::lock_guard lock(mutex);
        key = "obj-" + std::to_string(next_key++);
        storage[key] = req.body;
      }
      JsonNode body = JsonNode::object();
      body.add("key", JsonNode::string(key));
      reply(res, 201, body);
    });

    server.Get(R"(/storage/([^/]+))", [this](const httplib::Request& req,
                                            httplib::Response& res) {
      const std::string key = req.matches[1];
      std::lock_guard lock(mutex);
      auto it = storage.find(key);
      if (it == storage.end()) return error(res, 404, "no object " + key);
      res.status = 200;
      res.set_content(it->second, "application/ld+json");
    });
  }
};

MockServer::MockServer(MockConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  for (const auto& [name, value] : impl_->config.sensors)
    impl_->sensors[name] = {value, Impl::now_ms()};
  impl_->routes();

  auto& server = impl_->server;
  impl_->port = impl_->config.port == 0
                    ? server.bind_to_any_port(impl_->config.host)
                    : (server.bind_to_port(impl_->config.host, impl_->config.port)
                           ? impl_->config.port
                           : -1);
  if (impl_->port < 0)
    throw ServiceError(ServiceError::Kind::Network,
                       "cannot bind " + impl_->config.host + ":" +
                           std::to_string(impl_->config.port));
  impl_->thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
}

MockServer::~MockServer() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
  return "http://" + impl_->config.host + ":" + std::to_string(impl_->port);
}

void MockServer::seed_sensor(const std::string& name, double value) {
  std::lock_guard lock(impl_->mutex);
  impl_->sensors[name] = {value, Impl::now_ms()};
}

std::optional<double> MockServer::actuator_last(const std::string& name) const {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->actuators.find(name);
  if (it == impl_->actuators.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, std::string> MockServer::stored_objects() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->storage;
}

std::size_t MockServer::request_count() const { return impl_->requests.load(); }

void MockServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void MockServer::stop() { impl_->server.stop(); }

}  // namespace iotc
