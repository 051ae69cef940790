#include "artemis/server/http.hpp"

#include <charconv>

#include <httplib.h>

#include "artemis/error.hpp"

namespace artemis::server {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

std::optional<std::uint64_t> parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string sse_frame(const ServerEvent& ev) {
  std::string out = "id: " + std::to_string(ev.id) + "\n";
  out += "event: ";
  out += ev.kind == EventKind::ReportAdded ? "ReportAdded" : "StatusChanged";
  out += "\ndata: " + to_json(ev).dump() + "\n\n";
  return out;
}

}  // namespace

struct CommandServer::Impl {
  httplib::Server http;
};

CommandServer::CommandServer(ServerConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  registry_ = config_.log_path ? std::make_unique<Registry>(*config_.log_path)
                               : std::make_unique<Registry>();

  auto& http = impl_->http;
  const std::size_t workers = config_.worker_threads;
  http.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  // No SO_REUSEPORT: a second server on a taken port must fail to bind.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
    res.status = 204;
  });

  Registry& reg = *registry_;

  http.Post("/api/reports", [&reg](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      send_json(res, 400, {{"errors", {std::string("body: invalid JSON: ") + e.what()}}});
      return;
    }
    try {
      const auto result = reg.submit_report(sim::report_from_json(body));
      send_json(res, 200, {{"victim_id", result.victim_id}, {"duplicate", result.duplicate}});
    } catch (const ValidationError& e) {
      send_json(res, 400, {{"errors", e.failures()}});
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  });

  http.Get("/api/victims", [&reg](const httplib::Request& req, httplib::Response& res) {
    VictimFilter filter;
    if (req.has_param("status") && !req.get_param_value("status").empty()) {
      filter.status = status_from_name(req.get_param_value("status"));
      if (!filter.status) return send_error(res, 400, "unknown status filter");
    }
    if (req.has_param("acuity") && !req.get_param_value("acuity").empty()) {
      const auto v = parse_u64(req.get_param_value("acuity"));
      if (!v || *v < 1 || *v > 5) return send_error(res, 400, "acuity filter must be 1..5");
      filter.acuity = data::acuity_from_level(static_cast<int>(*v));
    }
    json out = json::array();
    for (const auto& e : reg.list_victims(filter)) out.push_back(to_json(e));
    send_json(res, 200, out);
  });

  http.Post(R"(/api/victims/([^/]+)/status)",
            [&reg](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1];
              json body;
              try {
                body = json::parse(req.body);
              } catch (const json::parse_error&) {
                return send_error(res, 400, "body: invalid JSON");
              }
              const auto status = body.is_object() && body.contains("status") &&
                                          body["status"].is_string()
                                      ? status_from_name(body["status"].get<std::string>())
                                      : std::nullopt;
              if (!status) return send_error(res, 400, "status: expected Acknowledged or Treated");
              std::string responder;
              if (body.contains("responder") && body["responder"].is_string()) {
                responder = body["responder"].get<std::string>();
              }
              try {
                send_json(res, 200, to_json(reg.update_status(id, *status, responder)));
              } catch (const NotFoundError& e) {
                send_error(res, 404, e.what());
              } catch (const ConflictError& e) {
                send_error(res, 409, e.what());
              } catch (const std::exception& e) {
                send_error(res, 500, e.what());
              }
            });

  const auto poll = config_.stream_poll;
  http.Get("/api/events", [&reg, poll](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t since = 0;
    if (req.has_param("since")) {
      const auto v = parse_u64(req.get_param_value("since"));
      if (!v) return send_error(res, 400, "since must be a non-negative integer");
      since = *v;
    } else if (req.has_header("Last-Event-ID")) {
      since = parse_u64(req.get_header_value("Last-Event-ID")).value_or(0);
    }
    res.set_header("Cache-Control", "no-cache");
    auto cursor = std::make_shared<std::uint64_t>(since);
    res.set_chunked_content_provider(
        "text/event-stream", [&reg, poll, cursor](std::size_t, httplib::DataSink& sink) {
          if (reg.is_shut_down()) return false;
          const auto events = reg.wait_events(*cursor, poll);
          std::string chunk;
          for (const auto& ev : events) {
            chunk += sse_frame(ev);
            *cursor = ev.id;
          }
          if (chunk.empty()) chunk = ": keep-alive\n\n";
          return sink.is_writable() && sink.write(chunk.data(), chunk.size());
        });
  });

  if (config_.static_dir) {
    if (!http.set_mount_point("/", config_.static_dir->string())) {
      throw ConfigError("static directory '" + config_.static_dir->string() + "' not found");
    }
  }
}

CommandServer::~CommandServer() { stop(); }

int CommandServer::bind() {
  auto& http = impl_->http;
  if (config_.port == 0) {
    port_ = http.bind_to_any_port(config_.host);
  } else {
    port_ = http.bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ < 0) {
    throw ConfigError("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
  return port_;
}

void CommandServer::run() {
  if (port_ < 0) bind();
  impl_->http.listen_after_bind();
}

int CommandServer::start() {
  const int p = bind();
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return p;
}

void CommandServer::stop() {
  registry_->shutdown();
  impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

std::string CommandServer::base_url() const {
  return "http://" + config_.host + ":" + std::to_string(port_);
}

}  // namespace artemis::server
