#include "artemis/sim/mission.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "artemis/error.hpp"

namespace artemis::sim {

struct HttpSink::Impl {
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(5, 0);
  }
  httplib::Client client;
};

HttpSink::HttpSink(std::string base_url) : impl_(std::make_unique<Impl>(base_url)) {
  if (!impl_->client.is_valid()) throw ConfigError("invalid server URL '" + base_url + "'");
}

HttpSink::~HttpSink() = default;

void HttpSink::deliver(const VictimReport& report) {
  const auto res = impl_->client.Post("/api/reports", to_json(report).dump(), "application/json");
  if (!res) throw Error("report delivery failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error("report delivery rejected with HTTP " + std::to_string(res->status) + ": " +
                res->body);
  }
}

std::vector<std::string> MissionLog::undelivered() const {
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (!e.delivered) ids.push_back(e.report.report_id);
  }
  return ids;
}

namespace {

MissionEntry deliver_with_retry(ReportSink& sink, const VictimReport& report,
                                const RetryPolicy& policy) {
  MissionEntry entry{report, false, 0};
  double delay_ms = static_cast<double>(policy.base_delay.count());
  for (std::size_t attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    entry.attempts = attempt;
    try {
      sink.deliver(report);
      entry.delivered = true;
      return entry;
    } catch (const std::exception&) {
      if (attempt == policy.max_attempts) break;
    }
    const std::chrono::milliseconds wait{std::llround(delay_ms)};
    if (policy.sleep) {
      policy.sleep(wait);
    } else {
      std::this_thread::sleep_for(wait);
    }
    delay_ms *= policy.factor;
  }
  return entry;
}

}  // namespace

MissionLog run_mission(std::shared_ptr<const Scenario> scenario, const VitalsClassifier& classify,
                       ReportSink& sink, const MissionConfig& config) {
  if (!(config.step_dt > 0.0)) throw ConfigError("mission step must be positive");
  World world = make_world(std::move(scenario));
  MissionLog log;
  while (!world.done() && world.steps < config.max_steps) {
    auto step = simulate_step(world, config.step_dt, classify);
    world = std::move(step.world);
    for (const auto& report : step.reports) {
      log.entries.push_back(deliver_with_retry(sink, report, config.retry));
    }
  }
  log.steps = world.steps;
  log.complete = world.done();
  return log;
}

std::string mission_log_jsonl(const MissionLog& log) {
  std::string out;
  for (const auto& e : log.entries) {
    auto j = to_json(e.report);
    j["delivered"] = e.delivered;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_mission_log(const std::filesystem::path& path, const MissionLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << mission_log_jsonl(log);
}

}  // namespace artemis::sim
