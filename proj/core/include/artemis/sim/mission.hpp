#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "artemis/sim/world.hpp"

namespace artemis::sim {

// Destination of emitted reports. deliver() throws on failure.
class ReportSink {
 public:
  virtual ~ReportSink() = default;
  virtual void deliver(const VictimReport& report) = 0;
};

class CollectingSink final : public ReportSink {
 public:
  void deliver(const VictimReport& report) override { reports_.push_back(report); }
  const std::vector<VictimReport>& reports() const noexcept { return reports_; }

 private:
  std::vector<VictimReport> reports_;
};

// POSTs each report as JSON to <base_url>/api/reports; any non-200 answer is a
// delivery failure.
class HttpSink final : public ReportSink {
 public:
  explicit HttpSink(std::string base_url);
  ~HttpSink() override;
  void deliver(const VictimReport& report) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RetryPolicy {
  std::chrono::milliseconds base_delay{100};
  double factor = 2.0;
  std::size_t max_attempts = 5;
  std::function<void(std::chrono::milliseconds)> sleep;  // std::this_thread::sleep_for if empty
};

struct MissionEntry {
  VictimReport report;
  bool delivered = false;
  std::size_t attempts = 0;
};

struct MissionLog {
  std::vector<MissionEntry> entries;  // emission order
  std::size_t steps = 0;
  bool complete = false;  // every victim reported

  std::vector<std::string> undelivered() const;
};

struct MissionConfig {
  double step_dt = 1.0;
  std::size_t max_steps = 100000;
  RetryPolicy retry;
};

// Steps the world until every victim is reported or max_steps elapse,
// delivering each report to `sink` as it is emitted.
MissionLog run_mission(std::shared_ptr<const Scenario> scenario, const VitalsClassifier& classify,
                       ReportSink& sink, const MissionConfig& config = {});

// JSON-lines, one report per line plus its delivery flag.
std::string mission_log_jsonl(const MissionLog& log);
void write_mission_log(const std::filesystem::path& path, const MissionLog& log);

}  // namespace artemis::sim
