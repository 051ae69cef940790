#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/sim/report.hpp"

namespace artemis::server {

enum class VictimStatus { Reported, Acknowledged, Treated };

std::string_view status_name(VictimStatus s) noexcept;
std::optional<VictimStatus> status_from_name(std::string_view name) noexcept;

struct StatusChange {
  VictimStatus status = VictimStatus::Reported;
  std::int64_t timestamp_ms = 0;
  std::string actor;
  bool operator==(const StatusChange&) const = default;
};

struct VictimEntry {
  std::string victim_id;
  sim::VictimReport latest;  // newest by (timestamp, report id)
  VictimStatus status = VictimStatus::Reported;
  std::optional<std::string> responder;
  std::vector<StatusChange> history;  // first entry is the earliest report
  bool operator==(const VictimEntry&) const = default;
};

enum class EventKind { ReportAdded, StatusChanged };

struct ServerEvent {
  std::uint64_t id = 0;
  EventKind kind = EventKind::ReportAdded;
  std::string report_id;  // ReportAdded only
  VictimEntry entry;      // snapshot after the change
};

nlohmann::json to_json(const VictimEntry& entry);
VictimEntry entry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ServerEvent& event);
ServerEvent event_from_json(const nlohmann::json& j);

struct VictimFilter {
  std::optional<VictimStatus> status;
  std::optional<data::Acuity> acuity;
};

// Registry contents as a pure fold over the event sequence.
struct RegistryState {
  std::map<std::string, VictimEntry> victims;
  std::map<std::string, std::string> report_owner;  // report id -> victim id
  std::vector<ServerEvent> events;

  std::uint64_t last_event_id() const noexcept { return events.empty() ? 0 : events.back().id; }
  // Throws DataError when ids do not increase.
  void apply(ServerEvent event);
};

struct RecoveredState {
  RegistryState state;
  std::vector<std::string> warnings;
  std::uintmax_t valid_bytes = 0;  // length of the intact prefix
};

// Rebuilds state from a JSON-lines event log. A torn or corrupt final line is
// dropped with a warning; a corrupt earlier line is a hard DataError. A
// missing file yields an empty state.
RecoveredState recover(const std::filesystem::path& log_path);

// Most severe first, then earliest latest-report timestamp, then victim id.
bool entry_order(const VictimEntry& a, const VictimEntry& b) noexcept;

struct SubmitResult {
  std::string victim_id;
  bool duplicate = false;  // report id seen before; nothing changed
};

// Thread-safe victim registry. Every mutation is appended to the log (when
// one is configured) and applied under a single lock, so log order, event
// order and state agree.
class Registry {
 public:
  using Clock = std::function<std::int64_t()>;

  static std::int64_t system_clock_ms();

  // In-memory registry.
  explicit Registry(Clock clock = system_clock_ms);
  // Recovers from `log_path` (trimming a torn tail) and appends to it.
  explicit Registry(const std::filesystem::path& log_path, Clock clock = system_clock_ms);
  ~Registry();

  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  // Idempotent on report id. ValidationError for an invalid report.
  SubmitResult submit_report(const sim::VictimReport& report);

  std::vector<VictimEntry> list_victims(const VictimFilter& filter = {}) const;
  std::optional<VictimEntry> find(const std::string& victim_id) const;

  // Allowed: Reported -> Acknowledged -> Treated. NotFoundError for an unknown
  // victim, ConflictError (state unchanged) for any other transition.
  VictimEntry update_status(const std::string& victim_id, VictimStatus next,
                            const std::string& responder);

  std::vector<ServerEvent> events_since(std::uint64_t since) const;
  // Blocks until an event newer than `since` exists, `timeout` passes or the
  // registry is shut down.
  std::vector<ServerEvent> wait_events(std::uint64_t since, std::chrono::milliseconds timeout) const;
  std::uint64_t last_event_id() const;

  // Wakes all waiters; subsequent waits return immediately.
  void shutdown();
  bool is_shut_down() const;

  const std::vector<std::string>& recovery_warnings() const noexcept { return warnings_; }

 private:
  void commit(ServerEvent event);

  Clock clock_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  RegistryState state_;
  std::optional<std::ofstream> log_;
  std::vector<std::string> warnings_;
  bool shut_down_ = false;
};

}  // namespace artemis::server
