#include "artemis/server/registry.hpp"

#include <algorithm>
#include <tuple>

#include "artemis/error.hpp"

namespace artemis::server {

namespace {

using nlohmann::json;

std::string_view kind_name(EventKind k) noexcept {
  return k == EventKind::ReportAdded ? "ReportAdded" : "StatusChanged";
}

bool newer(const sim::VictimReport& a, const sim::VictimReport& b) noexcept {
  return std::tie(a.timestamp_ms, a.report_id) > std::tie(b.timestamp_ms, b.report_id);
}

bool matches(const VictimEntry& e, const VictimFilter& f) noexcept {
  return (!f.status || e.status == *f.status) && (!f.acuity || e.latest.acuity == *f.acuity);
}

}  // namespace

std::string_view status_name(VictimStatus s) noexcept {
  switch (s) {
    case VictimStatus::Reported: return "Reported";
    case VictimStatus::Acknowledged: return "Acknowledged";
    case VictimStatus::Treated: return "Treated";
  }
  return "?";
}

std::optional<VictimStatus> status_from_name(std::string_view name) noexcept {
  for (auto s : {VictimStatus::Reported, VictimStatus::Acknowledged, VictimStatus::Treated}) {
    if (status_name(s) == name) return s;
  }
  return std::nullopt;
}

json to_json(const VictimEntry& e) {
  json history = json::array();
  for (const auto& h : e.history) {
    history.push_back(
        {{"status", status_name(h.status)}, {"timestamp_ms", h.timestamp_ms}, {"actor", h.actor}});
  }
  return {{"victim_id", e.victim_id},
          {"latest_report", sim::to_json(e.latest)},
          {"status", status_name(e.status)},
          {"responder_id", e.responder ? json(*e.responder) : json(nullptr)},
          {"history", history}};
}

VictimEntry entry_from_json(const json& j) {
  try {
    VictimEntry e;
    e.victim_id = j.at("victim_id").get<std::string>();
    e.latest = sim::report_from_json(j.at("latest_report"));
    const auto status = status_from_name(j.at("status").get<std::string>());
    if (!status) throw DataError("unknown status");
    e.status = *status;
    if (const auto& r = j.at("responder_id"); !r.is_null()) e.responder = r.get<std::string>();
    for (const auto& h : j.at("history")) {
      const auto hs = status_from_name(h.at("status").get<std::string>());
      if (!hs) throw DataError("unknown status in history");
      e.history.push_back(
          {*hs, h.at("timestamp_ms").get<std::int64_t>(), h.at("actor").get<std::string>()});
    }
    return e;
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed victim entry: ") + ex.what());
  }
}

json to_json(const ServerEvent& ev) {
  json j = {{"id", ev.id}, {"kind", kind_name(ev.kind)}, {"entry", to_json(ev.entry)}};
  if (ev.kind == EventKind::ReportAdded) j["report_id"] = ev.report_id;
  return j;
}

ServerEvent event_from_json(const json& j) {
  try {
    ServerEvent ev;
    ev.id = j.at("id").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "ReportAdded") {
      ev.kind = EventKind::ReportAdded;
      ev.report_id = j.at("report_id").get<std::string>();
    } else if (kind == "StatusChanged") {
      ev.kind = EventKind::StatusChanged;
    } else {
      throw DataError("unknown event kind '" + kind + "'");
    }
    ev.entry = entry_from_json(j.at("entry"));
    return ev;
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed event: ") + ex.what());
  }
}

void RegistryState::apply(ServerEvent event) {
  if (event.id <= last_event_id()) {
    throw DataError("event id " + std::to_string(event.id) + " does not follow " +
                    std::to_string(last_event_id()));
  }
  if (event.kind == EventKind::ReportAdded) {
    report_owner[event.report_id] = event.entry.victim_id;
  }
  victims[event.entry.victim_id] = event.entry;
  events.push_back(std::move(event));
}

RecoveredState recover(const std::filesystem::path& log_path) {
  RecoveredState out;
  std::ifstream in(log_path, std::ios::binary);
  if (!in) {
    if (std::filesystem::exists(log_path)) {
      throw DataError("cannot read event log '" + log_path.string() + "'");
    }
    return out;
  }
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : content.size();
    const std::string_view line(content.data() + pos, end - pos);
    const std::size_t next = terminated ? nl + 1 : content.size();
    const bool last = next >= content.size() ||
                      content.find_first_not_of(" \t\r\n", next) == std::string::npos;
    ++line_no;

    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      pos = next;
      if (terminated) out.valid_bytes = next;
      continue;
    }
    try {
      out.state.apply(event_from_json(json::parse(line)));
      // An unterminated but complete final line is kept; the writer re-terminates it.
      out.valid_bytes = terminated ? next : end;
    } catch (const std::exception& e) {
      if (!last) {
        throw DataError("event log '" + log_path.string() + "' line " + std::to_string(line_no) +
                        " is corrupt: " + e.what());
      }
      out.warnings.push_back("discarded torn final line " + std::to_string(line_no) + " of '" +
                             log_path.string() + "'");
      break;
    }
    pos = next;
  }
  return out;
}

bool entry_order(const VictimEntry& a, const VictimEntry& b) noexcept {
  const int la = data::level(a.latest.acuity);
  const int lb = data::level(b.latest.acuity);
  return std::tie(la, a.latest.timestamp_ms, a.victim_id) <
         std::tie(lb, b.latest.timestamp_ms, b.victim_id);
}

std::int64_t Registry::system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Registry::Registry(Clock clock) : clock_(std::move(clock)) {}

Registry::Registry(const std::filesystem::path& log_path, Clock clock) : clock_(std::move(clock)) {
  auto recovered = recover(log_path);
  state_ = std::move(recovered.state);
  warnings_ = std::move(recovered.warnings);
  if (std::filesystem::exists(log_path) &&
      std::filesystem::file_size(log_path) != recovered.valid_bytes) {
    std::filesystem::resize_file(log_path, recovered.valid_bytes);
  }
  log_.emplace(log_path, std::ios::binary | std::ios::app);
  if (!*log_) throw DataError("cannot open event log '" + log_path.string() + "' for append");
  // Re-terminate a complete final line that lost its newline.
  if (recovered.valid_bytes > 0) {
    std::ifstream check(log_path, std::ios::binary);
    check.seekg(static_cast<std::streamoff>(recovered.valid_bytes) - 1);
    if (check.get() != '\n') *log_ << '\n' << std::flush;
  }
}

Registry::~Registry() { shutdown(); }

void Registry::commit(ServerEvent event) {
  if (log_) {
    *log_ << to_json(event).dump() << '\n' << std::flush;
    if (!*log_) throw Error("event log append failed");
  }
  state_.apply(std::move(event));
  changed_.notify_all();
}

SubmitResult Registry::submit_report(const sim::VictimReport& report) {
  if (auto errors = sim::validate(report); !errors.empty()) {
    throw ValidationError(std::move(errors));
  }
  std::lock_guard lock(mutex_);
  if (const auto it = state_.report_owner.find(report.report_id); it != state_.report_owner.end()) {
    return {it->second, true};
  }

  VictimEntry entry;
  if (const auto it = state_.victims.find(report.victim_id); it != state_.victims.end()) {
    entry = it->second;
    if (newer(report, entry.latest)) entry.latest = report;
    // The creation record always reflects the earliest report, whatever the arrival order.
    auto& first = entry.history.front();
    if (std::tie(report.timestamp_ms, report.robot_id) < std::tie(first.timestamp_ms, first.actor)) {
      first.timestamp_ms = report.timestamp_ms;
      first.actor = report.robot_id;
    }
  } else {
    entry.victim_id = report.victim_id;
    entry.latest = report;
    entry.history.push_back({VictimStatus::Reported, report.timestamp_ms, report.robot_id});
  }

  commit({state_.last_event_id() + 1, EventKind::ReportAdded, report.report_id, std::move(entry)});
  return {report.victim_id, false};
}

std::vector<VictimEntry> Registry::list_victims(const VictimFilter& filter) const {
  std::vector<VictimEntry> out;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, entry] : state_.victims) {
      if (matches(entry, filter)) out.push_back(entry);
    }
  }
  std::ranges::sort(out, entry_order);
  return out;
}

std::optional<VictimEntry> Registry::find(const std::string& victim_id) const {
  std::lock_guard lock(mutex_);
  const auto it = state_.victims.find(victim_id);
  if (it == state_.victims.end()) return std::nullopt;
  return it->second;
}

VictimEntry Registry::update_status(const std::string& victim_id, VictimStatus next,
                                    const std::string& responder) {
  std::lock_guard lock(mutex_);
  const auto it = state_.victims.find(victim_id);
  if (it == state_.victims.end()) throw NotFoundError("unknown victim '" + victim_id + "'");

  const VictimStatus current = it->second.status;
  const bool legal = (current == VictimStatus::Reported && next == VictimStatus::Acknowledged) ||
                     (current == VictimStatus::Acknowledged && next == VictimStatus::Treated);
  if (!legal) {
    throw ConflictError("victim '" + victim_id + "' is " + std::string(status_name(current)) +
                        "; cannot move to " + std::string(status_name(next)));
  }
  VictimEntry entry = it->second;
  entry.status = next;
  entry.responder = responder;
  entry.history.push_back({next, clock_(), responder});
  commit({state_.last_event_id() + 1, EventKind::StatusChanged, {}, entry});
  return entry;
}

std::vector<ServerEvent> Registry::events_since(std::uint64_t since) const {
  std::lock_guard lock(mutex_);
  const auto& events = state_.events;
  // ids are gap-free from the first event, but search rather than assume.
  auto it = std::ranges::upper_bound(events, since, {}, &ServerEvent::id);
  return {it, events.end()};
}

std::vector<ServerEvent> Registry::wait_events(std::uint64_t since,
                                               std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  changed_.wait_for(lock, timeout,
                    [&] { return shut_down_ || state_.last_event_id() > since; });
  auto it = std::ranges::upper_bound(state_.events, since, {}, &ServerEvent::id);
  return {it, state_.events.end()};
}

std::uint64_t Registry::last_event_id() const {
  std::lock_guard lock(mutex_);
  return state_.last_event_id();
}

void Registry::shutdown() {
  {
    std::lock_guard lock(mutex_);
    shut_down_ = true;
  }
  changed_.notify_all();
}

bool Registry::is_shut_down() const {
  std::lock_guard lock(mutex_);
  return shut_down_;
}

}  // namespace artemis::server
