#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/data/vitals.hpp"
#include "artemis/models/mlp.hpp"

namespace artemis::sim {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

// A robot's on-scene finding for one victim.
struct VictimReport {
  std::string report_id;  // unique per robot + victim
  std::string victim_id;
  std::string robot_id;
  GeoPoint geotag;
  data::VitalSigns vitals;
  data::Acuity acuity = data::Acuity::Minor;
  models::Probabilities probabilities{};
  std::int64_t timestamp_ms = 0;  // UTC milliseconds since epoch
  bool fault = false;             // sensor fault; acuity forced to most severe

  bool operator==(const VictimReport&) const;
};

nlohmann::json to_json(const VictimReport& report);

// Parses and validates; ValidationError lists every failed field.
VictimReport report_from_json(const nlohmann::json& j);

// Invariant checks on an already-built report (empty when valid).
std::vector<std::string> validate(const VictimReport& report);

nlohmann::json vitals_to_json(const data::VitalSigns& v);
data::VitalSigns vitals_from_json(const nlohmann::json& j, std::vector<std::string>& errors,
                                  const std::string& path);

}  // namespace artemis::sim
