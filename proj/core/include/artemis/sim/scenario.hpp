#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/data/vitals.hpp"
#include "artemis/sim/report.hpp"

namespace artemis::sim {

inline constexpr double kEarthRadiusM = 6371008.8;

// Planar (equirectangular) distance; adequate for sub-kilometre scenes.
double distance_m(GeoPoint a, GeoPoint b) noexcept;

// Point `meters` along the straight line from `from` to `to`; `to` when the
// remaining distance is shorter.
GeoPoint move_toward(GeoPoint from, GeoPoint to, double meters) noexcept;

struct FieldBounds {
  double min_lat = 0.0;
  double max_lat = 0.0;
  double min_lon = 0.0;
  double max_lon = 0.0;

  bool contains(GeoPoint p) const noexcept {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

struct VictimSpec {
  std::string id;
  GeoPoint position;
  data::VitalSigns vitals;  // ground truth
};

struct RobotSpec {
  std::string id;
  GeoPoint start;
  double speed_mps = 1.0;
  double detection_radius_m = 10.0;
};

// Temperature 0.4, heart rate 3, o2 1.5; vitals the robot does not sense
// (resp rate, blood pressure) pass through unchanged.
data::VitalSigns default_sensor_noise();

struct Scenario {
  FieldBounds bounds;
  std::vector<VictimSpec> victims;
  std::vector<RobotSpec> robots;  // sorted by id
  data::VitalSigns sensor_noise = default_sensor_noise();
  std::uint64_t seed = 0;
  std::int64_t start_time_ms = 1'700'000'000'000;
};

// Hard errors (ValidationError) name the offending field path, e.g.
// "victims[3].id: duplicate id 'V04'".
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

}  // namespace artemis::sim
