#include "artemis/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "artemis/error.hpp"
#include "artemis/json_io.hpp"

namespace artemis::sim {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Reader {
  std::vector<std::string> errors;

  double number(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      errors.push_back(path + "." + key + ": expected a number");
      return 0.0;
    }
    return it->get<double>();
  }

  std::string text(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
      errors.push_back(path + "." + key + ": expected a non-empty string");
      return {};
    }
    return it->get<std::string>();
  }
};

}  // namespace

double distance_m(GeoPoint a, GeoPoint b) noexcept {
  const double mean_lat = (a.lat + b.lat) / 2.0 * kDegToRad;
  const double dx = (b.lon - a.lon) * kDegToRad * std::cos(mean_lat) * kEarthRadiusM;
  const double dy = (b.lat - a.lat) * kDegToRad * kEarthRadiusM;
  return std::hypot(dx, dy);
}

GeoPoint move_toward(GeoPoint from, GeoPoint to, double meters) noexcept {
  const double d = distance_m(from, to);
  if (d <= meters || d == 0.0) return to;
  const double f = meters / d;
  return {from.lat + (to.lat - from.lat) * f, from.lon + (to.lon - from.lon) * f};
}

data::VitalSigns default_sensor_noise() {
  data::VitalSigns s;
  s.temperature = 0.4;
  s.heart_rate = 3.0;
  s.resp_rate = 0.0;
  s.o2_sat = 1.5;
  s.sbp = 0.0;
  s.dbp = 0.0;
  return s;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError({"scenario: expected a JSON object"});
  Reader rd;
  Scenario s;

  if (const auto it = j.find("bounds"); it == j.end() || !it->is_object()) {
    rd.errors.emplace_back("bounds: required object");
  } else {
    s.bounds.min_lat = rd.number(*it, "min_lat", "bounds");
    s.bounds.max_lat = rd.number(*it, "max_lat", "bounds");
    s.bounds.min_lon = rd.number(*it, "min_lon", "bounds");
    s.bounds.max_lon = rd.number(*it, "max_lon", "bounds");
    if (!(s.bounds.min_lat < s.bounds.max_lat) || !(s.bounds.min_lon < s.bounds.max_lon)) {
      rd.errors.emplace_back("bounds: min must be below max");
    }
  }
  s.seed = j.value("seed", std::uint64_t{0});
  s.start_time_ms = j.value("start_time_ms", s.start_time_ms);

  if (const auto it = j.find("sensor_noise"); it != j.end()) {
    // Keys may be table column names or the report's snake_case names.
    for (const auto& [key, value] : it->items()) {
      const auto f = data::feature_from_name(key);
      if (!f) {
        rd.errors.push_back("sensor_noise." + key + ": unknown vital");
      } else if (!value.is_number() || value.get<double>() < 0.0) {
        rd.errors.push_back("sensor_noise." + key + ": expected a non-negative number");
      } else {
        s.sensor_noise[*f] = value.get<double>();
      }
    }
  }

  std::set<std::string> robot_ids;
  const auto robots = j.find("robots");
  if (robots == j.end() || !robots->is_array()) {
    rd.errors.emplace_back("robots: required array");
  } else {
    for (std::size_t i = 0; i < robots->size(); ++i) {
      const auto& jr = (*robots)[i];
      const std::string path = "robots[" + std::to_string(i) + "]";
      RobotSpec r;
      r.id = rd.text(jr, "id", path);
      r.start = {rd.number(jr, "lat", path), rd.number(jr, "lon", path)};
      r.speed_mps = rd.number(jr, "speed_mps", path);
      r.detection_radius_m = rd.number(jr, "detection_radius_m", path);
      if (!r.id.empty() && !robot_ids.insert(r.id).second) {
        rd.errors.push_back(path + ".id: duplicate id '" + r.id + "'");
      }
      if (!(r.speed_mps > 0.0)) rd.errors.push_back(path + ".speed_mps: must be positive");
      if (!(r.detection_radius_m > 0.0)) {
        rd.errors.push_back(path + ".detection_radius_m: must be positive");
      }
      if (!s.bounds.contains(r.start)) rd.errors.push_back(path + ": position outside bounds");
      s.robots.push_back(std::move(r));
    }
  }

  std::set<std::string> victim_ids;
  const auto victims = j.find("victims");
  if (victims == j.end() || !victims->is_array()) {
    rd.errors.emplace_back("victims: required array");
  } else {
    for (std::size_t i = 0; i < victims->size(); ++i) {
      const auto& jv = (*victims)[i];
      const std::string path = "victims[" + std::to_string(i) + "]";
      VictimSpec v;
      v.id = rd.text(jv, "id", path);
      v.position = {rd.number(jv, "lat", path), rd.number(jv, "lon", path)};
      if (const auto vit = jv.find("vitals"); vit == jv.end()) {
        rd.errors.push_back(path + ".vitals: required");
      } else {
        v.vitals = vitals_from_json(*vit, rd.errors, path + ".vitals");
        for (const auto& name : data::kDefaultBounds.violations(v.vitals)) {
          rd.errors.push_back(path + ".vitals." + name + ": outside plausible bounds");
        }
      }
      if (!v.id.empty() && !victim_ids.insert(v.id).second) {
        rd.errors.push_back(path + ".id: duplicate id '" + v.id + "'");
      }
      if (!s.bounds.contains(v.position)) rd.errors.push_back(path + ": position outside bounds");
      s.victims.push_back(std::move(v));
    }
  }

  if (!rd.errors.empty()) throw ValidationError(std::move(rd.errors));
  std::ranges::sort(s.robots, {}, &RobotSpec::id);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json(path));
}

json to_json(const Scenario& s) {
  json robots = json::array();
  for (const auto& r : s.robots) {
    robots.push_back({{"id", r.id},
                      {"lat", r.start.lat},
                      {"lon", r.start.lon},
                      {"speed_mps", r.speed_mps},
                      {"detection_radius_m", r.detection_radius_m}});
  }
  json victims = json::array();
  for (const auto& v : s.victims) {
    victims.push_back({{"id", v.id},
                       {"lat", v.position.lat},
                       {"lon", v.position.lon},
                       {"vitals", vitals_to_json(v.vitals)}});
  }
  return {{"bounds",
           {{"min_lat", s.bounds.min_lat},
            {"max_lat", s.bounds.max_lat},
            {"min_lon", s.bounds.min_lon},
            {"max_lon", s.bounds.max_lon}}},
          {"seed", s.seed},
          {"start_time_ms", s.start_time_ms},
          {"sensor_noise", vitals_to_json(s.sensor_noise)},
          {"robots", robots},
          {"victims", victims}};
}

}  // namespace artemis::sim
