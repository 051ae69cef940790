#include "artemis/sim/report.hpp"

#include <cmath>
#include <numeric>

#include "artemis/error.hpp"

namespace artemis::sim {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, data::kNumVitals> kVitalKeys = {
    "temperature", "heart_rate", "resp_rate", "o2_sat", "sbp", "dbp"};

}  // namespace

bool VictimReport::operator==(const VictimReport& o) const {
  return report_id == o.report_id && victim_id == o.victim_id && robot_id == o.robot_id &&
         geotag == o.geotag && vitals.same_as(o.vitals) && acuity == o.acuity &&
         probabilities == o.probabilities && timestamp_ms == o.timestamp_ms && fault == o.fault;
}

json vitals_to_json(const data::VitalSigns& v) {
  json j = json::object();
  for (std::size_t i = 0; i < data::kNumVitals; ++i) {
    const double x = v[data::kAllFeatures[i]];
    j[std::string(kVitalKeys[i])] = data::is_missing(x) ? json(nullptr) : json(x);
  }
  if (v.pain) j["pain"] = *v.pain;
  return j;
}

data::VitalSigns vitals_from_json(const json& j, std::vector<std::string>& errors,
                                  const std::string& path) {
  data::VitalSigns v;
  if (!j.is_object()) {
    errors.push_back(path + ": expected an object");
    return v;
  }
  for (std::size_t i = 0; i < data::kNumVitals; ++i) {
    const std::string key(kVitalKeys[i]);
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      errors.push_back(path + "." + key + ": expected a number");
      continue;
    }
    v[data::kAllFeatures[i]] = it->get<double>();
  }
  if (const auto it = j.find("pain"); it != j.end() && !it->is_null()) {
    if (it->is_number_integer()) {
      v.pain = it->get<int>();
    } else {
      errors.emplace_back(path + ".pain: expected an integer");
    }
  }
  return v;
}

json to_json(const VictimReport& r) {
  return {{"report_id", r.report_id},
          {"victim_id", r.victim_id},
          {"robot_id", r.robot_id},
          {"lat", r.geotag.lat},
          {"lon", r.geotag.lon},
          {"vitals", vitals_to_json(r.vitals)},
          {"acuity", data::level(r.acuity)},
          {"probabilities", r.probabilities},
          {"timestamp_ms", r.timestamp_ms},
          {"fault", r.fault}};
}

std::vector<std::string> validate(const VictimReport& r) {
  std::vector<std::string> errors;
  if (r.report_id.empty()) errors.emplace_back("report_id: must not be empty");
  if (r.victim_id.empty()) errors.emplace_back("victim_id: must not be empty");
  if (r.robot_id.empty()) errors.emplace_back("robot_id: must not be empty");
  if (!(std::abs(r.geotag.lat) <= 90.0)) errors.emplace_back("lat: must lie in [-90, 90]");
  if (!(std::abs(r.geotag.lon) <= 180.0)) errors.emplace_back("lon: must lie in [-180, 180]");
  for (const auto& name : data::kDefaultBounds.violations(r.vitals)) {
    errors.push_back("vitals." + name + ": missing or outside plausible bounds");
  }
  bool nonnegative = true;
  for (double p : r.probabilities) nonnegative = nonnegative && p >= 0.0 && std::isfinite(p);
  const double sum = std::accumulate(r.probabilities.begin(), r.probabilities.end(), 0.0);
  if (!nonnegative) errors.emplace_back("probabilities: entries must be non-negative");
  if (!(std::abs(sum - 1.0) <= 1e-6)) errors.emplace_back("probabilities: must sum to 1");
  if (r.timestamp_ms < 0) errors.emplace_back("timestamp_ms: must be non-negative");
  return errors;
}

VictimReport report_from_json(const json& j) {
  std::vector<std::string> errors;
  VictimReport r;
  if (!j.is_object()) throw ValidationError({"body: expected a JSON object"});

  auto text = [&](const char* key, std::string& out) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      errors.push_back(std::string(key) + ": expected a string");
    } else {
      out = it->get<std::string>();
    }
  };
  auto number = [&](const char* key, double& out) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      errors.push_back(std::string(key) + ": expected a number");
    } else {
      out = it->get<double>();
    }
  };

  text("report_id", r.report_id);
  text("victim_id", r.victim_id);
  text("robot_id", r.robot_id);
  number("lat", r.geotag.lat);
  number("lon", r.geotag.lon);

  if (const auto it = j.find("vitals"); it == j.end()) {
    errors.emplace_back("vitals: required");
  } else {
    std::vector<std::string> vital_errors;
    r.vitals = vitals_from_json(*it, vital_errors, "vitals");
    errors.insert(errors.end(), vital_errors.begin(), vital_errors.end());
  }

  if (const auto it = j.find("acuity"); it == j.end() || !it->is_number_integer() ||
                                        it->get<int>() < 1 || it->get<int>() > 5) {
    errors.emplace_back("acuity: expected an integer in 1..5");
  } else {
    r.acuity = data::acuity_from_level(it->get<int>());
  }

  if (const auto it = j.find("probabilities");
      it == j.end() || !it->is_array() || it->size() != data::kNumClasses) {
    errors.emplace_back("probabilities: expected an array of 5 numbers");
  } else {
    for (std::size_t i = 0; i < data::kNumClasses; ++i) {
      if (!(*it)[i].is_number()) {
        errors.emplace_back("probabilities[" + std::to_string(i) + "]: expected a number");
      } else {
        r.probabilities[i] = (*it)[i].get<double>();
      }
    }
  }

  if (const auto it = j.find("timestamp_ms"); it == j.end() || !it->is_number_integer()) {
    errors.emplace_back("timestamp_ms: expected an integer");
  } else {
    r.timestamp_ms = it->get<std::int64_t>();
  }
  if (const auto it = j.find("fault"); it != j.end()) {
    if (it->is_boolean()) {
      r.fault = it->get<bool>();
    } else {
      errors.emplace_back("fault: expected a boolean");
    }
  }

  if (errors.empty()) errors = validate(r);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return r;
}

}  // namespace artemis::sim
