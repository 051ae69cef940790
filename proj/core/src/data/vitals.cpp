#include "artemis/data/vitals.hpp"

#include <algorithm>
#include <cctype>

#include "artemis/error.hpp"

namespace artemis::data {

namespace {

constexpr std::array<std::string_view, kNumVitals> kFeatureNames = {
    "temperature", "heartrate", "resprate", "o2sat", "sbp", "dbp"};

// Missing equals missing for duplicate detection.
bool value_equal(double a, double b) noexcept {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

Acuity acuity_from_level(int value) {
  if (value < 1 || value > 5) {
    throw DataError("acuity must be in 1..5, got " + std::to_string(value));
  }
  return static_cast<Acuity>(value);
}

std::string_view feature_name(Feature f) noexcept {
  return kFeatureNames[static_cast<std::size_t>(f)];
}

std::optional<Feature> feature_from_name(std::string_view name) noexcept {
  std::string lowered(name);
  std::erase(lowered, '_');
  std::ranges::transform(lowered, lowered.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (lowered == kFeatureNames[i]) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

std::vector<Feature> parse_feature_list(std::span<const std::string> names) {
  std::vector<Feature> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    auto f = feature_from_name(name);
    if (!f) throw ConfigError("unknown feature '" + name + "'");
    out.push_back(*f);
  }
  return out;
}

double VitalSigns::operator[](Feature f) const noexcept {
  switch (f) {
    case Feature::Temperature: return temperature;
    case Feature::HeartRate: return heart_rate;
    case Feature::RespRate: return resp_rate;
    case Feature::O2Sat: return o2_sat;
    case Feature::Sbp: return sbp;
    case Feature::Dbp: return dbp;
  }
  return kMissing;
}

double& VitalSigns::operator[](Feature f) noexcept {
  switch (f) {
    case Feature::Temperature: return temperature;
    case Feature::HeartRate: return heart_rate;
    case Feature::RespRate: return resp_rate;
    case Feature::O2Sat: return o2_sat;
    case Feature::Sbp: return sbp;
    case Feature::Dbp: break;
  }
  return dbp;
}

bool VitalSigns::complete() const noexcept {
  return std::ranges::none_of(kAllFeatures, [this](Feature f) { return is_missing((*this)[f]); });
}

bool VitalSigns::same_as(const VitalSigns& other) const noexcept {
  return std::ranges::all_of(kAllFeatures,
                             [&](Feature f) { return value_equal((*this)[f], other[f]); }) &&
         pain == other.pain;
}

bool TriageRecord::same_as(const TriageRecord& other) const noexcept {
  return vitals.same_as(other.vitals) && acuity == other.acuity &&
         chief_complaint == other.chief_complaint;
}

std::vector<std::string> OutlierBounds::violations(const VitalSigns& v) const {
  std::vector<std::string> out;
  auto check = [&](Feature f, double lo, double hi) {
    const double x = v[f];
    if (is_missing(x) || x < lo || x > hi) out.emplace_back(feature_name(f));
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  check(Feature::Temperature, temperature_min, temperature_max);
  check(Feature::HeartRate, heart_rate_min, heart_rate_max);
  check(Feature::RespRate, -inf, inf);
  check(Feature::O2Sat, o2_min, o2_max);
  check(Feature::Sbp, -inf, sbp_max);
  check(Feature::Dbp, -inf, dbp_max);
  return out;
}

bool OutlierBounds::contains(const VitalSigns& v) const noexcept {
  if (!v.complete()) return false;
  return v.o2_sat >= o2_min && v.o2_sat <= o2_max && v.heart_rate >= heart_rate_min &&
         v.heart_rate <= heart_rate_max && v.temperature >= temperature_min &&
         v.temperature <= temperature_max && v.dbp <= dbp_max && v.sbp <= sbp_max;
}

VitalSigns OutlierBounds::clamp(VitalSigns v) const noexcept {
  v.o2_sat = std::clamp(v.o2_sat, o2_min, o2_max);
  v.heart_rate = std::clamp(v.heart_rate, heart_rate_min, heart_rate_max);
  v.temperature = std::clamp(v.temperature, temperature_min, temperature_max);
  v.dbp = std::min(v.dbp, dbp_max);
  v.sbp = std::min(v.sbp, sbp_max);
  return v;
}

}  // namespace artemis::data
