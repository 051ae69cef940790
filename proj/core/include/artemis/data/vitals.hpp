#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace artemis::data {

// Severity ordinal; 1 is the most severe.
enum class Acuity : int { Critical = 1, Immediate = 2, Moderate = 3, Delay = 4, Minor = 5 };

inline constexpr std::size_t kNumClasses = 5;
inline constexpr std::array<Acuity, kNumClasses> kAllAcuities = {
    Acuity::Critical, Acuity::Immediate, Acuity::Moderate, Acuity::Delay, Acuity::Minor};

constexpr int level(Acuity a) noexcept { return static_cast<int>(a); }
constexpr std::size_t class_index(Acuity a) noexcept { return static_cast<std::size_t>(a) - 1; }
constexpr Acuity acuity_at(std::size_t index) noexcept { return static_cast<Acuity>(index + 1); }

// Throws DataError unless 1 <= value <= 5.
Acuity acuity_from_level(int value);

enum class Feature : int { Temperature = 0, HeartRate, RespRate, O2Sat, Sbp, Dbp };

inline constexpr std::size_t kNumVitals = 6;
inline constexpr std::array<Feature, kNumVitals> kAllFeatures = {
    Feature::Temperature, Feature::HeartRate, Feature::RespRate,
    Feature::O2Sat,       Feature::Sbp,       Feature::Dbp};

// Column names of the triage table.
std::string_view feature_name(Feature f) noexcept;
std::optional<Feature> feature_from_name(std::string_view name) noexcept;
std::vector<Feature> parse_feature_list(std::span<const std::string> names);

// Main classifier inputs.
inline const std::vector<Feature> kClassifierFeatures = {Feature::Temperature, Feature::HeartRate,
                                                         Feature::O2Sat};
// Correlation / ensemble feature set.
inline const std::vector<Feature> kFiveFeatures = {Feature::Temperature, Feature::HeartRate,
                                                   Feature::RespRate, Feature::O2Sat, Feature::Sbp};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

// Temperature in degrees F, rates per minute, o2 in percent, pressures in mmHg.
// A NaN entry marks a value absent from the source row.
struct VitalSigns {
  double temperature = kMissing;
  double heart_rate = kMissing;
  double resp_rate = kMissing;
  double o2_sat = kMissing;
  double sbp = kMissing;
  double dbp = kMissing;
  std::optional<int> pain;

  double operator[](Feature f) const noexcept;
  double& operator[](Feature f) noexcept;
  bool complete() const noexcept;

  // Value equality where missing equals missing, so that exact duplicates are detectable.
  bool same_as(const VitalSigns& other) const noexcept;
};

struct TriageRecord {
  VitalSigns vitals;
  std::optional<Acuity> acuity;
  std::optional<std::string> chief_complaint;

  bool same_as(const TriageRecord& other) const noexcept;
};

// Physiological plausibility limits. Limits are strict: a boundary value is
// in range, only values beyond it are outliers.
struct OutlierBounds {
  double o2_min = 0.0;
  double o2_max = 100.0;
  double heart_rate_min = 0.0;
  double heart_rate_max = 220.0;
  double temperature_min = -130.0;
  double temperature_max = 135.0;
  double dbp_max = 170.0;
  double sbp_max = 190.0;

  bool contains(const VitalSigns& v) const noexcept;
  // Names of the vitals that violate the bounds (empty when in range).
  std::vector<std::string> violations(const VitalSigns& v) const;
  VitalSigns clamp(VitalSigns v) const noexcept;
};

inline const OutlierBounds kDefaultBounds{};

}  // namespace artemis::data
