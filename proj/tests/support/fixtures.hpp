#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "artemis/data/vitals.hpp"
#include "artemis/sim/report.hpp"

namespace artemis::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

data::VitalSigns vitals(double temp, double hr, double rr, double o2, double sbp, double dbp);
data::VitalSigns normal_vitals();
data::TriageRecord record(const data::VitalSigns& v, std::optional<int> acuity);

// Valid report for `victim` at a fixed geotag.
sim::VictimReport make_report(const std::string& robot, const std::string& victim,
                              data::Acuity acuity, std::int64_t timestamp_ms);

std::string read_file(const std::filesystem::path& path);
std::filesystem::path data_dir();

}  // namespace artemis::testing
