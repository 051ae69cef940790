#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace artemis::testing {

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("artemis-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

data::VitalSigns vitals(double temp, double hr, double rr, double o2, double sbp, double dbp) {
  data::VitalSigns v;
  v.temperature = temp;
  v.heart_rate = hr;
  v.resp_rate = rr;
  v.o2_sat = o2;
  v.sbp = sbp;
  v.dbp = dbp;
  return v;
}

data::VitalSigns normal_vitals() { return vitals(98.6, 75, 16, 98, 120, 80); }

data::TriageRecord record(const data::VitalSigns& v, std::optional<int> acuity) {
  data::TriageRecord r;
  r.vitals = v;
  if (acuity) r.acuity = data::acuity_from_level(*acuity);
  return r;
}

sim::VictimReport make_report(const std::string& robot, const std::string& victim,
                              data::Acuity acuity, std::int64_t timestamp_ms) {
  sim::VictimReport r;
  r.report_id = robot + ":" + victim;
  r.victim_id = victim;
  r.robot_id = robot;
  r.geotag = {40.0005, -82.9990};
  r.vitals = normal_vitals();
  r.acuity = acuity;
  r.probabilities = {0.0, 0.0, 0.0, 0.0, 0.0};
  r.probabilities[data::class_index(acuity)] = 1.0;
  r.timestamp_ms = timestamp_ms;
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path data_dir() { return ARTEMIS_DATA_DIR; }

}  // namespace artemis::testing
