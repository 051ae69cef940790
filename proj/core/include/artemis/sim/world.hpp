#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artemis/models/mlp.hpp"
#include "artemis/sim/scenario.hpp"

namespace artemis::sim {

enum class RobotMode { Scanning, Approaching, Measuring, Reporting };

std::string_view mode_name(RobotMode mode) noexcept;

inline constexpr double kArrivalToleranceM = 0.5;

struct RobotState {
  std::string id;
  std::size_t spec_index = 0;  // into Scenario::robots
  GeoPoint position;
  RobotMode mode = RobotMode::Scanning;
  std::optional<std::size_t> target;  // victim index while Approaching/Measuring/Reporting
  std::set<std::string> visited;      // victims this robot has reported
  std::size_t waypoint = 0;           // next sweep waypoint while nothing is in range
  std::optional<VictimReport> pending;  // filled by Measuring, emitted by Reporting
};

// Vitals -> label; the simulator's only view of the model.
using VitalsClassifier = std::function<models::TriageLabel(const data::VitalSigns&)>;

struct World {
  std::shared_ptr<const Scenario> scenario;
  std::vector<RobotState> robots;   // ascending robot id
  std::vector<bool> reported;       // per victim
  std::vector<GeoPoint> sweep;      // shared lawnmower waypoints
  std::size_t steps = 0;
  double elapsed_s = 0.0;

  std::size_t reported_count() const noexcept;
  bool done() const noexcept;
  // Victim index claimed by a robot other than `except`, if any.
  bool claimed(std::size_t victim, const std::string& except = {}) const noexcept;
};

World make_world(std::shared_ptr<const Scenario> scenario);

// Boustrophedon waypoints whose lanes lie at most 0.75 x the smallest
// detection radius from any point of the field.
std::vector<GeoPoint> sweep_waypoints(const Scenario& scenario);

// Unreported, unclaimed victims within the robot's detection radius, nearest
// first (ties by victim id).
std::vector<std::size_t> detect(const RobotState& robot, const World& world);

// Gaussian sensor noise per vital, clamped to the outlier bounds.
data::VitalSigns sense_vitals(const data::VitalSigns& truth, const data::VitalSigns& sigmas,
                              std::uint64_t seed);

struct StepResult {
  World world;
  std::vector<VictimReport> reports;
};

// Advances every robot by one step of `dt` seconds, lowest robot id first.
// Scanning claims the nearest detected victim (or sweeps when none is in
// range); Approaching moves at speed * dt and switches to Measuring within
// 0.5 m; Measuring senses and classifies; Reporting emits the report and
// returns to Scanning. dt == 0 is a no-op.
StepResult simulate_step(const World& world, double dt, const VitalsClassifier& classify);

}  // namespace artemis::sim
