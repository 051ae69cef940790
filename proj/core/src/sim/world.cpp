#include "artemis/sim/world.hpp"

#include <algorithm>
#include <cmath>

#include "artemis/error.hpp"
#include "artemis/random.hpp"

namespace artemis::sim {

namespace {

std::uint64_t measurement_seed(const Scenario& s, std::size_t victim, std::size_t robot,
                               std::size_t attempt) {
  return derive_seed(derive_seed(derive_seed(s.seed, victim), robot), attempt);
}

std::size_t nearest_waypoint(const std::vector<GeoPoint>& sweep, GeoPoint p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (distance_m(p, sweep[i]) < distance_m(p, sweep[best])) best = i;
  }
  return best;
}

VictimReport measure(const World& world, const RobotState& robot, std::size_t victim,
                     const VitalsClassifier& classify) {
  const Scenario& s = *world.scenario;
  const VictimSpec& v = s.victims[victim];
  VictimReport report;
  report.report_id = robot.id + ":" + v.id;
  report.victim_id = v.id;
  report.robot_id = robot.id;
  report.geotag = v.position;

  // A failed classification is retried once with a fresh reading; a second
  // failure is reported as a fault at the most severe acuity.
  for (std::size_t attempt = 0; attempt < 2; ++attempt) {
    report.vitals = sense_vitals(v.vitals, s.sensor_noise,
                                 measurement_seed(s, victim, robot.spec_index, attempt));
    try {
      const auto label = classify(report.vitals);
      report.acuity = label.acuity;
      report.probabilities = label.probabilities;
      report.fault = false;
      return report;
    } catch (const OutOfRangeError&) {
      report.fault = true;
    }
  }
  report.acuity = data::Acuity::Critical;
  report.probabilities = {1.0, 0.0, 0.0, 0.0, 0.0};
  return report;
}

}  // namespace

std::string_view mode_name(RobotMode mode) noexcept {
  switch (mode) {
    case RobotMode::Scanning: return "Scanning";
    case RobotMode::Approaching: return "Approaching";
    case RobotMode::Measuring: return "Measuring";
    case RobotMode::Reporting: return "Reporting";
  }
  return "?";
}

std::size_t World::reported_count() const noexcept {
  return static_cast<std::size_t>(std::ranges::count(reported, true));
}

bool World::done() const noexcept { return reported_count() == reported.size(); }

bool World::claimed(std::size_t victim, const std::string& except) const noexcept {
  return std::ranges::any_of(robots, [&](const RobotState& r) {
    return r.id != except && r.target == victim;
  });
}

std::vector<GeoPoint> sweep_waypoints(const Scenario& s) {
  if (s.robots.empty()) return {};
  double radius = s.robots.front().detection_radius_m;
  for (const auto& r : s.robots) radius = std::min(radius, r.detection_radius_m);
  const FieldBounds& b = s.bounds;
  const double height_m = distance_m({b.min_lat, b.min_lon}, {b.max_lat, b.min_lon});
  const auto lanes = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(height_m / (1.5 * radius))));
  std::vector<GeoPoint> points;
  for (std::size_t k = 0; k < lanes; ++k) {
    const double lat = b.min_lat + (b.max_lat - b.min_lat) * (static_cast<double>(k) + 0.5) /
                                       static_cast<double>(lanes);
    if (k % 2 == 0) {
      points.push_back({lat, b.min_lon});
      points.push_back({lat, b.max_lon});
    } else {
      points.push_back({lat, b.max_lon});
      points.push_back({lat, b.min_lon});
    }
  }
  return points;
}

World make_world(std::shared_ptr<const Scenario> scenario) {
  if (!scenario) throw ConfigError("world needs a scenario");
  World w;
  w.sweep = sweep_waypoints(*scenario);
  for (std::size_t i = 0; i < scenario->robots.size(); ++i) {
    const auto& spec = scenario->robots[i];
    RobotState r;
    r.id = spec.id;
    r.spec_index = i;
    r.position = spec.start;
    r.waypoint = w.sweep.empty() ? 0 : nearest_waypoint(w.sweep, spec.start);
    w.robots.push_back(std::move(r));
  }
  std::ranges::sort(w.robots, {}, &RobotState::id);
  w.reported.assign(scenario->victims.size(), false);
  w.scenario = std::move(scenario);
  return w;
}

std::vector<std::size_t> detect(const RobotState& robot, const World& world) {
  const Scenario& s = *world.scenario;
  const double radius = s.robots[robot.spec_index].detection_radius_m;
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t v = 0; v < s.victims.size(); ++v) {
    if (world.reported[v] || world.claimed(v, robot.id)) continue;
    const double d = distance_m(robot.position, s.victims[v].position);
    if (d <= radius) hits.emplace_back(d, v);
  }
  std::ranges::sort(hits, [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return s.victims[a.second].id < s.victims[b.second].id;
  });
  std::vector<std::size_t> out;
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

data::VitalSigns sense_vitals(const data::VitalSigns& truth, const data::VitalSigns& sigmas,
                              std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  data::VitalSigns out = truth;
  for (auto f : data::kAllFeatures) {
    const double z = gauss(rng);  // drawn for every vital so streams stay aligned
    const double sigma = data::is_missing(sigmas[f]) ? 0.0 : sigmas[f];
    if (sigma > 0.0) out[f] = truth[f] + sigma * z;
  }
  return data::kDefaultBounds.clamp(out);
}

StepResult simulate_step(const World& world, double dt, const VitalsClassifier& classify) {
  if (dt < 0.0) throw ConfigError("time step must be non-negative");
  StepResult result{world, {}};
  if (dt == 0.0) return result;

  World& w = result.world;
  const Scenario& s = *w.scenario;
  w.steps += 1;
  w.elapsed_s += dt;
  const std::int64_t now = s.start_time_ms + std::llround(w.elapsed_s * 1000.0);

  for (auto& robot : w.robots) {
    const RobotSpec& spec = s.robots[robot.spec_index];
    switch (robot.mode) {
      case RobotMode::Scanning: {
        const auto seen = detect(robot, w);
        if (!seen.empty()) {
          const std::size_t v = seen.front();
          robot.target = v;
          robot.mode = distance_m(robot.position, s.victims[v].position) <= kArrivalToleranceM
                           ? RobotMode::Measuring
                           : RobotMode::Approaching;
        } else if (!w.sweep.empty() && !w.done()) {
          const GeoPoint goal = w.sweep[robot.waypoint];
          robot.position = move_toward(robot.position, goal, spec.speed_mps * dt);
          if (robot.position == goal) robot.waypoint = (robot.waypoint + 1) % w.sweep.size();
        }
        break;
      }
      case RobotMode::Approaching: {
        const GeoPoint goal = s.victims[*robot.target].position;
        robot.position = move_toward(robot.position, goal, spec.speed_mps * dt);
        if (distance_m(robot.position, goal) <= kArrivalToleranceM) robot.mode = RobotMode::Measuring;
        break;
      }
      case RobotMode::Measuring: {
        robot.pending = measure(w, robot, *robot.target, classify);
        robot.mode = RobotMode::Reporting;
        break;
      }
      case RobotMode::Reporting: {
        VictimReport report = std::move(*robot.pending);
        report.timestamp_ms = now;
        robot.pending.reset();
        w.reported[*robot.target] = true;
        robot.visited.insert(report.victim_id);
        robot.target.reset();
        robot.mode = RobotMode::Scanning;
        result.reports.push_back(std::move(report));
        break;
      }
    }
  }
  return result;
}

}  // namespace artemis::sim
