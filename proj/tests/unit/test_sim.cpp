#include <doctest.h>

#include <set>

#include "artemis/error.hpp"
#include "artemis/sim/mission.hpp"
#include "fixtures.hpp"

using namespace artemis;
using namespace artemis::sim;
using data::Acuity;
using json = nlohmann::json;

namespace {

json vitals_json() {
  return {{"temperature", 98.6}, {"heart_rate", 80}, {"resp_rate", 16},
          {"o2_sat", 98},        {"sbp", 120},       {"dbp", 80}};
}

json victim_json(const std::string& id, double lat, double lon) {
  return {{"id", id}, {"lat", lat}, {"lon", lon}, {"vitals", vitals_json()}};
}

json robot_json(const std::string& id, double lat, double lon, double radius = 10.0) {
  return {{"id", id}, {"lat", lat}, {"lon", lon}, {"speed_mps", 1.0}, {"detection_radius_m", radius}};
}

json minimal_scenario() {
  return {{"bounds", {{"min_lat", 40.0}, {"max_lat", 40.001}, {"min_lon", -83.0}, {"max_lon", -82.999}}},
          {"seed", 7},
          {"robots", json::array({robot_json("R1", 40.0005, -82.9995)})},
          {"victims", json::array({victim_json("V1", 40.0005, -82.9995)})}};
}

std::shared_ptr<const Scenario> shared(const json& j) {
  return std::make_shared<const Scenario>(scenario_from_json(j));
}

// Deterministic stand-in for a trained model: low oxygen is critical.
models::TriageLabel stub_classify(const data::VitalSigns& v) {
  models::TriageLabel label;
  label.acuity = v.o2_sat < 90.0 ? Acuity::Critical : Acuity::Minor;
  label.probabilities[data::class_index(label.acuity)] = 1.0;
  return label;
}

bool throws_naming(const json& j, const std::string& needle) {
  try {
    scenario_from_json(j);
  } catch (const ValidationError& e) {
    for (const auto& f : e.failures()) {
      if (f.find(needle) != std::string::npos) return true;
    }
  }
  return false;
}

class FlakySink final : public ReportSink {
 public:
  explicit FlakySink(std::size_t failures) : failures_(failures) {}
  void deliver(const VictimReport& report) override {
    ++calls;
    if (calls <= failures_) throw Error("down");
    got.push_back(report);
  }
  std::size_t calls = 0;
  std::vector<VictimReport> got;

 private:
  std::size_t failures_;
};

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("minimal scenario loads") {
    const auto s = scenario_from_json(minimal_scenario());
    CHECK(s.victims.size() == 1);
    CHECK(s.robots.size() == 1);
    CHECK(s.seed == 7);
    CHECK(s.sensor_noise.heart_rate == 3.0);
  }

  TEST_CASE("duplicate victim id is named") {
    auto j = minimal_scenario();
    j["victims"].push_back(victim_json("V1", 40.0002, -82.9992));
    CHECK_THROWS_AS(scenario_from_json(j), ValidationError);
    CHECK(throws_naming(j, "victims[1].id: duplicate id 'V1'"));
  }

  TEST_CASE("positions outside the bounds are rejected") {
    auto j = minimal_scenario();
    j["victims"][0]["lat"] = 41.0;
    CHECK(throws_naming(j, "victims[0]: position outside bounds"));
    j = minimal_scenario();
    j["robots"][0]["lon"] = -84.0;
    CHECK(throws_naming(j, "robots[0]: position outside bounds"));
  }

  TEST_CASE("every failure is collected") {
    auto j = minimal_scenario();
    j["robots"][0]["speed_mps"] = 0;
    j["victims"][0]["vitals"]["o2_sat"] = 140;
    try {
      scenario_from_json(j);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.failures().size() == 2);
    }
  }

  TEST_CASE("bundled demo scenario") {
    const auto s = load_scenario(testing::data_dir() / "scenarios" / "demo_12x3.json");
    CHECK(s.victims.size() == 12);
    CHECK(s.robots.size() == 3);
    CHECK(s.robots.front().id == "R1");
  }
}

TEST_SUITE("world") {
  TEST_CASE("geometry helpers") {
    const GeoPoint a{40.0, -83.0};
    const GeoPoint b{40.001, -83.0};
    CHECK(distance_m(a, b) == doctest::Approx(111.2).epsilon(0.01));
    const auto mid = move_toward(a, b, distance_m(a, b) / 2);
    CHECK(distance_m(a, mid) == doctest::Approx(distance_m(a, b) / 2));
    CHECK(move_toward(a, b, 1e6) == b);
  }

  TEST_CASE("detection radius is inclusive and nearest comes first") {
    auto j = minimal_scenario();
    j["victims"] = json::array({victim_json("V2", 40.0005, -82.99945), victim_json("V1", 40.0005, -82.9996)});
    auto s = shared(j);
    const World w = make_world(s);
    const auto d_far = distance_m(w.robots[0].position, s->victims[1].position);
    const auto hits = detect(w.robots[0], w);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0] == 0);  // V2 is ~4.3 m away, V1 ~8.5 m

    auto tight = j;
    tight["robots"][0]["detection_radius_m"] = d_far;
    const World w2 = make_world(shared(tight));
    CHECK(detect(w2.robots[0], w2).size() == 2);
    tight["robots"][0]["detection_radius_m"] = d_far * 0.999;
    const World w3 = make_world(shared(tight));
    CHECK(detect(w3.robots[0], w3).size() == 1);
  }

  TEST_CASE("equidistant victims: lower id claimed first") {
    auto j = minimal_scenario();
    j["victims"] = json::array({victim_json("V9", 40.00055, -82.9995), victim_json("V3", 40.00055, -82.9995)});
    const auto step = simulate_step(make_world(shared(j)), 1.0, stub_classify);
    REQUIRE(step.world.robots[0].target.has_value());
    CHECK(step.world.scenario->victims[*step.world.robots[0].target].id == "V3");
  }

  TEST_CASE("two robots at equal distance: lower robot id claims") {
    auto j = minimal_scenario();
    j["robots"] = json::array({robot_json("R2", 40.00045, -82.9995), robot_json("R1", 40.00045, -82.9995)});
    const auto step = simulate_step(make_world(shared(j)), 1.0, stub_classify);
    CHECK(step.world.robots[0].id == "R1");
    CHECK(step.world.robots[0].target == std::optional<std::size_t>{0});
    CHECK_FALSE(step.world.robots[1].target.has_value());
  }

  TEST_CASE("zero sigma returns the truth") {
    const auto truth = testing::normal_vitals();
    const data::VitalSigns zero{0, 0, 0, 0, 0, 0, {}};
    CHECK(sense_vitals(truth, zero, 1).same_as(truth));
  }

  TEST_CASE("sensing is deterministic and clamped") {
    const auto truth = testing::vitals(98.6, 80, 16, 99.8, 120, 80);
    const auto sig = default_sensor_noise();
    CHECK(sense_vitals(truth, sig, 5).same_as(sense_vitals(truth, sig, 5)));
    bool varied = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto v = sense_vitals(truth, sig, seed);
      CHECK(v.o2_sat <= 100.0);
      CHECK(v.resp_rate == 16.0);
      varied |= v.heart_rate != 80.0;
    }
    CHECK(varied);
  }

  TEST_CASE("dt = 0 leaves the world untouched") {
    const World w = make_world(shared(minimal_scenario()));
    const auto step = simulate_step(w, 0.0, stub_classify);
    CHECK(step.reports.empty());
    CHECK(step.world.steps == 0);
    CHECK(step.world.robots[0].mode == RobotMode::Scanning);
    CHECK_THROWS_AS(simulate_step(w, -1.0, stub_classify), ConfigError);
  }

  TEST_CASE("co-located victim is reported on the third step") {
    World w = make_world(shared(minimal_scenario()));
    const RobotMode expected[] = {RobotMode::Measuring, RobotMode::Reporting, RobotMode::Scanning};
    for (int i = 0; i < 3; ++i) {
      auto step = simulate_step(w, 1.0, stub_classify);
      w = std::move(step.world);
      CHECK(w.robots[0].mode == expected[i]);
      CHECK(step.reports.size() == (i == 2 ? 1u : 0u));
      if (i == 2) {
        const auto& r = step.reports[0];
        CHECK(r.report_id == "R1:V1");
        CHECK(r.timestamp_ms == 1'700'000'003'000);
        CHECK(validate(r).empty());
      }
    }
    CHECK(w.done());
  }

  TEST_CASE("classifier failures: one retry, then a critical fault") {
    World w = make_world(shared(minimal_scenario()));
    int calls = 0;
    const VitalsClassifier failing = [&](const data::VitalSigns&) -> models::TriageLabel {
      ++calls;
      throw OutOfRangeError("reading out of range");
    };
    std::vector<VictimReport> reports;
    for (int i = 0; i < 3; ++i) {
      auto step = simulate_step(w, 1.0, failing);
      w = std::move(step.world);
      reports.insert(reports.end(), step.reports.begin(), step.reports.end());
    }
    REQUIRE(reports.size() == 1);
    CHECK(calls == 2);
    CHECK(reports[0].fault);
    CHECK(reports[0].acuity == Acuity::Critical);
    CHECK(validate(reports[0]).empty());

    int n = 0;
    const VitalsClassifier flaky = [&](const data::VitalSigns& v) {
      if (n++ == 0) throw OutOfRangeError("glitch");
      return stub_classify(v);
    };
    World w2 = make_world(shared(minimal_scenario()));
    for (int i = 0; i < 3; ++i) w2 = simulate_step(w2, 1.0, flaky).world;
    CHECK(n == 2);
  }
}

TEST_SUITE("mission") {
  const auto demo = [] {
    return std::make_shared<const Scenario>(
        load_scenario(testing::data_dir() / "scenarios" / "demo_12x3.json"));
  };

  TEST_CASE("demo mission reports every victim once") {
    CollectingSink sink;
    const auto log = run_mission(demo(), stub_classify, sink);
    CHECK(log.complete);
    REQUIRE(sink.reports().size() == 12);
    std::set<std::string> victims, ids;
    const auto s = demo();
    for (const auto& r : sink.reports()) {
      victims.insert(r.victim_id);
      ids.insert(r.report_id);
      CHECK(validate(r).empty());
      const auto it = std::ranges::find(s->victims, r.victim_id, &VictimSpec::id);
      REQUIRE(it != s->victims.end());
      CHECK(r.geotag == it->position);
    }
    CHECK(victims.size() == 12);
    CHECK(ids.size() == 12);
    CHECK(log.undelivered().empty());
  }

  TEST_CASE("same scenario and seed give identical logs") {
    CollectingSink a, b;
    const auto la = run_mission(demo(), stub_classify, a);
    const auto lb = run_mission(demo(), stub_classify, b);
    CHECK(mission_log_jsonl(la) == mission_log_jsonl(lb));
  }

  TEST_CASE("no victims finishes immediately") {
    auto j = minimal_scenario();
    j["victims"] = json::array();
    CollectingSink sink;
    const auto log = run_mission(shared(j), stub_classify, sink);
    CHECK(log.complete);
    CHECK(log.steps == 0);
    CHECK(log.entries.empty());
  }

  TEST_CASE("step limit leaves the mission incomplete") {
    CollectingSink sink;
    MissionConfig cfg;
    cfg.max_steps = 5;
    const auto log = run_mission(demo(), stub_classify, sink, cfg);
    CHECK_FALSE(log.complete);
    CHECK(log.steps == 5);
  }

  TEST_CASE("delivery retries back off exponentially") {
    std::vector<long> waits;
    MissionConfig cfg;
    cfg.retry.sleep = [&](std::chrono::milliseconds d) { waits.push_back(d.count()); };

    FlakySink recovering(2);
    auto log = run_mission(shared(minimal_scenario()), stub_classify, recovering, cfg);
    CHECK(waits == std::vector<long>{100, 200});
    CHECK(log.entries[0].delivered);
    CHECK(log.entries[0].attempts == 3);

    waits.clear();
    FlakySink dead(100);
    log = run_mission(shared(minimal_scenario()), stub_classify, dead, cfg);
    CHECK(waits == std::vector<long>{100, 200, 400, 800});
    CHECK(dead.calls == 5);
    CHECK(log.undelivered() == std::vector<std::string>{"R1:V1"});
    CHECK(mission_log_jsonl(log).find("\"delivered\":false") != std::string::npos);
  }
}
