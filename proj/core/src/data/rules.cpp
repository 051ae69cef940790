#include "artemis/data/rules.hpp"

#include <algorithm>

#include "artemis/error.hpp"

namespace artemis::data {

bool RuleClause::matches(const VitalSigns& v) const noexcept {
  return std::ranges::any_of(any_of, [&](const Predicate& p) { return p.holds(v); });
}

VitalSigns textbook_normal_vitals() {
  VitalSigns v;
  v.temperature = 98.6;
  v.heart_rate = 75.0;
  v.resp_rate = 16.0;
  v.o2_sat = 98.0;
  v.sbp = 120.0;
  v.dbp = 80.0;
  return v;
}

RuleTable default_rule_table() {
  using enum Feature;
  constexpr auto lt = Comparison::Less;
  constexpr auto gt = Comparison::Greater;

  RuleTable table;
  table.clauses.push_back(
      {{{O2Sat, lt, 85}, {HeartRate, gt, 140}, {HeartRate, lt, 40}, {Sbp, lt, 80}},
       Acuity::Critical});
  table.clauses.push_back(
      {{{O2Sat, lt, 90}, {HeartRate, gt, 120}, {Temperature, gt, 103}, {Sbp, lt, 90}},
       Acuity::Immediate});
  table.clauses.push_back(
      {{{O2Sat, lt, 94}, {HeartRate, gt, 100}, {Temperature, gt, 100.4}, {RespRate, gt, 24}},
       Acuity::Moderate});

  const VitalSigns normal = textbook_normal_vitals();
  RuleClause outside_normal{{}, Acuity::Delay};
  for (Feature f : kAllFeatures) {
    outside_normal.any_of.push_back({f, lt, normal[f] * 0.9});
    outside_normal.any_of.push_back({f, gt, normal[f] * 1.1});
  }
  table.clauses.push_back(std::move(outside_normal));
  table.fallback = Acuity::Minor;
  return table;
}

Acuity label_by_rule(const VitalSigns& vitals, const RuleTable& table) {
  if (!table.bounds.contains(vitals)) {
    std::string names;
    for (const auto& n : table.bounds.violations(vitals)) names += (names.empty() ? "" : ", ") + n;
    throw OutOfRangeError("vitals out of range: " + names);
  }
  for (const auto& clause : table.clauses) {
    if (clause.matches(vitals)) return clause.acuity;
  }
  return table.fallback;
}

nlohmann::json to_json(const RuleTable& table) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& clause : table.clauses) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : clause.any_of) {
      preds.push_back({{"feature", feature_name(p.feature)},
                       {"op", p.op == Comparison::Less ? "<" : ">"},
                       {"threshold", p.threshold}});
    }
    clauses.push_back({{"acuity", level(clause.acuity)}, {"any_of", std::move(preds)}});
  }
  return {{"clauses", std::move(clauses)}, {"default", level(table.fallback)}};
}

RuleTable rule_table_from_json(const nlohmann::json& j) {
  try {
    RuleTable table;
    for (const auto& jc : j.at("clauses")) {
      RuleClause clause;
      clause.acuity = acuity_from_level(jc.at("acuity").get<int>());
      for (const auto& jp : jc.at("any_of")) {
        const auto name = jp.at("feature").get<std::string>();
        const auto feature = feature_from_name(name);
        if (!feature) throw ConfigError("rule table: unknown feature '" + name + "'");
        const auto op = jp.at("op").get<std::string>();
        if (op != "<" && op != ">") throw ConfigError("rule table: operator must be < or >");
        clause.any_of.push_back(
            {*feature, op == "<" ? Comparison::Less : Comparison::Greater,
             jp.at("threshold").get<double>()});
      }
      table.clauses.push_back(std::move(clause));
    }
    table.fallback = acuity_from_level(j.value("default", 5));
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("rule table: ") + e.what());
  }
}

}  // namespace artemis::data
