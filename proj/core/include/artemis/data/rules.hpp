#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "artemis/data/vitals.hpp"

namespace artemis::data {

enum class Comparison { Less, Greater };

struct Predicate {
  Feature feature = Feature::Temperature;
  Comparison op = Comparison::Less;
  double threshold = 0.0;

  bool holds(const VitalSigns& v) const noexcept {
    const double x = v[feature];
    return op == Comparison::Less ? x < threshold : x > threshold;
  }
};

// Fires when any of its predicates holds.
struct RuleClause {
  std::vector<Predicate> any_of;
  Acuity acuity = Acuity::Minor;

  bool matches(const VitalSigns& v) const noexcept;
};

// Ordered clauses, first match wins, `fallback` otherwise. Totality follows
// from the fallback.
struct RuleTable {
  std::vector<RuleClause> clauses;
  Acuity fallback = Acuity::Minor;
  OutlierBounds bounds;
};

// Textbook resting values used by the default table's "outside normal" clause.
VitalSigns textbook_normal_vitals();

// Default severity-first table:
//   1: o2 < 85 | hr > 140 | hr < 40 | sbp < 80
//   2: o2 < 90 | hr > 120 | temp > 103 | sbp < 90
//   3: o2 < 94 | hr > 100 | temp > 100.4 | rr > 24
//   4: any vital outside textbook normal +-10%
//   5: otherwise
RuleTable default_rule_table();

// Throws OutOfRangeError when the vitals violate the table's outlier bounds.
Acuity label_by_rule(const VitalSigns& vitals, const RuleTable& table);

nlohmann::json to_json(const RuleTable& table);
RuleTable rule_table_from_json(const nlohmann::json& j);

}  // namespace artemis::data
