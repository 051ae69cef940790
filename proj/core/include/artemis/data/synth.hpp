#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "artemis/data/rules.hpp"
#include "artemis/data/vitals.hpp"

namespace artemis::data {

using ClassMix = std::array<double, kNumClasses>;
using ClassTemplates = std::array<VitalSigns, kNumClasses>;

// Default class shares, proportional to per-class test totals (TP + FN) of a reference run.
ClassMix reference_class_mix();

// Per-class centre vitals that generation perturbs.
ClassTemplates default_class_templates();

// temperature 1.0, heart rate 7, resp rate 2, o2 2.0, sbp 10, dbp 6.
VitalSigns default_synthesis_noise();

// Largest-remainder apportionment of `count` over `mix`; every entry is within
// one record of count * mix.
std::array<std::size_t, kNumClasses> apportion(std::size_t count, const ClassMix& mix);

// Draws template + Gaussian noise per class, clamps to the table's bounds and
// keeps a draw only when label_by_rule agrees with the target class. Output is
// shuffled and fully determined by `seed`.
std::vector<TriageRecord> synthesize(std::size_t count, const ClassMix& mix,
                                     const VitalSigns& noise_sigma, const RuleTable& table,
                                     std::uint64_t seed,
                                     const ClassTemplates& templates = default_class_templates());

}  // namespace artemis::data
