#include "artemis/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "artemis/error.hpp"
#include "artemis/random.hpp"

namespace artemis::data {

namespace {

constexpr std::size_t kMaxAttemptsPerRecord = 100000;

VitalSigns make_vitals(double temp, double hr, double rr, double o2, double sbp, double dbp) {
  VitalSigns v;
  v.temperature = temp;
  v.heart_rate = hr;
  v.resp_rate = rr;
  v.o2_sat = o2;
  v.sbp = sbp;
  v.dbp = dbp;
  return v;
}

}  // namespace

ClassMix reference_class_mix() {
  constexpr std::array<double, kNumClasses> totals = {496 + 1146, 623 + 1247, 2987 + 1137,
                                                      42292 + 226, 7081 + 1001};
  const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
  ClassMix mix{};
  for (std::size_t i = 0; i < kNumClasses; ++i) mix[i] = totals[i] / sum;
  return mix;
}

ClassTemplates default_class_templates() {
  return {
      make_vitals(99.5, 145, 22, 82, 100, 65),
      make_vitals(101.0, 125, 20, 88, 110, 70),
      make_vitals(100.2, 108, 19, 92.5, 118, 76),
      make_vitals(99.0, 92, 17, 96, 125, 82),
      make_vitals(98.6, 75, 16, 98, 120, 80),
  };
}

VitalSigns default_synthesis_noise() { return make_vitals(1.0, 7.0, 2.0, 2.0, 10.0, 6.0); }

std::array<std::size_t, kNumClasses> apportion(std::size_t count, const ClassMix& mix) {
  std::array<std::size_t, kNumClasses> out{};
  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const double exact = static_cast<double>(count) * mix[i];
    out[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::array<std::size_t, kNumClasses> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < count && k < kNumClasses; ++k) {
    if (mix[order[k]] > 0.0) {
      ++out[order[k]];
      ++assigned;
    }
  }
  return out;
}

std::vector<TriageRecord> synthesize(std::size_t count, const ClassMix& mix,
                                     const VitalSigns& noise_sigma, const RuleTable& table,
                                     std::uint64_t seed, const ClassTemplates& templates) {
  if (count == 0) throw ConfigError("synthesize: count must be positive");
  for (double share : mix) {
    if (share < 0.0 || !std::isfinite(share)) {
      throw ConfigError("synthesize: class mix entries must be non-negative");
    }
  }
  if (std::abs(std::accumulate(mix.begin(), mix.end(), 0.0) - 1.0) > 1e-6) {
    throw ConfigError("synthesize: class mix must sum to 1");
  }
  for (Feature f : kAllFeatures) {
    if (!(noise_sigma[f] >= 0.0)) throw ConfigError("synthesize: noise sigma must be >= 0");
  }

  const auto targets = apportion(count, mix);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<TriageRecord> out;
  out.reserve(count);

  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const Acuity target = acuity_at(c);
    for (std::size_t k = 0; k < targets[c]; ++k) {
      std::size_t attempts = 0;
      while (true) {
        if (++attempts > kMaxAttemptsPerRecord) {
          throw DataError("synthesize: template for acuity " + std::to_string(level(target)) +
                          " never satisfies the rule table");
        }
        VitalSigns v;
        for (Feature f : kAllFeatures) v[f] = templates[c][f] + noise_sigma[f] * gauss(rng);
        v = table.bounds.clamp(v);
        if (label_by_rule(v, table) != target) continue;
        out.push_back({v, target, std::nullopt});
        break;
      }
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace artemis::data
