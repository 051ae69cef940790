#pragma once

#include <span>
#include <string>
#include <vector>

#include "artemis/data/vitals.hpp"

namespace artemis::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  data::Acuity positive = data::Acuity::Critical;
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

// One-vs-all ROC for `positive`; `scores` are the model's probabilities for
// that class. Tied scores form one step. Throws DataError unless both
// positives and negatives are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const data::Acuity> truth,
                 data::Acuity positive);

// "class,fpr,tpr" rows for every curve.
std::string roc_to_csv(std::span<const RocCurve> curves);

}  // namespace artemis::eval
