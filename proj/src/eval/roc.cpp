#include "lowcoll/eval/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lowcoll/error.hpp"

namespace lowcoll::eval {

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("score and label counts differ");
  double positives = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ValidationError("non-finite score at index " + std::to_string(i));
    if (labels[i] != 0 && labels[i] != 1) throw ValidationError("labels must be 0 or 1");
    positives += labels[i];
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw ValidationError("ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const double prev_tp = tp;
    const double prev_fp = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      if (labels[order[i]] == 1) tp += 1.0; else fp += 1.0;
    }
    area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
    curve.points.push_back({fp / negatives, tp / positives});
    curve.thresholds.push_back(threshold);
  }
  curve.auc = area / (positives * negatives);
  return curve;
}

}  // namespace lowcoll::eval
