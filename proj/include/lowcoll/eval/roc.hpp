#pragma once

#include <span>
#include <vector>

namespace lowcoll::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  /// Starts at (0,0), ends at (1,1); one point per distinct score.
  std::vector<RocPoint> points;
  /// Score threshold reached at each point after the first.
  std::vector<double> thresholds;
  double auc = 0.0;
};

/// Tied scores move the curve diagonally, so they count one half.
/// Throws ValidationError on non-finite scores or single-class labels.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  return roc_curve(scores, labels).auc;
}

}  // namespace lowcoll::eval
