#pragma once

#include <span>
#include <vector>

#include "anomo/pipeline.hpp"
#include "anomo/types.hpp"

namespace anomo {

struct RocPoint {
  double threshold = 0.0;  ///< flag when score > threshold
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Points ordered by increasing threshold, so TPR and FPR are nonincreasing.
/// The first point (threshold -inf) is (1, 1); the last is (0, 0).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Sweeps every distinct score as a threshold. Throws DataError when
/// `labels` has no positive or no negative entry.
RocCurve roc(std::span<const double> scores, std::span<const std::uint8_t> labels);
RocCurve roc(const Matrix& scores, const Mask& labels);

struct FScore {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  ///< 0 when precision + recall = 0
};

FScore f_score(long tp, long fp, long fn);

struct FTrace {
  std::vector<FScore> per_time;  ///< one entry per grid column
  FScore overall;                ///< pooled counts over the whole grid
};

/// Flags and truth on the same (flow, time) grid.
FTrace f_measure(const Mask& flagged, const Mask& truth);

struct ResidualSummary {
  std::vector<double> series;
  double tail_median = 0.0;  ///< median over the last quarter of steps
  double mean = 0.0;
  double max = 0.0;
};

ResidualSummary residual_trace(const std::vector<StepResult>& steps);
ResidualSummary residual_trace(std::vector<double> series);

/// Scores |estimate| on the (flow, time) grid for times W..T; column k is
/// time W + k. Steps must carry consecutive measurement times.
Matrix score_grid(const std::vector<StepResult>& steps, int flows, int times, int window);

/// Truth labels restricted to times W..T.
Mask label_grid(const Mask& labels, int window);

/// scores > threshold.
Mask threshold_grid(const Matrix& scores, double threshold);

}  // namespace anomo
