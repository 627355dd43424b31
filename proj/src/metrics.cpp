#include "anomo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

RocCurve roc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size())
    throw DimensionError(fmt::format("roc: {} scores but {} labels", scores.size(), labels.size()));
  long pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  const long neg = static_cast<long>(labels.size()) - pos;
  if (pos == 0) throw DataError("roc: truth has no positive labels");
  if (neg == 0) throw DataError("roc: truth has no negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Walk from the highest score down; each group of ties is one threshold step.
  std::vector<RocPoint> desc;
  long tp = 0;
  long fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    desc.push_back({s, static_cast<double>(tp) / pos, static_cast<double>(fp) / neg});
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
  }
  desc.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});

  RocCurve out;
  out.points.assign(desc.rbegin(), desc.rend());
  for (std::size_t k = 1; k < desc.size(); ++k)
    out.auc += 0.5 * (desc[k].fpr - desc[k - 1].fpr) * (desc[k].tpr + desc[k - 1].tpr);
  return out;
}

RocCurve roc(const Matrix& scores, const Mask& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols())
    throw DimensionError(fmt::format("roc: score grid {}x{} vs label grid {}x{}", scores.rows(), scores.cols(),
                                     labels.rows(), labels.cols()));
  return roc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
             std::span<const std::uint8_t>(labels.data(), static_cast<std::size_t>(labels.size())));
}

FScore f_score(long tp, long fp, long fn) {
  FScore s{tp, fp, fn};
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double pr = s.precision + s.recall;
  s.f1 = pr > 0 ? 2.0 * s.precision * s.recall / pr : 0.0;
  return s;
}

FTrace f_measure(const Mask& flagged, const Mask& truth) {
  if (flagged.rows() != truth.rows() || flagged.cols() != truth.cols())
    throw DimensionError("f_measure: flag and truth grids differ in shape");
  FTrace out;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  for (Eigen::Index t = 0; t < truth.cols(); ++t) {
    long a = 0;
    long b = 0;
    long c = 0;
    for (Eigen::Index f = 0; f < truth.rows(); ++f) {
      const bool x = flagged(f, t) != 0;
      const bool y = truth(f, t) != 0;
      a += x && y;
      b += x && !y;
      c += !x && y;
    }
    out.per_time.push_back(f_score(a, b, c));
    tp += a;
    fp += b;
    fn += c;
  }
  out.overall = f_score(tp, fp, fn);
  return out;
}

ResidualSummary residual_trace(std::vector<double> series) {
  ResidualSummary out;
  out.series = std::move(series);
  if (out.series.empty()) return out;
  const auto n = out.series.size();
  out.mean = std::accumulate(out.series.begin(), out.series.end(), 0.0) / static_cast<double>(n);
  out.max = *std::max_element(out.series.begin(), out.series.end());
  const std::size_t tail = std::max<std::size_t>(1, (n + 3) / 4);
  std::vector<double> t(out.series.end() - static_cast<std::ptrdiff_t>(tail), out.series.end());
  std::sort(t.begin(), t.end());
  out.tail_median = tail % 2 ? t[tail / 2] : 0.5 * (t[tail / 2 - 1] + t[tail / 2]);
  return out;
}

ResidualSummary residual_trace(const std::vector<StepResult>& steps) {
  std::vector<double> s;
  s.reserve(steps.size());
  for (const auto& r : steps) s.push_back(r.residual);
  return residual_trace(std::move(s));
}

Matrix score_grid(const std::vector<StepResult>& steps, int flows, int times, int window) {
  if (window < 1 || times < window) throw DimensionError("score_grid: horizon shorter than the window");
  Matrix out = Matrix::Zero(flows, times - window + 1);
  for (const auto& r : steps) {
    const int col = r.measurement_time - window;
    if (col < 0 || col >= out.cols())
      throw DimensionError(fmt::format("score_grid: measurement time {} outside [{}, {}]", r.measurement_time,
                                       window, times));
    if (r.estimate.size() != flows)
      throw DimensionError(fmt::format("score_grid: step at time {} has {} flows, expected {}", r.measurement_time,
                                       r.estimate.size(), flows));
    out.col(col) = r.estimate.cwiseAbs();
  }
  return out;
}

Mask label_grid(const Mask& labels, int window) {
  if (window < 1 || labels.cols() < window) throw DimensionError("label_grid: horizon shorter than the window");
  return labels.rightCols(labels.cols() - window + 1);
}

Mask threshold_grid(const Matrix& scores, double threshold) {
  return (scores.array() > threshold).cast<std::uint8_t>();
}

}  // namespace anomo
