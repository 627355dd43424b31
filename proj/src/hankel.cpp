#include "anomo/hankel.hpp"

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

Matrix hankelize(std::span<const double> series, int window) {
  const auto n = static_cast<int>(series.size());
  if (window <= 1 || window >= n)
    throw DimensionError(fmt::format("hankelize: need 1 < W < N, got W={} N={}", window, n));
  const int k = n - window + 1;
  Matrix h(window, k);
  for (int j = 0; j < k; ++j)
    for (int w = 0; w < window; ++w) h(w, j) = series[static_cast<std::size_t>(j + w)];
  return h;
}

ObservedSlice frontal_slice(const Matrix& links, const Mask& masks, int window, int t) {
  if (masks.rows() != links.rows() || masks.cols() != links.cols())
    throw DimensionError("frontal_slice: mask shape differs from link matrix");
  const auto total = static_cast<int>(links.cols());
  if (window <= 1 || window > total)
    throw DimensionError(fmt::format("frontal_slice: window {} invalid for T={}", window, total));
  if (t < 1 || t > total - window + 1)
    throw DimensionError(fmt::format("frontal_slice: slice index {} outside [1, {}]", t, total - window + 1));

  ObservedSlice s;
  s.index = t;
  s.mask = masks.middleCols(t - 1, window);
  s.values = links.middleCols(t - 1, window);
  for (Eigen::Index w = 0; w < s.values.cols(); ++w)
    for (Eigen::Index l = 0; l < s.values.rows(); ++l)
      if (!s.mask(l, w)) s.values(l, w) = 0.0;
  return s;
}

LinkSeriesBuffer::LinkSeriesBuffer(int links, int window)
    : links_(links), window_(window), values_(Matrix::Zero(links, window)), observed_(Mask::Zero(links, window)) {
  if (links < 1) throw DimensionError("LinkSeriesBuffer: need at least one link");
  if (window <= 1) throw DimensionError("LinkSeriesBuffer: window must exceed 1");
}

std::optional<ObservedSlice> LinkSeriesBuffer::push(std::span<const double> values,
                                                    std::span<const std::uint8_t> observed) {
  if (static_cast<int>(values.size()) != links_ || static_cast<int>(observed.size()) != links_)
    throw DimensionError(fmt::format("LinkSeriesBuffer::push: expected {} links, got {} values / {} flags",
                                     links_, values.size(), observed.size()));
  for (int l = 0; l < links_; ++l) {
    const bool seen = observed[static_cast<std::size_t>(l)] != 0;
    observed_(l, head_) = seen ? 1 : 0;
    values_(l, head_) = seen ? values[static_cast<std::size_t>(l)] : 0.0;
  }
  head_ = (head_ + 1) % window_;
  ++time_;
  if (time_ < window_) return std::nullopt;

  // head_ now points at the oldest sample.
  ObservedSlice s;
  s.index = time_ - window_ + 1;
  s.values.resize(links_, window_);
  s.mask.resize(links_, window_);
  for (int w = 0; w < window_; ++w) {
    const int src = (head_ + w) % window_;
    s.values.col(w) = values_.col(src);
    s.mask.col(w) = observed_.col(src);
  }
  return s;
}

}  // namespace anomo
