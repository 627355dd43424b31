#pragma once

#include <optional>
#include <span>

#include "anomo/types.hpp"

namespace anomo {

/// Trajectory matrix of `series`: W rows, N - W + 1 columns, H(w, k) = series[k + w]
/// (0-based). Requires 1 < W < N.
Matrix hankelize(std::span<const double> series, int window);

/// Slice t (1-based) of the Hankelized tensor built from an L x T link matrix:
/// column w of the slice is measurement time t + w - 1. Unobserved entries are zeroed.
ObservedSlice frontal_slice(const Matrix& links, const Mask& masks, int window, int t);

/// Streaming counterpart of frontal_slice: keeps the last W samples of each
/// link and emits slice s - W + 1 once s >= W samples have arrived.
class LinkSeriesBuffer {
 public:
  LinkSeriesBuffer(int links, int window);

  std::optional<ObservedSlice> push(std::span<const double> values,
                                    std::span<const std::uint8_t> observed);

  int links() const { return links_; }
  int window() const { return window_; }
  /// Number of samples pushed so far.
  int time() const { return time_; }

 private:
  int links_;
  int window_;
  int time_ = 0;
  int head_ = 0;  // column that receives the next sample
  Matrix values_;
  Mask observed_;
};

}  // namespace anomo
