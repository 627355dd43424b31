#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "anomo/types.hpp"

namespace anomo::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int size, double scale = 1.0) {
  return random_matrix(rng, size, 1, scale);
}

inline Mask random_mask(std::mt19937_64& rng, int rows, int cols, double p) {
  std::bernoulli_distribution keep(p);
  Mask m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(rng) ? 1 : 0;
  return m;
}

/// Each flow picks between 1 and max_len distinct links.
inline RoutingMatrix random_routing(std::mt19937_64& rng, int links, int flows, int max_len = 4) {
  std::uniform_int_distribution<int> len(1, std::min(max_len, links));
  std::vector<std::vector<int>> paths;
  std::vector<int> all(static_cast<std::size_t>(links));
  for (int l = 0; l < links; ++l) all[static_cast<std::size_t>(l)] = l;
  for (int f = 0; f < flows; ++f) {
    std::shuffle(all.begin(), all.end(), rng);
    paths.emplace_back(all.begin(), all.begin() + len(rng));
  }
  return RoutingMatrix(links, std::move(paths));
}

inline ObservedSlice random_slice(std::mt19937_64& rng, int index, int links, int window, double p) {
  ObservedSlice s;
  s.index = index;
  s.mask = random_mask(rng, links, window, p);
  s.values = random_matrix(rng, links, window).cwiseProduct(s.mask.cast<double>());
  return s;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace anomo::testing
