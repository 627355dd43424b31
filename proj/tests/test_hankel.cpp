#include <doctest.h>

#include <vector>

#include "anomo/error.hpp"
#include "anomo/hankel.hpp"
#include "helpers.hpp"

using namespace anomo;

TEST_CASE("hankelize of a short ramp") {
  const std::vector<double> s{1, 2, 3, 4, 5};
  const Matrix h = hankelize(s, 3);
  Matrix expect(3, 3);
  expect << 1, 2, 3, 2, 3, 4, 3, 4, 5;
  CHECK(h == expect);
}

TEST_CASE("hankelize of a constant series is constant") {
  const std::vector<double> s(40, 2.5);
  for (int w : {2, 7, 39}) {
    const Matrix h = hankelize(s, w);
    CHECK(h.rows() == w);
    CHECK(h.cols() == 41 - w);
    CHECK((h.array() == 2.5).all());
  }
}

TEST_CASE("hankelize anti-diagonals are constant") {
  std::mt19937_64 rng(1);
  const Vector s = anomo::testing::random_vector(rng, 100);
  const Matrix h = hankelize(std::span<const double>(s.data(), 100), 24);
  for (Eigen::Index w = 0; w < h.rows(); ++w)
    for (Eigen::Index k = 0; k < h.cols(); ++k) CHECK(h(w, k) == s[w + k]);
}

TEST_CASE("hankelize rejects bad windows") {
  const std::vector<double> s{1, 2, 3};
  CHECK_THROWS_AS(hankelize(s, 1), DimensionError);
  CHECK_THROWS_AS(hankelize(s, 3), DimensionError);
}

TEST_CASE("frontal slices index the link matrix") {
  std::mt19937_64 rng(2);
  const int L = 4, T = 30, W = 6;
  const Matrix y = anomo::testing::random_matrix(rng, L, T);
  const Mask m = anomo::testing::random_mask(rng, L, T, 0.6);

  const auto first = frontal_slice(y, m, W, 1);
  CHECK(first.index == 1);
  CHECK(first.newest_time() == W);
  for (int l = 0; l < L; ++l)
    for (int w = 0; w < W; ++w) {
      CHECK(first.mask(l, w) == m(l, w));
      CHECK(first.values(l, w) == (m(l, w) ? y(l, w) : 0.0));
    }

  const auto last = frontal_slice(y, m, W, T - W + 1);
  CHECK(last.newest_time() == T);
  for (int l = 0; l < L; ++l) CHECK(last.values(l, W - 1) == (m(l, T - 1) ? y(l, T - 1) : 0.0));

  for (int t = 1; t < T - W + 1; ++t) {
    const auto a = frontal_slice(y, m, W, t);
    const auto b = frontal_slice(y, m, W, t + 1);
    CHECK(a.values.rightCols(W - 1) == b.values.leftCols(W - 1));
    CHECK(a.mask.rightCols(W - 1) == b.mask.leftCols(W - 1));
  }

  CHECK_THROWS_AS(frontal_slice(y, m, W, 0), DimensionError);
  CHECK_THROWS_AS(frontal_slice(y, m, W, T - W + 2), DimensionError);
}

TEST_CASE("window equal to the horizon gives one slice") {
  std::mt19937_64 rng(8);
  const Matrix y = anomo::testing::random_matrix(rng, 3, 24);
  const Mask m = Mask::Ones(3, 24);
  const auto s = frontal_slice(y, m, 24, 1);
  CHECK(s.values == y);
  CHECK_THROWS_AS(frontal_slice(y, m, 24, 2), DimensionError);
}

TEST_CASE("streaming buffer warm-up and first slice") {
  LinkSeriesBuffer buf(2, 4);
  const std::vector<double> v{1.0, 2.0};
  const std::vector<std::uint8_t> o{1, 1};
  for (int s = 1; s < 4; ++s) CHECK_FALSE(buf.push(v, o).has_value());
  const auto slice = buf.push(v, o);
  REQUIRE(slice.has_value());
  CHECK(slice->index == 1);
  CHECK(buf.time() == 4);

  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(buf.push(wrong, o), DimensionError);
}

TEST_CASE("streaming equals batch on random instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 1 + static_cast<int>(rng() % 10);
    const int W = 2 + static_cast<int>(rng() % 29);
    const int T = W + static_cast<int>(rng() % (201 - W));
    const Matrix y = anomo::testing::random_matrix(rng, L, T);
    const Mask m = anomo::testing::random_mask(rng, L, T, 0.5);
    LinkSeriesBuffer buf(L, W);
    int emitted = 0;
    std::vector<double> col(static_cast<std::size_t>(L));
    std::vector<std::uint8_t> obs(static_cast<std::size_t>(L));
    for (int s = 1; s <= T; ++s) {
      for (int l = 0; l < L; ++l) {
        col[static_cast<std::size_t>(l)] = y(l, s - 1);
        obs[static_cast<std::size_t>(l)] = m(l, s - 1);
      }
      const auto out = buf.push(col, obs);
      REQUIRE(out.has_value() == (s >= W));
      if (!out) continue;
      ++emitted;
      const auto batch = frontal_slice(y, m, W, s - W + 1);
      CHECK(out->index == batch.index);
      CHECK(out->values == batch.values);
      CHECK(out->mask == batch.mask);
    }
    CHECK(emitted == T - W + 1);
  }
}
