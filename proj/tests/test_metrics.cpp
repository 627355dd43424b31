#include <doctest.h>

#include <cmath>

#include "anomo/error.hpp"
#include "anomo/metrics.hpp"
#include "helpers.hpp"

using namespace anomo;

namespace {

// Mann-Whitney estimate of the AUC with ties counted as one half.
double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      ++pairs;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("scores equal to labels give a perfect curve") {
  const std::vector<double> s{1, 0, 1, 0, 0};
  const std::vector<std::uint8_t> y{1, 0, 1, 0, 0};
  const auto c = roc(s, y);
  CHECK(c.auc == 1.0);
  CHECK(std::isinf(c.points.front().threshold));
  CHECK(c.points.front().tpr == 1.0);
  CHECK(c.points.front().fpr == 1.0);
  CHECK(c.points.back().tpr == 0.0);
  CHECK(c.points.back().fpr == 0.0);
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    CHECK(c.points[k].threshold > c.points[k - 1].threshold);
    CHECK(c.points[k].tpr <= c.points[k - 1].tpr);
    CHECK(c.points[k].fpr <= c.points[k - 1].fpr);
  }
}

TEST_CASE("all-equal scores give the chance diagonal") {
  const std::vector<double> s(10, 0.3);
  const std::vector<std::uint8_t> y{1, 0, 0, 1, 0, 0, 0, 1, 0, 0};
  const auto c = roc(s, y);
  CHECK(c.points.size() == 2);
  CHECK(c.auc == doctest::Approx(0.5));
}

TEST_CASE("random scores are near chance and match the pairwise count") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(4000);
  std::vector<std::uint8_t> y(4000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::floor(u(rng) * 50) / 50;  // plenty of ties
    y[i] = u(rng) < 0.2;
  }
  const auto c = roc(s, y);
  CHECK(c.auc >= 0.45);
  CHECK(c.auc <= 0.55);
  CHECK(c.auc == doctest::Approx(pairwise_auc(s, y)).epsilon(1e-12));
}

TEST_CASE("AUC is invariant under monotone score transforms") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(500), t(500);
  std::vector<std::uint8_t> y(500);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = u(rng) < 0.3;
    s[i] = u(rng) + (y[i] ? 0.3 : 0.0);
    t[i] = std::exp(3 * s[i]) - 7;
  }
  CHECK(roc(s, y).auc == doctest::Approx(roc(t, y).auc).epsilon(1e-15));
}

TEST_CASE("ROC points equal the confusion counts of a threshold sweep") {
  std::mt19937_64 rng(3);
  Matrix scores = anomo::testing::random_matrix(rng, 30, 40).cwiseAbs();
  for (Eigen::Index i = 0; i < scores.size(); i += 3) scores.data()[i] = 0.0;
  const Mask labels = anomo::testing::random_mask(rng, 30, 40, 0.1);
  const auto c = roc(scores, labels);
  const double pos = labels.cast<double>().sum();
  const double neg = static_cast<double>(labels.size()) - pos;
  for (const auto& p : c.points) {
    const auto f = f_measure(threshold_grid(scores, p.threshold), labels).overall;
    CHECK(p.tpr == doctest::Approx(f.tp / pos));
    CHECK(p.fpr == doctest::Approx(f.fp / neg));
  }
}

TEST_CASE("ROC rejects degenerate truth") {
  const std::vector<double> s{0.1, 0.2};
  CHECK_THROWS_AS(roc(s, std::vector<std::uint8_t>{0, 0}), DataError);
  CHECK_THROWS_AS(roc(s, std::vector<std::uint8_t>{1, 1}), DataError);
  CHECK_THROWS_AS(roc(s, std::vector<std::uint8_t>{1}), DimensionError);
}

TEST_CASE("F measure cases") {
  Mask truth = Mask::Zero(4, 3);
  truth(0, 0) = truth(1, 1) = 1;
  CHECK(f_measure(truth, truth).overall.f1 == 1.0);
  const auto none = f_measure(Mask::Zero(4, 3), truth);
  CHECK(none.overall.f1 == 0.0);
  CHECK(none.per_time.size() == 3);
  CHECK(none.per_time[2].f1 == 0.0);

  const auto half = f_score(1, 1, 1);
  CHECK(half.precision == 0.5);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == doctest::Approx(0.5));
  const auto f = f_score(3, 1, 2);
  CHECK(f.f1 == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
}

TEST_CASE("residual summaries") {
  const auto c = residual_trace(std::vector<double>(100, 0.1));
  CHECK(c.tail_median == doctest::Approx(0.1));
  CHECK(c.mean == doctest::Approx(0.1));
  const auto z = residual_trace(std::vector<double>(10, 0.0));
  CHECK(z.tail_median == 0.0);
  CHECK(z.max == 0.0);
  // Last quarter of 8 steps is {5, 1}: median 3.
  const auto s = residual_trace(std::vector<double>{9, 9, 9, 9, 9, 9, 5, 1});
  CHECK(s.tail_median == 3.0);
  CHECK(residual_trace(std::vector<double>{}).series.empty());
}

TEST_CASE("score grid aligns steps with measurement times") {
  std::vector<StepResult> steps(3);
  for (int k = 0; k < 3; ++k) {
    steps[static_cast<std::size_t>(k)].measurement_time = 4 + k;
    steps[static_cast<std::size_t>(k)].estimate = Vector::Constant(2, -(k + 1.0));
  }
  const Matrix g = score_grid(steps, 2, 6, 4);
  CHECK(g.cols() == 3);
  CHECK(g(1, 2) == 3.0);
  steps[0].measurement_time = 3;
  CHECK_THROWS_AS(score_grid(steps, 2, 6, 4), DimensionError);

  Mask lab = Mask::Zero(2, 6);
  lab(0, 5) = 1;
  const Mask lg = label_grid(lab, 4);
  CHECK(lg.cols() == 3);
  CHECK(lg(0, 2) == 1);
}
