#include <doctest.h>

#include "anomo/error.hpp"
#include "anomo/sparse_admm.hpp"
#include "anomo/subspace_rls.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace anomo;
using namespace anomo::testing;

namespace {

RoutingMatrix identity_routing(int n) {
  std::vector<std::vector<int>> paths;
  for (int i = 0; i < n; ++i) paths.push_back({i});
  return RoutingMatrix(n, paths);
}

MaskVector random_mask_vector(std::mt19937_64& rng, int n, double p) {
  return random_mask(rng, n, 1, p);
}

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(1.2, 0.5) == doctest::Approx(0.7));
  CHECK(soft_threshold(-0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-2.0, 0.5) == doctest::Approx(-1.5));
  CHECK(soft_threshold(0.5, 0.5) == 0.0);
}

TEST_CASE("build_q is the masked last-column residual") {
  std::mt19937_64 rng(1);
  const int L = 7, W = 5, R = 3;
  auto [m, c] = init_model(L, W, R, 2, 1e-3);
  m.b_curr = random_vector(rng, R);
  const auto s = random_slice(rng, 1, L, W, 0.6);
  const Vector q = build_q(s, m);
  const Matrix full = m.A * m.b_curr.asDiagonal() * m.C.transpose();
  for (int l = 0; l < L; ++l) {
    const double expect = s.mask(l, W - 1) ? s.values(l, W - 1) - full(l, W - 1) : 0.0;
    CHECK(q[l] == doctest::Approx(expect).epsilon(1e-12));
  }

  ObservedSlice perfect{1, full, Mask::Ones(L, W)};
  CHECK(build_q(perfect, m).cwiseAbs().maxCoeff() < 1e-12);
  perfect.mask.col(W - 1).setZero();
  CHECK(build_q(perfect, m).isZero());
}

TEST_CASE("Woodbury solve matches the dense inverse") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int F = 1 + static_cast<int>(rng() % 30);
    const int L = 1 + static_cast<int>(rng() % 15);
    const auto r = random_routing(rng, L, F);
    const auto mask = random_mask_vector(rng, L, 0.6);
    const double xi = 0.1 + static_cast<double>(rng() % 100) / 50.0;
    const Vector rhs = random_vector(rng, F);
    const Vector got = woodbury_apply(r, mask, xi, rhs);
    const Vector want = dense_regularized_solve(r, mask, xi, rhs);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("Woodbury solve with an empty operator divides by xi") {
  std::mt19937_64 rng(3);
  const auto r = random_routing(rng, 6, 12);
  const Vector rhs = random_vector(rng, 12);
  const Vector out = woodbury_apply(r, MaskVector::Zero(6), 2.0, rhs);
  CHECK((out - rhs / 2.0).cwiseAbs().maxCoeff() == 0.0);
  const RoutingMatrix empty(6, std::vector<std::vector<int>>(12));
  CHECK((woodbury_apply(empty, MaskVector::Ones(6), 2.0, rhs) - rhs / 2.0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(woodbury_apply(r, MaskVector::Ones(6), 0.0, rhs), ParameterError);
}

TEST_CASE("zero input converges immediately to zero") {
  std::mt19937_64 rng(4);
  const auto r = random_routing(rng, 10, 30);
  const auto res = admm_solve(Vector::Zero(10), r, MaskVector::Ones(10), Hyperparams{});
  CHECK(res.iterations == 1);
  CHECK(res.converged);
  CHECK(res.estimate.isZero());
}

TEST_CASE("identity routing reduces the lasso to soft thresholding") {
  std::mt19937_64 rng(5);
  const int n = 25;
  const auto r = identity_routing(n);
  Hyperparams hp;
  hp.max_iter = 5000;
  hp.eps_abs = 1e-12;
  hp.eps_rel = 1e-12;
  const Vector q = random_vector(rng, n, 3.0);
  const double mu = 0.8;
  const auto res = admm_lasso(q, r, MaskVector::Ones(n), mu, hp);
  for (int i = 0; i < n; ++i) CHECK(res.estimate[i] == doctest::Approx(soft_threshold(q[i], mu)).epsilon(1e-6));
}

TEST_CASE("ADMM reaches the ISTA optimum and satisfies KKT bounds") {
  std::mt19937_64 rng(6);
  Hyperparams hp;
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = random_routing(rng, 20, 60);
    const auto mask = random_mask_vector(rng, 20, 0.8);
    Vector v_true = Vector::Zero(60);
    for (int k = 0; k < 3; ++k) v_true[static_cast<Eigen::Index>(rng() % 60)] = 5.0;
    Vector q = masked_apply(r, mask, v_true) + random_vector(rng, 20, 0.05);
    for (int l = 0; l < 20; ++l)
      if (!mask[l]) q[l] = 0.0;
    const auto res = admm_solve(q, r, mask, hp);
    const Vector oracle = ista(q, r, mask, res.mu_s, 100000);
    const double f_admm = lasso_objective(q, r, mask, res.mu_s, res.estimate);
    const double f_ista = lasso_objective(q, r, mask, res.mu_s, oracle);
    INFO("trial ", trial, " iterations ", res.iterations);
    CHECK(f_ista <= f_admm + 1e-12 * std::abs(f_admm));

    if (res.converged) {
      CHECK(res.r_pri.back() <= res.eps_pri.back());
      CHECK(res.r_dual.back() <= res.eps_dual.back());
    }
    const Vector grad = masked_apply_transpose(r, mask, masked_apply(r, mask, res.estimate) - q);
    const double tol = 10 * res.eps_pri.back();
    for (int i = 0; i < 60; ++i) {
      const double z = res.estimate[i];
      if (z != 0.0) {
        CHECK(std::abs(grad[i] + res.mu_s * (z > 0 ? 1.0 : -1.0)) <= tol + 1e-9);
      } else {
        CHECK(std::abs(grad[i]) <= res.mu_s + tol);
      }
    }
  }
}

TEST_CASE("warm start does not worsen the objective on repeated input") {
  std::mt19937_64 rng(7);
  Hyperparams hp;
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = random_routing(rng, 15, 40);
    const auto mask = random_mask_vector(rng, 15, 0.7);
    const Vector q = masked_apply(r, mask, random_vector(rng, 40).cwiseMax(0.0));
    AdmmWorkspace ws;
    const auto cold = admm_solve(q, r, mask, hp, nullptr, &ws);
    const auto warm = admm_solve(q, r, mask, hp, &cold.state, &ws);
    const double fc = lasso_objective(q, r, mask, cold.mu_s, cold.estimate);
    const double fw = lasso_objective(q, r, mask, warm.mu_s, warm.estimate);
    CHECK(fw <= fc * (1.0 + hp.eps_rel) + 1e-12);
    CHECK(warm.iterations <= cold.iterations);
    CHECK(ws.refreshes() == 1);
  }
}

TEST_CASE("workspace refactorizes only when the mask changes") {
  std::mt19937_64 rng(8);
  const auto r = random_routing(rng, 8, 20);
  AdmmWorkspace ws;
  MaskVector m = MaskVector::Ones(8);
  ws.solver(r, m, 1.0);
  ws.solver(r, m, 1.0);
  CHECK(ws.refreshes() == 1);
  m[3] = 0;
  ws.solver(r, m, 1.0);
  CHECK(ws.refreshes() == 2);
  ws.solver(r, m, 2.0);
  CHECK(ws.refreshes() == 3);
}

TEST_CASE("sparsity weight scales with the largest residual") {
  Hyperparams hp;
  Vector q(3);
  q << 1.0, -4.0, 2.0;
  CHECK(sparsity_weight(q, hp) == doctest::Approx(0.04));
}

TEST_CASE("ADMM rejects mismatched sizes and bad penalties") {
  std::mt19937_64 rng(9);
  const auto r = random_routing(rng, 5, 10);
  Hyperparams hp;
  CHECK_THROWS_AS(admm_solve(Vector::Zero(4), r, MaskVector::Ones(5), hp), DimensionError);
  hp.xi = 0.0;
  CHECK_THROWS_AS(admm_solve(Vector::Zero(5), r, MaskVector::Ones(5), hp), ParameterError);
  hp.xi = 1.0;
  Vector bad = Vector::Zero(5);
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(admm_lasso(bad, r, MaskVector::Ones(5), 0.1, hp), NumericalError);
}
