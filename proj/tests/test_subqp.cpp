#include <cmath>

#include <gtest/gtest.h>

#include "cournot/errors.hpp"
#include "cournot/subqp.hpp"
#include "oracles.hpp"

using namespace cournot;

namespace {

// n = 1 market on [0, 10] whose linearized operator g equals `g` at any x.
MarketInstance constant_g(double g) {
  return oracle::affine_market(1, 0.1, 0.0, g, 0.0, 10.0);
}

}  // namespace

TEST(ProxStep, InteriorClosedForm) {
  const auto inst = constant_g(0.6);
  EXPECT_NEAR(linearized_operator(inst, Vector{3.0})[0], 0.6, 1e-15);
  EXPECT_NEAR(prox_step(inst, Vector{3.0}, 1.0)[0], 2.0, 1e-15);
}

TEST(ProxStep, ClampedAtLowerBound) {
  const auto inst = constant_g(5.0);
  EXPECT_LT((3.0 - 5.0) / 1.2, 0.0);
  EXPECT_EQ(prox_step(inst, Vector{3.0}, 1.0)[0], 0.0);
}

TEST(ProxStep, FixedPointAtEquilibrium) {
  const auto inst = oracle::affine_market(6, 0.1, 10.0, 2.0, 0.0, 50.0);
  const BoxPgResult eq = classical_equilibrium(inst);
  ASSERT_TRUE(eq.converged());
  for (double c : {0.01, 1.0, 100.0}) {
    EXPECT_LE(oracle::max_abs_diff(prox_step(inst, eq.x, c), eq.x), 1e-9);
  }
}

TEST(ProxStep, RejectsNonPositiveC) {
  const auto inst = constant_g(0.6);
  EXPECT_THROW((void)prox_step(inst, Vector{3.0}, 0.0), PreconditionError);
  EXPECT_THROW((void)prox_step(inst, Vector{3.0}, -1.0), PreconditionError);
}

TEST(ProxStep, MatchesDenseOracle) {
  for (ExampleKind kind : {ExampleKind::Ex1Log, ExampleKind::Ex2Exp, ExampleKind::Affine}) {
    const auto inst = oracle::example(kind, 40, 31);
    Rng rng(32);
    for (int t = 0; t < 30; ++t) {
      const Vector x = oracle::uniform_in_box(inst, rng);
      const double c = std::exp(rng.uniform(-5.0, 3.0));
      EXPECT_LE(oracle::max_abs_diff(prox_step(inst, x, c), oracle::prox(inst, x, c)), 1e-12);
    }
  }
}

TEST(ProxStep, MinimizesProxModel) {
  const auto inst = oracle::example(ExampleKind::Ex1Log, 5, 33);
  Rng rng(34);
  for (int t = 0; t < 20; ++t) {
    const Vector x = oracle::uniform_in_box(inst, rng);
    const double c = 0.1;
    const Vector s = prox_step(inst, x, c);
    const double best = prox_model(inst, x, c, s);
    for (int k = 0; k < 200; ++k) {
      EXPECT_GE(prox_model(inst, x, c, oracle::uniform_in_box(inst, rng)), best - 1e-12);
    }
  }
}

TEST(ProxStep, OptimalityCondition) {
  for (ExampleKind kind : {ExampleKind::Ex1Log, ExampleKind::Ex2Exp}) {
    const auto inst = oracle::example(kind, 25, 35);
    Rng rng(36);
    const double c = 1.0 / inst.lipschitz_gamma();
    for (int t = 0; t < 10; ++t) {
      const Vector x = oracle::uniform_in_box(inst, rng);
      const Vector s = prox_step(inst, x, c);
      const Vector g = linearized_operator(inst, x);
      Eigen::VectorXd lhs(inst.n());
      for (std::size_t i = 0; i < inst.n(); ++i) {
        const double gc = (x[i] - s[i]) / c;
        lhs[static_cast<Eigen::Index>(i)] = 2.0 * inst.beta() * s[i] + g[i] - gc;
      }
      for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd d =
            oracle::to_eigen(oracle::uniform_in_box(inst, rng)) - oracle::to_eigen(s);
        EXPECT_GE(lhs.dot(d), -1e-8);
      }
    }
  }
}

TEST(BoxPgSolve, MatchesProxClosedForm) {
  Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 100);
    const auto kind = t % 2 == 0 ? ExampleKind::Ex1Log : ExampleKind::Ex2Exp;
    const auto inst = oracle::example(kind, n, 100 + t);
    const Vector x = oracle::uniform_in_box(inst, rng);
    const double c = rng.uniform(0.1, 2.0) / inst.lipschitz_gamma();
    const BoxPgResult pg = box_pg_solve(prox_subproblem(inst, x, c), 1e-12, 100000, x);
    ASSERT_TRUE(pg.converged());
    EXPECT_LE(oracle::max_abs_diff(pg.x, prox_step(inst, x, c)), 1e-8);
  }
}

TEST(BoxPgSolve, InteriorSymmetricSystem) {
  const double beta = 0.1;
  const BoxQP qp{QuadraticMatrix::diagonal_plus_ones(Vector(2, beta), beta), {-8.0, -8.0},
                 {0.0, 0.0}, {100.0, 100.0}};
  const BoxPgResult res = box_pg_solve(qp, 1e-12, 100000);
  ASSERT_TRUE(res.converged());
  const Eigen::VectorXd expect = oracle::dense_q(2, beta).ldlt().solve(Eigen::Vector2d(8.0, 8.0));
  EXPECT_NEAR(expect[0], 80.0 / 3.0, 1e-12);
  EXPECT_NEAR(res.x[0], expect[0], 1e-9);
  EXPECT_NEAR(res.x[1], expect[1], 1e-9);
}

TEST(BoxPgSolve, ZeroLinearTermGivesOrigin) {
  const BoxQP qp{QuadraticMatrix::diagonal({1.0, 3.0, 0.5}), {0.0, 0.0, 0.0}, {-1.0, -2.0, -3.0},
                 {1.0, 2.0, 3.0}};
  const BoxPgResult res = box_pg_solve(qp, 1e-12, 1000, Vector{0.9, -1.5, 2.0});
  ASSERT_TRUE(res.converged());
  // Residual tol 1e-12 with smallest curvature 0.5 bounds |x_i| by 2e-12.
  for (double v : res.x) EXPECT_LE(std::abs(v), 2e-12);
}

TEST(BoxPgSolve, DenseMatchesLinearSolve) {
  Rng rng(38);
  const std::size_t n = 6;
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return rng.normal(); });
  const Eigen::MatrixXd q = a * a.transpose() + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
  Vector row(q.data(), q.data() + n * n);
  const BoxQP qp{QuadraticMatrix::dense(n, row), oracle::to_vector(-b), Vector(n, -1e6),
                 Vector(n, 1e6)};
  const BoxPgResult res = box_pg_solve(qp, 1e-11, 2'000'000);
  ASSERT_TRUE(res.converged());
  EXPECT_LE((oracle::to_eigen(res.x) - q.ldlt().solve(b)).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(BoxPgSolve, ReportsNonConvergence) {
  Vector linear(50);
  for (std::size_t i = 0; i < 50; ++i) linear[i] = -1.0 - 0.01 * static_cast<double>(i);
  const BoxQP qp{QuadraticMatrix::diagonal_plus_ones(Vector(50, 0.1), 0.1), linear,
                 Vector(50, 0.0), Vector(50, 100.0)};
  const BoxPgResult res = box_pg_solve(qp, 1e-12, 3);
  EXPECT_FALSE(res.converged());
  EXPECT_EQ(res.status, QpStatus::MaxIterations);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_GT(res.residual, 1e-12);
}

TEST(QuadraticMatrix, RejectsInvalidMatrices) {
  EXPECT_THROW((void)QuadraticMatrix::diagonal({1.0, 0.0}), ConfigError);
  EXPECT_THROW((void)QuadraticMatrix::dense(2, {1.0, 0.5, 0.4, 1.0}), ConfigError);
  EXPECT_THROW((void)QuadraticMatrix::dense(2, {1.0, 2.0, 2.0, 1.0}), ConfigError);
  EXPECT_THROW((void)QuadraticMatrix::dense(2, {1.0, 0.0, 0.0}), DimensionError);
}

TEST(QuadraticMatrix, MaxEigenvalueBoundsSpectrum) {
  const QuadraticMatrix q = QuadraticMatrix::diagonal_plus_ones(Vector(7, 0.3), 0.3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(oracle::dense_q(7, 0.3));
  EXPECT_NEAR(q.max_eigenvalue(), eig.eigenvalues().maxCoeff(), 1e-12);
  const Vector x{1, 2, 3, 4, 5, 6, 7};
  const Eigen::VectorXd expect = oracle::dense_q(7, 0.3) * oracle::to_eigen(x);
  EXPECT_LE((oracle::to_eigen(q.apply(x)) - expect).norm(), 1e-12);
}

TEST(ClassicalEquilibrium, SymmetricInteriorClosedForm) {
  const auto inst = oracle::affine_market(5, 0.1, 10.0, 2.0, 0.0, 50.0);
  const BoxPgResult eq = classical_equilibrium(inst);
  ASSERT_TRUE(eq.converged());
  for (double v : eq.x) EXPECT_NEAR(v, 8.0 / 0.6, 1e-8);
  const Eigen::VectorXd kkt = oracle::dense_q(5, 0.1) * oracle::to_eigen(eq.x) -
                              oracle::alpha_tilde(inst);
  EXPECT_LE(kkt.lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(ClassicalEquilibrium, SingleFirmActiveUpperBound) {
  const auto inst = oracle::affine_market(1, 0.1, 10.0, 0.0, 0.0, 10.0);
  EXPECT_NEAR(classical_equilibrium(inst).x[0], 10.0, 1e-12);
}

TEST(ClassicalEquilibrium, SingleFirmInterior) {
  const auto inst = oracle::affine_market(1, 0.1, 10.0, 9.0, 0.0, 10.0);
  EXPECT_NEAR(classical_equilibrium(inst).x[0], 5.0, 1e-9);
}

TEST(ClassicalEquilibrium, IncludesCostSlope) {
  // An affine h with slope m is equivalent to shifting mu by -m.
  const std::size_t n = 4;
  const MarketInstance with_h(0.1, 10.0, Vector(n, 3.0), Vector(n, 0.0), Vector(n, 50.0),
                              std::make_shared<AffineCost>(Vector(n, 1.0)));
  const auto shifted = oracle::affine_market(n, 0.1, 10.0, 2.0, 0.0, 50.0);
  EXPECT_LE(oracle::max_abs_diff(classical_equilibrium(with_h).x,
                                 classical_equilibrium(shifted).x), 1e-9);
}

TEST(ClassicalEquilibrium, RequiresAffineCost) {
  const auto inst = oracle::example(ExampleKind::Ex1Log, 3, 1);
  EXPECT_THROW((void)classical_equilibrium(inst), PreconditionError);
}

TEST(ClassicalEquilibrium, SatisfiesLinearMvi) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = oracle::example(ExampleKind::Affine, 30, seed);
    const BoxPgResult eq = classical_equilibrium(inst);
    ASSERT_TRUE(eq.converged());
    const Eigen::VectorXd xs = oracle::to_eigen(eq.x);
    const Eigen::VectorXd f = oracle::dense_btilde(inst.n(), inst.beta()) * xs -
                              oracle::alpha_tilde(inst);
    Rng rng(seed + 50);
    for (int k = 0; k < 10000; ++k) {
      const Eigen::VectorXd y = oracle::to_eigen(oracle::uniform_in_box(inst, rng));
      const double v = f.dot(y - xs) + inst.beta() * (y.squaredNorm() - xs.squaredNorm());
      ASSERT_GE(v, -1e-6);
    }
  }
}
