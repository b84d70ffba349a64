#include <cmath>

#include <gtest/gtest.h>

#include "cournot/costs.hpp"
#include "cournot/errors.hpp"
#include "cournot/random.hpp"
#include "oracles.hpp"

using namespace cournot;

namespace {

LogCost ex1_cost(std::size_t n, Rng& rng) {
  Vector r(n);
  for (double& v : r) v = 1.0 + rng.uniform01();
  return LogCost(Vector(n, 2.0), Vector(n, 1.5), r);
}

ExpCost ex2_cost(std::size_t n, Rng& rng) {
  Vector r(n);
  for (double& v : r) v = 0.1 + 0.1 * rng.uniform01();
  return ExpCost(Vector(n, 4.0), Vector(n, 2.0), r);
}

Vector random_point(std::size_t n, Rng& rng, double lo = 0.0, double hi = 10.0) {
  Vector x(n);
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

struct Family {
  const char* name;
  std::shared_ptr<CostModel> model;
};

std::vector<Family> families(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector mu(n), xi(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = rng.uniform(-2.0, 5.0), xi[i] = rng.uniform01();
  return {{"affine", std::make_shared<AffineCost>(mu, xi)},
          {"log", std::make_shared<LogCost>(ex1_cost(n, rng))},
          {"exp", std::make_shared<ExpCost>(ex2_cost(n, rng))}};
}

}  // namespace

TEST(LogCost, GradientAtOrigin) {
  const LogCost cost({2.0}, {1.5}, {2.0});
  EXPECT_DOUBLE_EQ(log_cost_gradient(cost, Vector{0.0})[0], 3.0);
}

TEST(LogCost, GradientDecaysToZero) {
  const LogCost cost({2.0, 2.0}, {1.5, 1.5}, {2.0, 1.2});
  double previous = 3.0;
  for (double t : {1.0, 1e2, 1e4, 1e8, 1e12}) {
    const Vector g = log_cost_gradient(cost, Vector{t, t});
    EXPECT_LT(g[0], previous);
    previous = g[0];
  }
  EXPECT_LT(previous, 1e-11);
}

TEST(LogCost, LipschitzBoundForExampleParameters) {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const LogCost cost = ex1_cost(200, rng);
    double expect = 0.0;
    for (std::size_t i = 0; i < 200; ++i) expect = std::max(expect, 1.5 * cost.r()[i] * cost.r()[i]);
    EXPECT_DOUBLE_EQ(cost.lipschitz(), expect);
    EXPECT_LE(cost.lipschitz(), 1.5 * 2.0 * 2.0);
  }
}

TEST(LogCost, DomainViolationIsAnError) {
  const LogCost cost({2.0}, {1.5}, {2.0});
  EXPECT_THROW((void)log_cost_gradient(cost, Vector{-0.5}), DomainError);
  EXPECT_THROW((void)cost.value(Vector{-0.75}), DomainError);
  EXPECT_FALSE(cost.admissible(Vector{-0.5}));
  EXPECT_TRUE(cost.admissible(Vector{-0.49}));
}

TEST(LogCost, RejectsBadParameters) {
  EXPECT_THROW(LogCost({-1.0}, {1.0}, {1.0}), ConfigError);
  EXPECT_THROW(LogCost({1.0}, {0.0}, {1.0}), ConfigError);
  EXPECT_THROW(LogCost({1.0}, {1.0}, {0.0}), ConfigError);
  EXPECT_THROW(LogCost({1.0, 1.0}, {1.0}, {1.0}), DimensionError);
}

TEST(ExpCost, GradientAtOrigin) {
  const ExpCost cost({4.0}, {2.0}, {0.15});
  EXPECT_NEAR(exp_cost_gradient(cost, Vector{0.0})[0], 0.3, 1e-15);
}

TEST(ExpCost, GradientPositiveAndDecreasing) {
  Rng rng(2);
  const ExpCost cost = ex2_cost(5, rng);
  for (double t = -20.0; t < 100.0; t += 0.5) {
    const Vector a = exp_cost_gradient(cost, Vector(5, t));
    const Vector b = exp_cost_gradient(cost, Vector(5, t + 0.5));
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_GT(b[i], 0.0);
      EXPECT_LT(b[i], a[i]);
    }
  }
}

TEST(ExpCost, LipschitzBoundForExampleParameters) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const ExpCost cost = ex2_cost(500, rng);
    EXPECT_LT(cost.lipschitz(), 2.0 * 0.04);
  }
}

TEST(ExpCost, DefinedEverywhere) {
  const ExpCost cost({4.0}, {2.0}, {0.15});
  EXPECT_TRUE(cost.admissible(Vector{-1e3}));
  EXPECT_NO_THROW((void)cost.gradient(Vector{-1e3}));
}

TEST(ExpCost, RequiresC0AtLeastC) {
  EXPECT_THROW(ExpCost({1.0}, {2.0}, {0.1}), ConfigError);
  EXPECT_THROW(ExpCost({2.0}, {0.0}, {0.1}), ConfigError);
  EXPECT_THROW(ExpCost({2.0}, {1.0}, {-0.1}), ConfigError);
  EXPECT_NO_THROW(ExpCost({2.0}, {2.0}, {0.1}));
}

TEST(AffineCost, ConstantGradient) {
  const AffineCost cost({1.0, -2.0}, {0.5, 0.25});
  EXPECT_DOUBLE_EQ(cost.value(Vector{2.0, 3.0}), 2.0 + 0.5 - 6.0 + 0.25);
  const Vector g = cost.gradient(Vector{7.0, -9.0});
  EXPECT_EQ(g, (Vector{1.0, -2.0}));
  EXPECT_EQ(cost.lipschitz(), 0.0);
  EXPECT_EQ(AffineCost({1.0}).xi(), Vector{0.0});
}

TEST(CostModel, DimensionMismatch) {
  const AffineCost cost({1.0, 2.0});
  EXPECT_THROW((void)cost.value(Vector{1.0}), DimensionError);
  EXPECT_THROW((void)cost.gradient(Vector{1.0, 2.0, 3.0}), DimensionError);
}

TEST(CostModel, MatchesFamilyFormulas) {
  for (const Family& f : families(20, 4)) {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const Vector x = random_point(20, rng);
      const double expect = oracle::h_value(*f.model, x);
      EXPECT_NEAR(f.model->value(x), expect, 1e-12 * std::max(1.0, std::abs(expect))) << f.name;
      const Eigen::VectorXd g = oracle::h_gradient(*f.model, x);
      EXPECT_LE((oracle::to_eigen(f.model->gradient(x)) - g).norm(), 1e-14 * std::max(1.0, g.norm()))
          << f.name;
    }
  }
}

TEST(CostModel, Separable) {
  for (const Family& f : families(7, 6)) {
    Rng rng(7);
    const Vector x = random_point(7, rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < 7; ++i) sum += f.model->component_value(i, x[i]);
    EXPECT_DOUBLE_EQ(f.model->value(x), sum) << f.name;
  }
}

TEST(FdGradientCheck, AffineIsExact) {
  const AffineCost cost({1.0, -3.0, 0.25}, {0.0, 1.0, 2.0});
  Rng rng(8);
  EXPECT_LE(fd_gradient_check(cost, random_point(3, rng), 1e-5), 1e-9);
}

TEST(FdGradientCheck, LogExampleParameters) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const LogCost cost = ex1_cost(10, rng);
    EXPECT_LE(fd_gradient_check(cost, random_point(10, rng), 1e-5), 1e-6);
  }
}

TEST(FdGradientCheck, ExpExampleParameters) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const ExpCost cost = ex2_cost(10, rng);
    EXPECT_LE(fd_gradient_check(cost, random_point(10, rng), 1e-5), 1e-6);
  }
}

TEST(FdGradientCheck, PerturbationLeavingDomainThrows) {
  const LogCost cost({1.0}, {1.0}, {1.0});
  EXPECT_THROW((void)fd_gradient_check(cost, Vector{-1.0 + 1e-7}, 1e-5), DomainError);
  EXPECT_THROW((void)fd_gradient_check(cost, Vector{1.0}, 0.0), PreconditionError);
}

TEST(CostProperties, EmpiricalLipschitz) {
  for (const Family& f : families(10, 11)) {
    Rng rng(12);
    for (int t = 0; t < 1000; ++t) {
      const Vector x = random_point(10, rng), y = random_point(10, rng);
      const Eigen::VectorXd dg =
          oracle::to_eigen(f.model->gradient(x)) - oracle::to_eigen(f.model->gradient(y));
      const double dx = (oracle::to_eigen(x) - oracle::to_eigen(y)).norm();
      EXPECT_LE(dg.norm(), f.model->lipschitz() * dx) << f.name;
    }
  }
}

TEST(CostProperties, TaylorRemainderBound) {
  for (const Family& f : families(10, 13)) {
    Rng rng(14);
    for (int t = 0; t < 1000; ++t) {
      const Vector x = random_point(10, rng), y = random_point(10, rng);
      const Eigen::VectorXd d = oracle::to_eigen(y) - oracle::to_eigen(x);
      const double lin = f.model->value(y) - f.model->value(x) -
                         oracle::to_eigen(f.model->gradient(x)).dot(d);
      EXPECT_LE(std::abs(lin), 0.5 * f.model->lipschitz() * d.squaredNorm() + 1e-9) << f.name;
    }
  }
}

TEST(CostProperties, ConcavityOfLogAndExp) {
  for (const Family& f : families(10, 15)) {
    EXPECT_TRUE(f.model->is_concave());
    Rng rng(16);
    for (int t = 0; t < 1000; ++t) {
      const Vector x = random_point(10, rng), y = random_point(10, rng);
      Vector mid(10);
      for (std::size_t i = 0; i < 10; ++i) mid[i] = 0.5 * x[i] + 0.5 * y[i];
      EXPECT_GE(f.model->value(mid), 0.5 * f.model->value(x) + 0.5 * f.model->value(y) - 1e-12)
          << f.name;
    }
  }
}
