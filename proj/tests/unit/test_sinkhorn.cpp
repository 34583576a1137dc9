#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpgd/wpgd.hpp"

using namespace wpgd;

TEST(Sinkhorn, SymmetricTwoClassFixedPoint) {
  const auto c = ot::CostMatrix::validate({{0, 1}, {1, 0}});
  const std::vector<double> q{0.5, 0.5};
  const auto r = ot::sinkhorn(q, q, c, {.lambda = 1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.log_domain);
  const double a = 0.5 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(a, 0.36553, 1e-5);
  EXPECT_NEAR(r.plan(0, 0), a, 1e-9);
  EXPECT_NEAR(r.plan(1, 1), a, 1e-9);
  EXPECT_NEAR(r.plan(0, 1), 0.5 - a, 1e-9);
  EXPECT_NEAR(r.plan(0, 1), 0.13447, 1e-5);
  EXPECT_NEAR(r.plan.cost, 0.26894, 1e-5);
}

TEST(Sinkhorn, OneHotMarginalsForceThePlan) {
  const auto c = ot::CostMatrix::validate({{0, 10, 0.01}, {10, 0, 1}, {0.01, 1, 0}}, 10.0);
  const std::vector<double> q{0, 1, 0};
  for (double lambda : {0.1, 1.0, 1e3, 1e6}) {
    const auto r = ot::sinkhorn(q, q, c, {.lambda = lambda});
    EXPECT_NEAR(r.plan.cost, 0.0, 1e-12);
    EXPECT_NEAR(r.plan(1, 1), 1.0, 1e-12);
    EXPECT_TRUE(r.converged);
  }
}

TEST(Sinkhorn, ApproachesExactAsLambdaGrows) {
  Rng rng = make_rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = ot::CostMatrix::validate(oracle::random_metric(rng, 5, 1.0));
    const auto q = oracle::random_simplex(rng, 5);
    const auto q2 = oracle::random_simplex(rng, 5);
    const double exact = ot::exact_ot(q, q2, c).cost;
    double prev = 1e9;
    for (double lambda : {10.0, 100.0, 1000.0}) {
      // Near-vertex optima converge slowly at large lambda; allow extra sweeps.
      const auto r = ot::sinkhorn(q, q2, c, {.lambda = lambda, .max_iters = 100000});
      EXPECT_TRUE(r.converged);
      const double gap = std::abs(r.plan.cost - exact);
      EXPECT_LT(gap, prev) << "trial " << trial << " lambda " << lambda;
      prev = gap;
      // A feasible plan cannot beat the optimum; a plan off by v in l1 can
      // be repaired for at most max(C^p) * v.
      EXPECT_GE(r.plan.cost, exact - c.max_powered() * r.marginal_violation - 1e-9);
    }
    EXPECT_LT(prev, 1e-2);
  }
}

TEST(Sinkhorn, LogDomainForHugePoweredCosts) {
  const auto c = ot::CostMatrix::validate({{0, 10, 0.01}, {10, 0, 1}, {0.01, 1, 0}}, 10.0);
  const std::vector<double> q{0.2, 0.3, 0.5}, q2{0.4, 0.4, 0.2};
  // lambda * max(C^p) = 1e10, far beyond what the kernel form can represent.
  const auto r = ot::sinkhorn(q, q2, c, {.lambda = 1.0, .max_iters = 200000});
  EXPECT_TRUE(r.log_domain);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.marginal_violation, 1e-9);
  const double exact = ot::exact_ot(q, q2, c).cost;
  EXPECT_GE(r.plan.cost, exact - 1e-9);
  EXPECT_TRUE(std::isfinite(r.plan.cost));
}

TEST(Sinkhorn, ZeroMassEntriesStayOutOfTheSupport) {
  const auto c = ot::CostMatrix::validate({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  const std::vector<double> q{0.5, 0.0, 0.5}, q2{0.0, 0.6, 0.4};
  const auto r = ot::sinkhorn(q, q2, c, {.lambda = 5.0});
  EXPECT_TRUE(r.converged);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(r.plan(1, j), 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.plan(i, 0), 0.0);
}

TEST(Sinkhorn, NonConvergenceIsFlagged) {
  const auto c = ot::CostMatrix::validate({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  const std::vector<double> q{0.7, 0.2, 0.1}, q2{0.1, 0.2, 0.7};
  const auto r = ot::sinkhorn(q, q2, c, {.lambda = 20.0, .max_iters = 1, .tolerance = 1e-14});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_GT(r.marginal_violation, 1e-14);
}

TEST(Sinkhorn, ConfigValidation) {
  const auto c = ot::CostMatrix::validate({{0, 1}, {1, 0}});
  const std::vector<double> q{0.5, 0.5};
  EXPECT_THROW(ot::sinkhorn(q, q, c, {.lambda = 0.0}), ValidationError);
  EXPECT_THROW(ot::sinkhorn(q, q, c, {.max_iters = 0}), ValidationError);
}
