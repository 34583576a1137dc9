#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wpgd/wpgd.hpp"

using namespace wpgd;

namespace {

std::vector<double> flat_powered(const ot::CostMatrix& c) {
  std::vector<double> m;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) m.push_back(c.powered(i, j));
  return m;
}

void expect_marginals(const ot::TransportPlan& p, const std::vector<double>& q,
                      const std::vector<double>& q2) {
  const auto r = p.row_sums(), c = p.col_sums();
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(r[i], q[i], 1e-8);
    EXPECT_NEAR(c[i], q2[i], 1e-8);
  }
  for (double v : p.plan) EXPECT_GE(v, 0.0);
}

}  // namespace

TEST(ExactOt, IdenticalMarginalsCostNothing) {
  const auto c = ot::CostMatrix::validate({{0, 2, 3}, {2, 0, 4}, {3, 4, 0}});
  const std::vector<double> q{0.2, 0.5, 0.3};
  const auto p = ot::exact_ot(q, q, c);
  EXPECT_NEAR(p.cost, 0.0, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p(i, i), q[i], 1e-15);
}

TEST(ExactOt, TwoClassExample) {
  const auto c = ot::CostMatrix::validate({{0, 1}, {1, 0}});
  const std::vector<double> q{0.7, 0.3}, q2{0.3, 0.7};
  const auto p = ot::exact_ot(q, q2, c);
  EXPECT_NEAR(p.cost, 0.4, 1e-12);
  // One-parameter sweep over the feasible plans [[t, 0.7-t], [0.3-t, t]].
  double best = 1e9;
  for (int s = 0; s <= 30000; ++s) {
    const double t = 0.3 * s / 30000.0;
    best = std::min(best, (0.7 - t) + (0.3 - t));
  }
  EXPECT_NEAR(p.cost, best, 1e-12);
  expect_marginals(p, q, q2);
}

TEST(ExactOt, ToyMatrixOneHotTarget) {
  const auto c = ot::CostMatrix::validate({{0, 10, 0.01}, {10, 0, 1}, {0.01, 1, 0}});
  const std::vector<double> q{0.2, 0.3, 0.5}, q2{1, 0, 0};
  const auto p = ot::exact_ot(q, q2, c);
  EXPECT_NEAR(p.cost, 3.005, 1e-12);
  EXPECT_NEAR(p.cost, ot::closed_form_w(q, 0, c), 1e-12);
}

TEST(ExactOt, MatchesVertexEnumeration) {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t k = 2 + trial % 3;
    const double pexp = trial % 4 == 0 ? 0.5 : (trial % 4 == 1 ? 1.0 : 2.0);
    const auto c = ot::CostMatrix::validate(oracle::random_metric(rng, k, 3.0), pexp);
    const auto q = oracle::random_simplex(rng, k, true);
    const auto q2 = oracle::random_simplex(rng, k, true);
    const auto p = ot::exact_ot(q, q2, c);
    EXPECT_NEAR(p.cost, oracle::brute_force_ot(q, q2, flat_powered(c)), 1e-10) << "trial " << trial;
    expect_marginals(p, q, q2);
  }
}

TEST(ExactOt, SymmetricInArguments) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + trial % 9;
    const auto c = ot::CostMatrix::validate(oracle::random_metric(rng, k), 1.0 + trial % 3);
    const auto q = oracle::random_simplex(rng, k);
    const auto q2 = oracle::random_simplex(rng, k);
    EXPECT_NEAR(ot::exact_ot(q, q2, c).cost, ot::exact_ot(q2, q, c).cost,
                1e-9 * std::max(1.0, c.max_powered()));
  }
}

TEST(ExactOt, Errors) {
  const auto c = ot::CostMatrix::validate({{0, 1}, {1, 0}});
  EXPECT_THROW(ot::exact_ot(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.6}, c),
               ValidationError);
  EXPECT_THROW(ot::exact_ot(std::vector<double>{1.0}, std::vector<double>{1.0}, c), DimensionError);
  EXPECT_THROW(ot::exact_ot(std::vector<double>{1.5, -0.5}, std::vector<double>{0.5, 0.5}, c),
               ValidationError);
}
