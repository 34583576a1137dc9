#include <gtest/gtest.h>

#include "wpgd/wpgd.hpp"

using namespace wpgd;

TEST(NesterovSgd, ZeroGradientZeroDecayIsIdentity) {
  auto p = init_params(MlpSpec{{3, 4, 2}, Activation::relu, 1});
  const auto before = p;
  train::NesterovSgd opt(0.9, 0.0);
  const MlpParams zero(p.spec());
  for (int i = 0; i < 5; ++i) opt.step(p, zero, 0.1);
  EXPECT_EQ(p, before);
}

TEST(NesterovSgd, DecayContractsTowardZero) {
  auto p = init_params(MlpSpec{{3, 4, 2}, Activation::relu, 1});
  const auto before = p;
  const double lr = 0.1, wd = 0.01, mu = 0.9;
  train::NesterovSgd opt(mu, wd);
  const MlpParams zero(p.spec());
  opt.step(p, zero, lr);
  // First step from zero velocity: theta * (1 - lr wd (1 + mu)).
  const double factor = 1.0 - lr * wd * (1.0 + mu);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.flat()[i], before.flat()[i] * factor, 1e-15);
  // Later steps keep shrinking magnitudes while the factor stays positive.
  for (int s = 0; s < 20; ++s) {
    const auto prev = p;
    opt.step(p, zero, lr);
    for (std::size_t i = 0; i < p.size(); ++i)
      EXPECT_LE(std::abs(p.flat()[i]), std::abs(prev.flat()[i]) + 1e-15);
  }
}

TEST(NesterovSgd, MatchesHandRecurrence) {
  MlpParams p(MlpSpec{{1, 1}, Activation::relu, 0}, {1.0, -2.0});
  MlpParams g(p.spec(), {0.5, 0.25});
  train::NesterovSgd opt(0.5, 0.1);
  double th = 1.0, v = 0.0;
  for (int s = 0; s < 3; ++s) {
    opt.step(p, g, 0.2);
    const double gi = 0.5 + 0.1 * th;
    v = 0.5 * v - 0.2 * gi;
    th += 0.5 * v - 0.2 * gi;
    EXPECT_NEAR(p.flat()[0], th, 1e-15);
  }
}

TEST(NesterovSgd, Validation) {
  EXPECT_THROW(train::NesterovSgd(1.0, 0.0), ValidationError);
  EXPECT_THROW(train::NesterovSgd(0.5, -1.0), ValidationError);
  auto p = init_params(MlpSpec{{3, 2}, Activation::relu, 1});
  train::NesterovSgd opt(0.5, 0.0);
  EXPECT_THROW(opt.step(p, MlpParams(MlpSpec{{2, 2}, Activation::relu, 0}), 0.1), DimensionError);
}
