#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpgd/wpgd.hpp"

using namespace wpgd;

TEST(LossCe, OneHotAtLabelIsZero) {
  const auto p = make_prediction({0.0, 800.0, 0.0});
  EXPECT_NEAR(loss_ce(p, 1), 0.0, 1e-12);
}

TEST(LossCe, UniformTenClasses) {
  const auto p = make_prediction(std::vector<double>(10, 0.0));
  EXPECT_NEAR(loss_ce(p, 3), 2.302585, 1e-6);
  EXPECT_NEAR(loss_ce(p, 3), std::log(10.0), 1e-14);
}

TEST(LossCe, HandValue) {
  const auto p = make_prediction({1.0, 0.0});  // probs (0.7311, 0.2689)
  EXPECT_NEAR(loss_ce(p, 1), 1.3133, 1e-4);
  EXPECT_NEAR(loss_ce(p, 1), std::log(1.0 + std::exp(1.0)), 1e-14);
}

TEST(LossCe, FloorCapsTheLoss) {
  const auto p = make_prediction({0.0, 2000.0});
  EXPECT_NEAR(loss_ce(p, 0), -std::log(kProbFloor), 1e-9);
  const auto g = loss_ce_grad(p, 0);
  for (double v : g.grad_logits) EXPECT_EQ(v, 0.0);
}

TEST(LossCe, LabelOutOfRange) {
  const auto p = make_prediction({0.0, 1.0});
  EXPECT_THROW(loss_ce(p, 2), ValidationError);
}

TEST(LossCe, GradientIsProbsMinusOneHot) {
  const auto p = make_prediction({0.2, -0.5, 1.1});
  const auto g = loss_ce_grad(p, 2);
  EXPECT_NEAR(g.grad_logits[0], p.probs[0], 1e-15);
  EXPECT_NEAR(g.grad_logits[2], p.probs[2] - 1.0, 1e-15);
}

TEST(LossW, GradientMatchesFiniteDifferencesInLogits) {
  Rng rng = make_rng(9);
  for (double pexp : {1.0, 2.5}) {
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t k = 2 + trial % 5;
      const auto c = ot::CostMatrix::validate(oracle::random_metric(rng, k, 2.0), pexp);
      std::vector<double> z(k);
      for (double& v : z) v = uniform(rng, -2, 2);
      const std::size_t label = trial % k;
      const double lambda = 0.5 + trial;
      const auto g = ot::loss_w_grad(make_prediction(z), label, c, lambda);
      auto f = [&](const std::vector<double>& zz) {
        return ot::loss_w(make_prediction(zz), label, c, lambda);
      };
      for (std::size_t i = 0; i < k; ++i)
        EXPECT_LT(oracle::relative_error(g.grad_logits[i], oracle::central_difference(f, z, i)), 1e-4);
    }
  }
}
