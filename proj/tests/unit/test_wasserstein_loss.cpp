#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpgd/wpgd.hpp"

using namespace wpgd;

namespace {

const std::vector<std::vector<double>> kToyCost = {{0, 10, 0.01}, {10, 0, 1}, {0.01, 1, 0}};

Prediction with_probs(std::vector<double> probs) {
  Prediction p;
  p.logits.assign(probs.size(), 0.0);
  p.probs = std::move(probs);
  return p;
}

}  // namespace

TEST(ClosedForm, Examples) {
  const auto c = ot::CostMatrix::validate(kToyCost);
  EXPECT_EQ(ot::closed_form_w(std::vector<double>{0, 1, 0}, 1, c), 0.0);
  EXPECT_NEAR(ot::closed_form_w(std::vector<double>{0.2, 0.3, 0.5}, 0, c), 3.005, 1e-15);
  EXPECT_THROW(ot::closed_form_w(std::vector<double>{0.2, 0.3, 0.5}, 3, c), ValidationError);
  EXPECT_THROW(ot::closed_form_w(std::vector<double>{0.5, 0.5}, 0, c), DimensionError);
}

TEST(ClosedForm, TargetColumnOfOptimalPlanEqualsSource) {
  Rng rng = make_rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + trial % 6;
    const auto c = ot::CostMatrix::validate(oracle::random_metric(rng, k), 1.0 + trial % 2);
    const auto q = oracle::random_simplex(rng, k, true);
    const std::size_t t = trial % k;
    std::vector<double> onehot(k, 0.0);
    onehot[t] = 1.0;
    const auto plan = ot::exact_ot(q, onehot, c);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(plan(i, t), q[i], 1e-12);
    EXPECT_NEAR(plan.cost, ot::closed_form_w(q, t, c), 1e-9 * std::max(1.0, plan.cost));
  }
}

TEST(LossW, Examples) {
  const auto c = ot::CostMatrix::validate(kToyCost);
  EXPECT_NEAR(ot::loss_w(with_probs({1, 0, 0}), 0, c, 1.0), 0.0, 1e-15);
  const double v = ot::loss_w(with_probs({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0, c, 1.0);
  EXPECT_NEAR(v, 2.33667, 1e-5);
  EXPECT_NEAR(v, 10.01 / 3.0 - 1.0, 1e-13);
  // Large lambda leaves the transport term.
  EXPECT_NEAR(ot::loss_w(with_probs({0.2, 0.3, 0.5}), 0, c, 1e12), 3.005, 1e-11);
}

TEST(LossW, Errors) {
  const auto c1 = ot::CostMatrix::validate({{0.0}});
  EXPECT_THROW(ot::loss_w(with_probs({1.0}), 0, c1, 1.0), ValidationError);
  const auto c = ot::CostMatrix::validate(kToyCost);
  EXPECT_THROW(ot::loss_w(with_probs({0.5, 0.5}), 0, c, 1.0), DimensionError);
  EXPECT_THROW(ot::loss_w(with_probs({0.2, 0.3, 0.5}), 3, c, 1.0), ValidationError);
  EXPECT_THROW(ot::loss_w(with_probs({0.2, 0.3, 0.5}), 0, c, 0.0), ValidationError);
}

TEST(LossW, TransportTermFavoursExpensiveClasses) {
  // With label 0 the transport term grows 10 per unit mass moved to class 1
  // and 0.01 per unit moved to class 2.
  const auto c = ot::CostMatrix::validate(kToyCost);
  const auto g = ot::loss_w_grad(make_prediction({0.0, 0.0, 0.0}), 0, c, 1e12);
  const double ratio = g.grad_logits[1] - g.grad_logits[0];
  const double ratio2 = g.grad_logits[2] - g.grad_logits[0];
  EXPECT_NEAR(ratio / ratio2, 1000.0, 1e-6);
}

TEST(LossW, ParameterAndInputGradientsMatchFiniteDifferences) {
  const auto c = ot::CostMatrix::validate(kToyCost, 1.0);
  Rng rng = make_rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    MlpSpec spec{{2, 6, 3}, Activation::tanh, static_cast<std::uint64_t>(trial)};
    const auto p = init_params(spec);
    std::vector<double> x{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const std::size_t label = trial % 3;
    const auto fwd = forward(p, Tensor::vector(x));
    const auto g = backprop(p, fwd.trace, ot::loss_w_grad(fwd.prediction, label, c, 2.0).grad_logits);
    auto fx = [&](const std::vector<double>& xi) {
      return ot::loss_w(predict(p, Tensor::vector(xi)), label, c, 2.0);
    };
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_LT(oracle::relative_error(g.input[i], oracle::central_difference(fx, x, i)), 1e-4);
    const std::vector<double> theta(p.flat().begin(), p.flat().end());
    auto ft = [&](const std::vector<double>& t) {
      return ot::loss_w(predict(MlpParams(spec, t), Tensor::vector(x)), label, c, 2.0);
    };
    for (std::size_t i = 0; i < theta.size(); ++i)
      EXPECT_LT(oracle::relative_error(g.params.flat()[i], oracle::central_difference(ft, theta, i)), 1e-4);
  }
}
