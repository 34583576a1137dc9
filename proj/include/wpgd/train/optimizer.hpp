#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"

namespace wpgd::train {

/// SGD with Nesterov momentum and L2 weight decay:
///   g <- g + wd * theta
///   v <- mu * v - lr * g
///   theta <- theta + mu * v - lr * g
class NesterovSgd {
 public:
  NesterovSgd(double momentum, double weight_decay)
      : momentum_(momentum), weight_decay_(weight_decay) {
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw ValidationError("optimizer: momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw ValidationError("optimizer: weight decay must be >= 0");
  }

  void step(MlpParams& params, const MlpParams& grad, double lr) {
    if (!params.same_layout(grad)) throw DimensionError("optimizer: gradient layout mismatch");
    auto theta = params.flat();
    const auto g = grad.flat();
    if (velocity_.size() != theta.size()) velocity_.assign(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g[i] + weight_decay_ * theta[i];
      velocity_[i] = momentum_ * velocity_[i] - lr * gi;
      theta[i] += momentum_ * velocity_[i] - lr * gi;
    }
  }

  const std::vector<double>& velocity() const noexcept { return velocity_; }

 private:
  double momentum_;
  double weight_decay_;
  std::vector<double> velocity_;
};

}  // namespace wpgd::train
