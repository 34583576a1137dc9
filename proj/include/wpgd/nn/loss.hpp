#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"

namespace wpgd {

/// Floor applied to probabilities before taking logs.
inline constexpr double kProbFloor = 1e-12;

/// Loss value together with its gradient w.r.t. the logits.
struct LossWithGrad {
  double value = 0.0;
  std::vector<double> grad_logits;
};

inline void check_label(const Prediction& pred, std::size_t label) {
  if (label >= pred.num_classes())
    throw ValidationError("label " + std::to_string(label) + " out of range for " +
                          std::to_string(pred.num_classes()) + " classes");
}

/// Cross-entropy, -log max(probs[label], 1e-12).
inline double loss_ce(const Prediction& pred, std::size_t label) {
  check_label(pred, label);
  return -std::log(std::max(pred.probs[label], kProbFloor));
}

/// Cross-entropy and softmax gradient probs - onehot. Inside the floor the
/// loss is constant, so the gradient is zero there.
inline LossWithGrad loss_ce_grad(const Prediction& pred, std::size_t label) {
  LossWithGrad r{loss_ce(pred, label), pred.probs};
  if (pred.probs[label] < kProbFloor) {
    std::fill(r.grad_logits.begin(), r.grad_logits.end(), 0.0);
    return r;
  }
  r.grad_logits[label] -= 1.0;
  return r;
}

}  // namespace wpgd
