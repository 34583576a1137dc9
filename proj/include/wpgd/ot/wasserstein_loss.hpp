#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/loss.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/ot/distribution.hpp"

namespace wpgd::ot {

/// Transport cost from q to the one-hot distribution at `target_class`.
/// The whole of q must travel to that class, so the cost is the dot product
/// of row `target_class` of C^p with q.
inline double closed_form_w(std::span<const double> q, std::size_t target_class,
                            const CostMatrix& cost) {
  if (q.size() != cost.size())
    throw DimensionError("closed_form_w: distribution length differs from cost matrix size");
  if (target_class >= cost.size())
    throw ValidationError("closed_form_w: class " + std::to_string(target_class) +
                          " out of range");
  const auto row = cost.powered_row(target_class);
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) s += row[j] * q[j];
  return s;
}

namespace detail {

inline void check_loss_args(const Prediction& pred, std::size_t label, const CostMatrix& cost,
                            double lambda) {
  if (cost.size() < 2) throw ValidationError("loss_w: needs at least two classes");
  if (pred.num_classes() != cost.size())
    throw DimensionError("loss_w: prediction and cost matrix disagree on class count");
  check_label(pred, label);
  if (!(lambda > 0.0)) throw ValidationError("loss_w: lambda must be positive");
}

}  // namespace detail

/// Wasserstein loss: C^p[label] . probs - H(probs) / (lambda ln K).
inline double loss_w(const Prediction& pred, std::size_t label, const CostMatrix& cost,
                     double lambda) {
  detail::check_loss_args(pred, label, cost, lambda);
  const double k = static_cast<double>(cost.size());
  return closed_form_w(pred.probs, label, cost) -
         entropy_unchecked(pred.probs) / (lambda * std::log(k));
}

/// loss_w with its gradient w.r.t. the logits. With g_i = dL/dp_i the
/// softmax chain rule gives dL/dz_j = p_j (g_j - sum_i p_i g_i).
inline LossWithGrad loss_w_grad(const Prediction& pred, std::size_t label, const CostMatrix& cost,
                                double lambda) {
  LossWithGrad r;
  r.value = loss_w(pred, label, cost, lambda);
  const std::size_t k = cost.size();
  const double gamma = 1.0 / (lambda * std::log(static_cast<double>(k)));
  const auto row = cost.powered_row(label);
  std::vector<double> g(k);
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double p = pred.probs[i];
    g[i] = row[i] + (p > 0.0 ? gamma * std::log(p) : 0.0);
    mean += p * g[i];
  }
  r.grad_logits.resize(k);
  for (std::size_t j = 0; j < k; ++j) r.grad_logits[j] = pred.probs[j] * (g[j] - mean);
  return r;
}

}  // namespace wpgd::ot
