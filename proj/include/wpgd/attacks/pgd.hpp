#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wpgd/attacks/config.hpp"
#include "wpgd/attacks/projection.hpp"
#include "wpgd/error.hpp"
#include "wpgd/nn/example.hpp"
#include "wpgd/nn/loss.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/ot/wasserstein_loss.hpp"
#include "wpgd/parallel.hpp"
#include "wpgd/random.hpp"

namespace wpgd::attacks {

struct AdversarialExample {
  Tensor x_adv;
  double objective_value = 0.0;
  double initial_objective_value = 0.0;
};

/// Attack objective at a prediction: cross-entropy, or the Wasserstein loss
/// with the configured lambda.
inline LossWithGrad attack_objective(const Prediction& pred, std::size_t label,
                                     const AttackConfig& cfg, const ot::CostMatrix* cost) {
  if (cfg.objective == Objective::ce) return loss_ce_grad(pred, label);
  return ot::loss_w_grad(pred, label, *cost, cfg.lambda);
}

inline Tensor project(const Tensor& candidate, const Tensor& center, const AttackConfig& cfg) {
  return cfg.norm == Norm::linf ? project_linf(candidate, center, cfg.eps, cfg.clamp_lo, cfg.clamp_hi)
                                : project_l2(candidate, center, cfg.eps, cfg.clamp_lo, cfg.clamp_hi);
}

namespace detail {

inline void check_attack(const MlpParams& params, const AttackConfig& cfg,
                         const ot::CostMatrix* cost) {
  cfg.validate();
  if (cfg.objective == Objective::wasserstein) {
    if (!cost) throw ValidationError("attack: wasserstein objective needs a cost matrix");
    if (cost->size() != params.spec().num_classes())
      throw DimensionError("attack: cost matrix size differs from the model's class count");
  }
}

inline Tensor random_start(const Tensor& x, const AttackConfig& cfg, Rng& rng) {
  Tensor out = x;
  if (cfg.norm == Norm::linf) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += uniform(rng, -cfg.eps, cfg.eps);
  } else {
    // Uniform in the ball: Gaussian direction, radius eps * u^(1/d).
    std::vector<double> dir(out.size());
    double sq = 0.0;
    for (double& d : dir) {
      d = standard_normal(rng);
      sq += d * d;
    }
    const double norm = std::sqrt(sq);
    const double radius =
        cfg.eps * std::pow(uniform01(rng), 1.0 / static_cast<double>(out.size()));
    if (norm > 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += radius * dir[i] / norm;
  }
  return project(out, x, cfg);
}

}  // namespace detail

/// Projected gradient ascent on the configured objective inside the eps-ball
/// around example.input. l-inf steps move by alpha * sign(grad); l2 steps by
/// alpha * grad / |grad|. A zero gradient leaves the point where it is.
/// `stream` selects the random-start stream, so each example gets the same
/// start regardless of how attacks are scheduled.
inline AdversarialExample pgd_attack(const MlpParams& params, const LabeledExample& example,
                                     const AttackConfig& cfg, const ot::CostMatrix* cost = nullptr,
                                     std::uint64_t stream = 0) {
  detail::check_attack(params, cfg, cost);
  const Tensor& clean = example.input;

  AdversarialExample adv;
  adv.initial_objective_value =
      attack_objective(predict(params, clean), example.label, cfg, cost).value;
  if (cfg.eps == 0.0) {
    adv.x_adv = clean;
    adv.objective_value = adv.initial_objective_value;
    return adv;
  }

  Tensor x = clean;
  if (cfg.random_start) {
    Rng rng = make_rng(cfg.seed, stream);
    x = detail::random_start(clean, cfg, rng);
  }
  const double alpha = cfg.alpha();
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const auto fwd = forward(params, x);
    const auto obj = attack_objective(fwd.prediction, example.label, cfg, cost);
    const Tensor grad = input_gradient(params, fwd.trace, obj.grad_logits);
    Tensor moved = x;
    if (cfg.norm == Norm::linf) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double g = grad[i];
        moved[i] += g > 0.0 ? alpha : (g < 0.0 ? -alpha : 0.0);
      }
    } else {
      double sq = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) sq += grad[i] * grad[i];
      const double norm = std::sqrt(sq);
      if (norm == 0.0) continue;
      for (std::size_t i = 0; i < x.size(); ++i) moved[i] += alpha * grad[i] / norm;
    }
    x = project(moved, clean, cfg);
  }
  adv.objective_value = attack_objective(predict(params, x), example.label, cfg, cost).value;
  adv.x_adv = std::move(x);
  return adv;
}

/// Attacks every example; example i uses random-start stream first_stream + i.
inline std::vector<AdversarialExample> attack_all(const MlpParams& params,
                                                  std::span<const LabeledExample> examples,
                                                  const AttackConfig& cfg,
                                                  const ot::CostMatrix* cost, unsigned threads = 1,
                                                  std::uint64_t first_stream = 0) {
  detail::check_attack(params, cfg, cost);
  std::vector<AdversarialExample> out(examples.size());
  parallel_for(examples.size(), threads, [&](std::size_t i) {
    out[i] = pgd_attack(params, examples[i], cfg, cost, first_stream + i);
  });
  return out;
}

}  // namespace wpgd::attacks
