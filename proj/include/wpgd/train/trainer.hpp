#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wpgd/attacks/pgd.hpp"
#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"
#include "wpgd/nn/loss.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/parallel.hpp"
#include "wpgd/random.hpp"
#include "wpgd/train/config.hpp"
#include "wpgd/train/optimizer.hpp"

namespace wpgd::train {

struct TrainResult {
  MlpParams params;
  TrainReport report;
};

// Examples of a batch are processed in blocks of this size, each summed
// serially into its own gradient buffer; blocks are then added in order.
// The arithmetic is therefore the same for every thread count.
inline constexpr std::size_t kGradientBlock = 16;

/// The attack actually used for the inner maximisation of `cfg`.
inline attacks::AttackConfig inner_attack(const TrainConfig& cfg) {
  attacks::AttackConfig a = cfg.attack;
  a.objective = cfg.mode == Mode::wpgd ? attacks::Objective::wasserstein : attacks::Objective::ce;
  return a;
}

/// Minibatch training. In pgd and wpgd modes every example is replaced by
/// its adversarial counterpart before the cross-entropy step; the two modes
/// differ only in the attack objective.
inline TrainResult train(const MlpSpec& spec, const data::Dataset& data, const TrainConfig& cfg,
                         const ot::CostMatrix* cost = nullptr) {
  cfg.validate();
  if (data.empty()) throw ValidationError("train: dataset is empty");
  if (data.num_classes != spec.num_classes())
    throw ConfigError("model.layer_widths", "class count " + std::to_string(spec.num_classes()) +
                                                " differs from dataset K=" +
                                                std::to_string(data.num_classes));
  if (data.input_dim != spec.input_dim())
    throw ConfigError("model.layer_widths", "input width differs from dataset input dimension");
  if (cfg.mode == Mode::wpgd) {
    if (!cost) throw ConfigError("cost_matrix", "wpgd training needs a cost matrix");
    if (cost->size() != data.num_classes)
      throw ConfigError("cost_matrix", "cost matrix size differs from dataset K");
  }

  const auto start = std::chrono::steady_clock::now();
  TrainResult result{init_params(spec), {}};
  result.report.mode = cfg.mode;
  MlpParams& params = result.params;
  NesterovSgd opt(cfg.momentum, cfg.weight_decay);
  const attacks::AttackConfig attack = inner_attack(cfg);
  const bool adversarial = cfg.mode != Mode::ce;
  const std::size_t n = data.size();

  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(cfg.seed, epoch);
    shuffle(order.begin(), order.end(), rng);
    const double lr = cfg.learning_rate_at(epoch);

    double loss_sum = 0.0;
    std::size_t natural_wrong = 0, adversarial_wrong = 0;
    for (std::size_t b0 = 0; b0 < n; b0 += cfg.batch_size) {
      const std::size_t bn = std::min(cfg.batch_size, n - b0);
      const std::size_t blocks = (bn + kGradientBlock - 1) / kGradientBlock;
      std::vector<MlpParams> block_grads(blocks, MlpParams(spec));
      std::vector<double> block_loss(blocks, 0.0);
      std::vector<std::size_t> block_nat(blocks, 0), block_adv(blocks, 0);

      parallel_for(blocks, cfg.threads, [&](std::size_t blk) {
        const std::size_t lo = blk * kGradientBlock;
        const std::size_t hi = std::min(bn, lo + kGradientBlock);
        for (std::size_t t = lo; t < hi; ++t) {
          const std::size_t idx = order[b0 + t];
          const LabeledExample& ex = data.examples[idx];
          const std::uint64_t stream = epoch * n + idx;
          Tensor adv_input;
          if (adversarial) {
            if (predict(params, ex.input).predicted_class != ex.label) ++block_nat[blk];
            adv_input = attacks::pgd_attack(params, ex, attack, cost, stream).x_adv;
          }
          const Tensor& x = adversarial ? adv_input : ex.input;
          const auto fwd = forward(params, x);
          const auto loss = loss_ce_grad(fwd.prediction, ex.label);
          if (fwd.prediction.predicted_class != ex.label) ++(adversarial ? block_adv : block_nat)[blk];
          block_loss[blk] += loss.value;
          backprop_into(params, fwd.trace, loss.grad_logits, &block_grads[blk], false);
        }
      });

      MlpParams grad(spec);
      auto g = grad.flat();
      double batch_loss = 0.0;
      for (std::size_t blk = 0; blk < blocks; ++blk) {
        const auto bg = block_grads[blk].flat();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += bg[i];
        batch_loss += block_loss[blk];
        natural_wrong += block_nat[blk];
        adversarial_wrong += block_adv[blk];
      }
      if (!std::isfinite(batch_loss))
        throw NumericError("train: non-finite loss in epoch " + std::to_string(epoch) +
                           " at batch starting " + std::to_string(b0));
      const double inv = 1.0 / static_cast<double>(bn);
      for (double& v : g) v *= inv;
      opt.step(params, grad, lr);
      loss_sum += batch_loss;
    }

    EpochStats s;
    s.epoch = epoch;
    s.learning_rate = lr;
    s.train_loss = loss_sum / static_cast<double>(n);
    s.natural_error = 100.0 * static_cast<double>(natural_wrong) / static_cast<double>(n);
    if (adversarial)
      s.adversarial_error = 100.0 * static_cast<double>(adversarial_wrong) / static_cast<double>(n);
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    result.report.epochs.push_back(s);
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace wpgd::train
