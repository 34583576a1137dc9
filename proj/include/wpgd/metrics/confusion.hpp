#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpgd/attacks/pgd.hpp"
#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/parallel.hpp"

namespace wpgd::metrics {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}

  std::size_t size() const noexcept { return k_; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return counts_[i * k_ + j]; }
  void add(std::size_t truth, std::size_t predicted) { ++counts_.at(truth * k_ + predicted); }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  std::uint64_t row_total(std::size_t i) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) s += counts_[i * k_ + j];
    return s;
  }
  std::uint64_t trace() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += counts_[i * k_ + i];
    return s;
  }

  /// Error rate in percent, 100 * (1 - trace / total).
  double error_percent() const {
    const auto t = total();
    if (t == 0) throw ValidationError("confusion: no examples");
    return 100.0 * (1.0 - static_cast<double>(trace()) / static_cast<double>(t));
  }

  /// Row-normalised copy (k x k, row-major); empty rows stay zero.
  std::vector<double> normalized() const {
    std::vector<double> out(k_ * k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      const auto rt = row_total(i);
      if (rt == 0) continue;
      for (std::size_t j = 0; j < k_; ++j)
        out[i * k_ + j] = static_cast<double>(counts_[i * k_ + j]) / static_cast<double>(rt);
    }
    return out;
  }

  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct ConfusionResult {
  ConfusionMatrix matrix;
  double error_percent = 0.0;  // NE without an attack, AE with one
  std::optional<double> mean_objective;  // attack objective at x_adv
};

/// Confusion of `params` on `data`, on clean inputs or, when `attack` is
/// given, on the adversarial inputs it produces.
inline ConfusionResult confusion(const MlpParams& params, const data::Dataset& data,
                                 const std::optional<attacks::AttackConfig>& attack = std::nullopt,
                                 const ot::CostMatrix* cost = nullptr, unsigned threads = 1) {
  if (data.empty()) throw ValidationError("confusion: dataset is empty");
  const std::size_t k = params.spec().num_classes();
  if (data.num_classes != k)
    throw DimensionError("confusion: model has " + std::to_string(k) + " classes, dataset " +
                         std::to_string(data.num_classes));
  std::vector<std::size_t> predicted(data.size());
  std::vector<double> objective(data.size(), 0.0);
  parallel_for(data.size(), threads, [&](std::size_t i) {
    const auto& ex = data.examples[i];
    if (attack) {
      const auto adv = attacks::pgd_attack(params, ex, *attack, cost, i);
      objective[i] = adv.objective_value;
      predicted[i] = predict(params, adv.x_adv).predicted_class;
    } else {
      predicted[i] = predict(params, ex.input).predicted_class;
    }
  });
  ConfusionResult r{ConfusionMatrix(k), 0.0, std::nullopt};
  for (std::size_t i = 0; i < data.size(); ++i) r.matrix.add(data.examples[i].label, predicted[i]);
  r.error_percent = r.matrix.error_percent();
  if (attack) {
    double s = 0.0;
    for (double v : objective) s += v;
    r.mean_objective = s / static_cast<double>(data.size());
  }
  return r;
}

}  // namespace wpgd::metrics
