#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpgd/attacks/config.hpp"
#include "wpgd/error.hpp"

namespace wpgd::train {

enum class Mode { ce, pgd, wpgd };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::ce: return "ce";
    case Mode::pgd: return "pgd";
    case Mode::wpgd: return "wpgd";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "ce") return Mode::ce;
  if (s == "pgd") return Mode::pgd;
  if (s == "wpgd") return Mode::wpgd;
  throw ValidationError("unknown training mode '" + s + "' (expected ce, pgd or wpgd)");
}

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  // Learning rate is multiplied by lr_drop_factor from epoch
  // floor(lr_drop_at * epochs) on.
  double lr_drop_at = 0.75;
  double lr_drop_factor = 0.1;
  Mode mode = Mode::ce;
  // Inner maximisation for pgd/wpgd. For wpgd the objective is forced to
  // the Wasserstein loss.
  attacks::AttackConfig attack{.eps = 0.1, .steps = 8};
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (epochs == 0) throw ValidationError("train: epochs must be >= 1");
    if (batch_size == 0) throw ValidationError("train: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("train: learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw ValidationError("train: momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw ValidationError("train: weight_decay must be >= 0");
    if (!(lr_drop_at >= 0.0 && lr_drop_at <= 1.0))
      throw ValidationError("train: lr_drop_at must lie in [0, 1]");
    if (!(lr_drop_factor > 0.0)) throw ValidationError("train: lr_drop_factor must be > 0");
    if (mode != Mode::ce) attack.validate();
  }

  double learning_rate_at(std::size_t epoch) const {
    const auto drop = static_cast<std::size_t>(lr_drop_at * static_cast<double>(epochs));
    return epoch >= drop && drop < epochs ? learning_rate * lr_drop_factor : learning_rate;
  }
};

struct EpochStats {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double natural_error = 0.0;                     // percent, clean training inputs
  std::optional<double> adversarial_error;        // percent, inputs fed to the outer step
  double wall_seconds = 0.0;
};

struct TrainReport {
  Mode mode = Mode::ce;
  std::vector<EpochStats> epochs;
  double wall_seconds = 0.0;
};

}  // namespace wpgd::train
