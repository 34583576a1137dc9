#pragma once

#include <cstddef>
#include <span>

#include "wpgd/error.hpp"
#include "wpgd/metrics/confusion.hpp"
#include "wpgd/ot/cost_matrix.hpp"

namespace wpgd::metrics {

/// Weighted robustness score sum_ij C_ij M_ij for a row-normalised
/// adversarial confusion M (k x k, row-major).
inline double robustness_score(std::span<const double> normalized, const ot::CostMatrix& c) {
  const std::size_t k = c.size();
  if (normalized.size() != k * k) throw DimensionError("robustness_score: K mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) s += c(i, j) * normalized[i * k + j];
  return s;
}

inline double robustness_score(const ConfusionMatrix& adversarial, const ot::CostMatrix& c) {
  if (adversarial.size() != c.size()) throw DimensionError("robustness_score: K mismatch");
  return robustness_score(adversarial.normalized(), c);
}

}  // namespace wpgd::metrics
