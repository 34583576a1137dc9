#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/metrics/confusion.hpp"
#include "wpgd/ot/cost_matrix.hpp"

namespace wpgd::metrics {

/// |A - B| of two row-normalised confusion matrices.
struct AccuracyGap {
  std::size_t k = 0;
  std::vector<double> values;  // k x k, row-major

  double operator()(std::size_t i, std::size_t j) const { return values[i * k + j]; }
};

inline AccuracyGap accuracy_gap(const ConfusionMatrix& robust, const ConfusionMatrix& standard) {
  if (robust.size() != standard.size()) throw DimensionError("accuracy_gap: K mismatch");
  const auto a = robust.normalized();
  const auto b = standard.normalized();
  AccuracyGap g{robust.size(), std::vector<double>(a.size())};
  for (std::size_t n = 0; n < a.size(); ++n) g.values[n] = std::abs(a[n] - b[n]);
  return g;
}

/// Pearson correlation of paired samples; nullopt when either side has zero variance.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Correlation between the off-diagonal entries of G and of the metric C.
/// nullopt when either has zero variance there.
inline std::optional<double> gap_metric_correlation(const AccuracyGap& gap, const ot::CostMatrix& c) {
  if (gap.k != c.size()) throw DimensionError("gap_metric_correlation: K mismatch");
  std::vector<double> gx, cx;
  for (std::size_t i = 0; i < gap.k; ++i)
    for (std::size_t j = 0; j < gap.k; ++j)
      if (i != j) {
        gx.push_back(gap(i, j));
        cx.push_back(c(i, j));
      }
  return pearson(gx, cx);
}

}  // namespace wpgd::metrics
