#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/ot/distribution.hpp"
#include "wpgd/parallel.hpp"

namespace wpgd::metrics {

inline constexpr std::size_t kEntropyBins = 30;

struct EntropyStats {
  std::vector<double> per_example;
  std::vector<std::size_t> histogram;  // kEntropyBins equal bins over [0, ln K]
  double bin_width = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

/// Prediction entropy per example and its summary.
inline EntropyStats entropy_stats(const MlpParams& params, const data::Dataset& data,
                                  unsigned threads = 1) {
  if (data.empty()) throw ValidationError("entropy_stats: dataset is empty");
  EntropyStats s;
  s.per_example.resize(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    s.per_example[i] = ot::entropy_unchecked(predict(params, data.examples[i].input).probs);
  });
  const double hmax = std::log(static_cast<double>(params.spec().num_classes()));
  s.bin_width = hmax / static_cast<double>(kEntropyBins);
  s.histogram.assign(kEntropyBins, 0);
  double sum = 0.0;
  for (double h : s.per_example) {
    sum += h;
    auto bin = s.bin_width > 0.0 ? static_cast<std::size_t>(h / s.bin_width) : 0;
    ++s.histogram[std::min(bin, kEntropyBins - 1)];
  }
  s.mean = sum / static_cast<double>(data.size());
  std::vector<double> sorted = s.per_example;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

}  // namespace wpgd::metrics
