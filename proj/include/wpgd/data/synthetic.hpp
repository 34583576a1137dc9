#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"
#include "wpgd/random.hpp"

namespace wpgd::data {

/// Isotropic Gaussian blobs in the plane, one per class.
struct SyntheticDataSpec {
  std::vector<std::array<double, 2>> centers;
  double sigma = 0.15;
  std::size_t samples_per_class = 500;
  std::uint64_t seed = 0;

  /// Three classes on the vertices of a unit equilateral triangle.
  static SyntheticDataSpec three_class(std::uint64_t seed = 0) {
    SyntheticDataSpec s;
    s.centers = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
    s.seed = seed;
    return s;
  }

  void validate() const {
    if (centers.size() < 2) throw ValidationError("synthetic: need at least two classes");
    if (!(sigma > 0.0)) throw ValidationError("synthetic: sigma must be positive");
    if (samples_per_class == 0) throw ValidationError("synthetic: samples_per_class must be >= 1");
  }
};

/// Class-major sample order: all of class 0, then class 1, and so on.
inline Dataset gen_synthetic(const SyntheticDataSpec& spec) {
  spec.validate();
  Dataset d;
  d.num_classes = spec.centers.size();
  d.input_dim = 2;
  d.provenance = Provenance::synthetic;
  d.examples.reserve(d.num_classes * spec.samples_per_class);
  for (std::size_t c = 0; c < d.num_classes; ++c) {
    Rng rng = make_rng(spec.seed, c);
    for (std::size_t n = 0; n < spec.samples_per_class; ++n) {
      const double x = spec.centers[c][0] + spec.sigma * standard_normal(rng);
      const double y = spec.centers[c][1] + spec.sigma * standard_normal(rng);
      d.examples.push_back({Tensor::vector({x, y}), c});
    }
  }
  return d;
}

}  // namespace wpgd::data
