#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "wpgd/nn/tensor.hpp"

namespace wpgd::attacks {

/// Component-wise clip into [center - eps, center + eps] and then [lo, hi].
inline Tensor project_linf(const Tensor& candidate, const Tensor& center, double eps, double lo,
                           double hi) {
  require_same_shape(candidate, center, "project_linf");
  Tensor out = candidate;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = center[i];
    out[i] = std::clamp(std::clamp(out[i], c - eps, c + eps), lo, hi);
  }
  return out;
}

/// Radial projection of the offset onto the l2 ball, then a clamp to
/// [lo, hi]. The clamp is applied once; there is no alternating refinement.
inline Tensor project_l2(const Tensor& candidate, const Tensor& center, double eps, double lo,
                         double hi) {
  require_same_shape(candidate, center, "project_l2");
  Tensor out = candidate;
  double sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out[i] - center[i];
    sq += d * d;
  }
  const double norm = std::sqrt(sq);
  if (norm > eps) {
    const double scale = eps / norm;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = center[i] + (out[i] - center[i]) * scale;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo, hi);
  return out;
}

inline double linf_distance(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "linf_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2_distance(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace wpgd::attacks
