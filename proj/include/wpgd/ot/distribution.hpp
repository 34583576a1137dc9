#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "wpgd/error.hpp"

namespace wpgd::ot {

inline constexpr double kMarginalTolerance = 1e-9;

/// Throws unless q is nonnegative, finite and sums to 1 within 1e-9.
inline void validate_distribution(std::span<const double> q, const char* what = "distribution") {
  if (q.empty()) throw ValidationError(std::string(what) + ": empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q[i]) || q[i] < 0.0)
      throw ValidationError(std::string(what) + ": entry " + std::to_string(i) +
                            " is negative or not finite");
    sum += q[i];
  }
  if (std::abs(sum - 1.0) > kMarginalTolerance)
    throw ValidationError(std::string(what) + ": sums to " + std::to_string(sum) + ", not 1");
}

/// -sum q ln q with 0 ln 0 = 0, no validation.
inline double entropy_unchecked(std::span<const double> q) noexcept {
  double h = 0.0;
  for (double v : q)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

/// Shannon entropy in nats of a validated probability vector.
inline double entropy(std::span<const double> q) {
  validate_distribution(q, "entropy");
  return entropy_unchecked(q);
}

}  // namespace wpgd::ot
