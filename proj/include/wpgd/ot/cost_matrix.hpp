#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wpgd/error.hpp"

namespace wpgd::ot {

/// Label metric C over K classes with exponent p. Entry (i, j) is the cost
/// of moving unit probability mass from class i to class j. The element-wise
/// power C^p is cached at construction.
class CostMatrix {
 public:
  CostMatrix() = default;

  /// Validates `raw` (square, finite, nonnegative, symmetric, zero diagonal)
  /// and p > 0. Errors name the first offending entry.
  static CostMatrix validate(const std::vector<std::vector<double>>& raw, double p = 1.0) {
    const std::size_t k = raw.size();
    if (k == 0) throw ValidationError("cost matrix: empty");
    if (!(p > 0.0) || !std::isfinite(p))
      throw ValidationError("cost matrix: exponent p must be positive, got " + std::to_string(p));
    CostMatrix c;
    c.k_ = k;
    c.p_ = p;
    c.raw_.resize(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      if (raw[i].size() != k)
        throw ValidationError("cost matrix: row " + std::to_string(i) + " has " +
                              std::to_string(raw[i].size()) + " entries, expected " +
                              std::to_string(k));
      for (std::size_t j = 0; j < k; ++j) c.raw_[i * k + j] = raw[i][j];
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double v = c.raw_[i * k + j];
        const std::string at = "entry [" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (!std::isfinite(v)) throw ValidationError("cost matrix: " + at + " is not finite");
        if (v < 0.0) throw ValidationError("cost matrix: " + at + " is negative");
        if (i == j && v != 0.0) throw ValidationError("cost matrix: diagonal " + at + " is nonzero");
        if (v != c.raw_[j * k + i])
          throw ValidationError("cost matrix: " + at + " differs from its transpose entry");
      }
    }
    c.powered_.resize(k * k);
    for (std::size_t n = 0; n < k * k; ++n) c.powered_[n] = std::pow(c.raw_[n], p);
    return c;
  }

  std::size_t size() const noexcept { return k_; }
  double p() const noexcept { return p_; }

  double operator()(std::size_t i, std::size_t j) const { return raw_[i * k_ + j]; }
  double powered(std::size_t i, std::size_t j) const { return powered_[i * k_ + j]; }

  std::span<const double> row(std::size_t i) const { return {raw_.data() + i * k_, k_}; }
  std::span<const double> powered_row(std::size_t i) const {
    return {powered_.data() + i * k_, k_};
  }

  /// Same metric with another exponent.
  CostMatrix with_exponent(double p) const { return validate(rows(), p); }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(k_);
    for (std::size_t i = 0; i < k_; ++i) out[i].assign(raw_.begin() + i * k_, raw_.begin() + (i + 1) * k_);
    return out;
  }

  double max_powered() const {
    double m = 0.0;
    for (double v : powered_) m = std::max(m, v);
    return m;
  }

 private:
  std::size_t k_ = 0;
  double p_ = 1.0;
  std::vector<double> raw_;
  std::vector<double> powered_;
};

}  // namespace wpgd::ot
