#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace wpgd::ot {

/// Coupling between a source marginal (rows) and a target marginal (columns).
struct TransportPlan {
  std::size_t k = 0;
  std::vector<double> plan;  // k x k, row-major
  double cost = 0.0;         // <plan, C^p>

  double operator()(std::size_t i, std::size_t j) const { return plan[i * k + j]; }

  std::vector<double> row_sums() const {
    std::vector<double> r(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) r[i] += plan[i * k + j];
    return r;
  }

  std::vector<double> col_sums() const {
    std::vector<double> c(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) c[j] += plan[i * k + j];
    return c;
  }
};

}  // namespace wpgd::ot
