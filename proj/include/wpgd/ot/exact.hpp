#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/ot/distribution.hpp"
#include "wpgd/ot/transport_plan.hpp"

namespace wpgd::ot {

namespace detail {

// Residual amounts below this are treated as exhausted.
inline constexpr double kFlowEps = 1e-15;

// Successive shortest paths on the dense bipartite network
//   S -> row i (cap q_i) -> col j (cap inf, cost M_ij) -> T (cap q'_j),
// with Dijkstra on reduced costs. Node ids: 0 = S, 1..k rows, k+1..2k cols,
// 2k+1 = T.
class MinCostTransport {
 public:
  MinCostTransport(std::span<const double> supply, std::span<const double> demand,
                   const CostMatrix& cost)
      : k_(supply.size()),
        cost_(cost),
        supply_(supply.begin(), supply.end()),
        demand_(demand.begin(), demand.end()),
        rem_supply_(supply_),
        rem_demand_(demand_),
        flow_(k_ * k_, 0.0),
        potential_(2 * k_ + 2, 0.0) {}

  TransportPlan solve() {
    while (remaining(rem_supply_) > kFlowEps && remaining(rem_demand_) > kFlowEps) {
      if (!augment()) break;
    }
    TransportPlan p{k_, flow_, 0.0};
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) p.cost += flow_[i * k_ + j] * cost_.powered(i, j);
    return p;
  }

 private:
  static double remaining(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  std::size_t row(std::size_t i) const { return 1 + i; }
  std::size_t col(std::size_t j) const { return 1 + k_ + j; }
  std::size_t sink() const { return 2 * k_ + 1; }

  bool augment() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = 2 * k_ + 2;
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> parent(n, n);
    std::vector<char> done(n, 0);
    dist[0] = 0.0;

    auto relax = [&](std::size_t u, std::size_t v, double c) {
      const double reduced = std::max(0.0, c + potential_[u] - potential_[v]);
      if (dist[u] + reduced < dist[v]) {
        dist[v] = dist[u] + reduced;
        parent[v] = u;
      }
    };

    for (;;) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && dist[v] < inf && (u == n || dist[v] < dist[u])) u = v;
      if (u == n) break;
      done[u] = 1;
      if (u == 0) {
        for (std::size_t i = 0; i < k_; ++i)
          if (rem_supply_[i] > kFlowEps) relax(0, row(i), 0.0);
      } else if (u <= k_) {
        const std::size_t i = u - 1;
        for (std::size_t j = 0; j < k_; ++j) relax(u, col(j), cost_.powered(i, j));
      } else if (u < sink()) {
        const std::size_t j = u - 1 - k_;
        if (rem_demand_[j] > kFlowEps) relax(u, sink(), 0.0);
        for (std::size_t i = 0; i < k_; ++i)
          if (flow_[i * k_ + j] > kFlowEps) relax(u, row(i), -cost_.powered(i, j));
      }
    }
    if (dist[sink()] == inf) return false;

    const double cap = dist[sink()];
    for (std::size_t v = 0; v < n; ++v) potential_[v] += std::min(dist[v], cap);

    // Bottleneck along the path.
    double amount = inf;
    for (std::size_t v = sink(); v != 0; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == 0) {
        amount = std::min(amount, rem_supply_[v - 1]);
      } else if (v == sink()) {
        amount = std::min(amount, rem_demand_[u - 1 - k_]);
      } else if (u > k_) {  // col -> row, undoing flow
        amount = std::min(amount, flow_[(v - 1) * k_ + (u - 1 - k_)]);
      }
    }
    for (std::size_t v = sink(); v != 0; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == 0) {
        rem_supply_[v - 1] -= amount;
      } else if (v == sink()) {
        rem_demand_[u - 1 - k_] -= amount;
      } else if (u <= k_) {
        flow_[(u - 1) * k_ + (v - 1 - k_)] += amount;
      } else {
        double& f = flow_[(v - 1) * k_ + (u - 1 - k_)];
        f = std::max(0.0, f - amount);
      }
    }
    return true;
  }

  std::size_t k_;
  const CostMatrix& cost_;
  std::vector<double> supply_, demand_, rem_supply_, rem_demand_;
  std::vector<double> flow_;
  std::vector<double> potential_;
};

inline void check_marginals(std::span<const double> q, std::span<const double> q2,
                            const CostMatrix& c) {
  if (q.size() != c.size() || q2.size() != c.size())
    throw DimensionError("optimal transport: marginals must have length " +
                         std::to_string(c.size()));
  validate_distribution(q, "source marginal");
  validate_distribution(q2, "target marginal");
  double s1 = 0.0, s2 = 0.0;
  for (double v : q) s1 += v;
  for (double v : q2) s2 += v;
  if (std::abs(s1 - s2) > kMarginalTolerance)
    throw ValidationError("optimal transport: marginal masses differ");
}

}  // namespace detail

/// Globally optimal plan minimising <plan, C^p> between `source` (rows) and
/// `target` (columns). The cost is W_p^p for p >= 1 and W_p for 0 < p <= 1.
inline TransportPlan exact_ot(std::span<const double> source, std::span<const double> target,
                              const CostMatrix& cost) {
  detail::check_marginals(source, target, cost);
  return detail::MinCostTransport(source, target, cost).solve();
}

}  // namespace wpgd::ot
