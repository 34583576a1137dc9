#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/ot/distribution.hpp"
#include "wpgd/ot/exact.hpp"
#include "wpgd/ot/transport_plan.hpp"

namespace wpgd::ot {

struct SinkhornConfig {
  double lambda = 100.0;
  std::size_t max_iters = 10000;
  double tolerance = 1e-9;  // l1 marginal violation

  void validate() const {
    if (!(lambda > 0.0)) throw ValidationError("sinkhorn: lambda must be positive");
    if (max_iters == 0) throw ValidationError("sinkhorn: max_iters must be positive");
    if (!(tolerance > 0.0)) throw ValidationError("sinkhorn: tolerance must be positive");
  }
};

struct SinkhornResult {
  TransportPlan plan;              // plan.cost is the transport term <plan, C^p>
  double regularized_cost = 0.0;   // <plan, C^p> - H(plan) / lambda
  std::size_t iterations = 0;
  double marginal_violation = 0.0;  // max of row and column l1 violations
  bool converged = false;
  bool log_domain = false;
};

namespace detail {

// Kernel scaling is used while lambda * max(C^p) stays below this; above it
// the iteration runs on log-potentials.
inline constexpr double kLogDomainThreshold = 30.0;

inline double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

struct Support {
  std::vector<std::size_t> rows, cols;
};

inline double violation(const std::vector<double>& plan, std::size_t k,
                        std::span<const double> q, std::span<const double> q2) {
  double rv = 0.0, cv = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += plan[i * k + j];
    rv += std::abs(s - q[i]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += plan[i * k + j];
    cv += std::abs(s - q2[j]);
  }
  return std::max(rv, cv);
}

// Log-domain iteration on potentials f (rows) and g (cols) over the support:
// plan_ij = exp(lambda * (f_i + g_j - M_ij)).
inline void run_log_domain(std::span<const double> q, std::span<const double> q2,
                           const CostMatrix& c, double lambda, const Support& s,
                           std::size_t max_iters, double tol, std::vector<double>& f,
                           std::vector<double>& g, std::vector<double>& plan,
                           std::size_t& iters, double& viol) {
  const std::size_t k = c.size();
  std::vector<double> buf;
  auto fill_plan = [&] {
    std::fill(plan.begin(), plan.end(), 0.0);
    for (std::size_t i : s.rows)
      for (std::size_t j : s.cols) plan[i * k + j] = std::exp(lambda * (f[i] + g[j] - c.powered(i, j)));
  };
  for (std::size_t it = 0; it < max_iters; ++it) {
    for (std::size_t i : s.rows) {
      buf.clear();
      for (std::size_t j : s.cols) buf.push_back(lambda * (g[j] - c.powered(i, j)));
      f[i] = (std::log(q[i]) - log_sum_exp(buf)) / lambda;
    }
    for (std::size_t j : s.cols) {
      buf.clear();
      for (std::size_t i : s.rows) buf.push_back(lambda * (f[i] - c.powered(i, j)));
      g[j] = (std::log(q2[j]) - log_sum_exp(buf)) / lambda;
    }
    // f + c, g - c give the same plan. Pin the gauge so the potentials stay
    // small; small-lambda stages would otherwise leave them near 1/lambda
    // and cost absolute precision later.
    const double shift = g[s.cols.front()];
    for (std::size_t j : s.cols) g[j] -= shift;
    for (std::size_t i : s.rows) f[i] += shift;
    ++iters;
    fill_plan();
    viol = violation(plan, k, q, q2);
    if (viol < tol) return;
  }
}

}  // namespace detail

/// Entropy-regularised transport by Sinkhorn-Knopp scaling of the kernel
/// exp(-lambda * C^p). Zero-mass rows and columns are removed from the
/// support. Non-convergence is reported through `converged`, not thrown.
inline SinkhornResult sinkhorn(std::span<const double> source, std::span<const double> target,
                               const CostMatrix& cost, const SinkhornConfig& cfg = {}) {
  cfg.validate();
  detail::check_marginals(source, target, cost);
  const std::size_t k = cost.size();

  detail::Support sup;
  for (std::size_t i = 0; i < k; ++i) {
    if (source[i] > 0.0) sup.rows.push_back(i);
    if (target[i] > 0.0) sup.cols.push_back(i);
  }

  SinkhornResult r;
  r.plan.k = k;
  r.plan.plan.assign(k * k, 0.0);
  const double lambda = cfg.lambda;
  r.log_domain = lambda * cost.max_powered() > detail::kLogDomainThreshold;

  if (!r.log_domain) {
    std::vector<double> kernel(k * k, 0.0), u(k, 0.0), v(k, 0.0);
    for (std::size_t i : sup.rows)
      for (std::size_t j : sup.cols) kernel[i * k + j] = std::exp(-lambda * cost.powered(i, j));
    for (std::size_t j : sup.cols) v[j] = 1.0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
      for (std::size_t i : sup.rows) {
        double s = 0.0;
        for (std::size_t j : sup.cols) s += kernel[i * k + j] * v[j];
        u[i] = source[i] / s;
      }
      for (std::size_t j : sup.cols) {
        double s = 0.0;
        for (std::size_t i : sup.rows) s += kernel[i * k + j] * u[i];
        v[j] = target[j] / s;
      }
      ++r.iterations;
      for (std::size_t i : sup.rows)
        for (std::size_t j : sup.cols) r.plan.plan[i * k + j] = u[i] * kernel[i * k + j] * v[j];
      r.marginal_violation = detail::violation(r.plan.plan, k, source, target);
      if (r.marginal_violation < cfg.tolerance) break;
    }
  } else {
    // Warm-start through a geometric lambda schedule, then iterate at the
    // requested lambda. Only the final stage counts towards convergence.
    std::vector<double> f(k, 0.0), g(k, 0.0);
    const double start = detail::kLogDomainThreshold / std::max(cost.max_powered(), 1e-300);
    std::size_t warm_iters = 0;
    double warm_viol = 0.0;
    for (double stage = start; stage < lambda; stage *= 4.0) {
      detail::run_log_domain(source, target, cost, stage, sup, cfg.max_iters, 1e-6, f, g,
                             r.plan.plan, warm_iters, warm_viol);
    }
    detail::run_log_domain(source, target, cost, lambda, sup, cfg.max_iters, cfg.tolerance, f, g,
                           r.plan.plan, r.iterations, r.marginal_violation);
  }

  r.converged = r.marginal_violation < cfg.tolerance;
  r.plan.cost = 0.0;
  for (std::size_t n = 0; n < k * k; ++n)
    r.plan.cost += r.plan.plan[n] * cost.powered(n / k, n % k);
  r.regularized_cost = r.plan.cost - entropy_unchecked(r.plan.plan) / lambda;
  return r;
}

}  // namespace wpgd::ot
