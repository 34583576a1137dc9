#pragma once

// Independent reference computations used by the tests. None of these call
// into the code under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wpgd/nn/mlp.hpp"
#include "wpgd/random.hpp"

namespace oracle {

/// Solves A x = b (n x n, row-major) by Gaussian elimination with partial
/// pivoting. nullopt when A is singular.
inline std::optional<std::vector<double>> solve(std::vector<double> a, std::vector<double> b,
                                                std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-12) return std::nullopt;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= a[c * n + c];
  return b;
}

/// Minimum of <plan, M> over the transportation polytope by enumerating
/// every basic solution: subsets of 2k-1 cells whose marginal equations have
/// a unique nonnegative solution. Exponential; meant for k <= 4.
inline double brute_force_ot(const std::vector<double>& q, const std::vector<double>& q2,
                             const std::vector<double>& m) {
  const std::size_t k = q.size();
  const std::size_t cells = k * k, basis = 2 * k - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(basis);
  for (std::size_t i = 0; i < basis; ++i) pick[i] = i;
  for (;;) {
    // Equations: all k row sums and the first k-1 column sums.
    std::vector<double> a(basis * basis, 0.0), b(basis, 0.0);
    for (std::size_t e = 0; e < basis; ++e) {
      for (std::size_t v = 0; v < basis; ++v) {
        const std::size_t i = pick[v] / k, j = pick[v] % k;
        if (e < k ? i == e : j == e - k) a[e * basis + v] = 1.0;
      }
      b[e] = e < k ? q[e] : q2[e - k];
    }
    if (auto x = solve(a, b, basis)) {
      bool ok = true;
      double cost = 0.0;
      for (std::size_t v = 0; v < basis; ++v) {
        if ((*x)[v] < -1e-12) ok = false;
        cost += std::max(0.0, (*x)[v]) * m[pick[v]];
      }
      if (ok) best = std::min(best, cost);
    }
    // Next combination.
    std::size_t i = basis;
    while (i > 0 && pick[i - 1] == cells - basis + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < basis; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

/// Random point of the probability simplex, optionally with some exact zeros.
inline std::vector<double> random_simplex(wpgd::Rng& rng, std::size_t k, bool allow_zeros = false) {
  std::vector<double> q(k);
  double s = 0.0;
  for (double& v : q) {
    v = -std::log(1.0 - wpgd::uniform01(rng));
    if (allow_zeros && wpgd::uniform01(rng) < 0.25) v = 0.0;
    s += v;
  }
  if (s == 0.0) {
    q[0] = 1.0;
    return q;
  }
  for (double& v : q) v /= s;
  return q;
}

/// Random symmetric zero-diagonal matrix with entries in (0, scale].
inline std::vector<std::vector<double>> random_metric(wpgd::Rng& rng, std::size_t k,
                                                      double scale = 10.0) {
  std::vector<std::vector<double>> c(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) c[i][j] = c[j][i] = scale * (0.05 + wpgd::uniform01(rng));
  return c;
}

/// Plain softmax, written independently of the library.
inline std::vector<double> softmax(const std::vector<double>& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - mx));
  for (double& v : p) v /= s;
  return p;
}

/// Naive forward pass over MlpParams' documented layout.
inline std::vector<double> logits(const wpgd::MlpParams& p, const std::vector<double>& x) {
  std::vector<double> cur = x;
  const auto& w = p.spec().layer_widths;
  const auto flat = p.flat();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const std::size_t in = w[l], out = w[l + 1];
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = flat[off + out * in + o];
      for (std::size_t i = 0; i < in; ++i) s += flat[off + o * in + i] * cur[i];
      z[o] = s;
    }
    off += out * (in + 1);
    if (l + 2 < w.size())
      for (double& v : z)
        v = p.spec().activation == wpgd::Activation::relu ? std::max(0.0, v) : std::tanh(v);
    cur = std::move(z);
  }
  return cur;
}

/// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero pairs from
/// dominating.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
