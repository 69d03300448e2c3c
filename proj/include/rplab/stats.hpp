// rp-lab: reduction and estimation helpers shared by every module.
//
// All Monte Carlo reductions go through pairwise summation with a fixed tree
// shape, so a result depends only on the value sequence, never on worker
// scheduling; this is what makes byte-identical reruns possible.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rplab/rng.hpp"

namespace rplab {

// Pairwise (cascade) summation over a fixed binary tree.  O(log n) rounding
// depth and a deterministic association order.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double var = 0.0;       // unbiased sample variance
  double std_error = 0.0; // of the mean
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  s.mean = pairwise_sum(xs) / static_cast<double>(s.n);
  if (s.n >= 2) {
    std::vector<double> sq(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
      const double d = xs[i] - s.mean;
      sq[i] = d * d;
    }
    s.var = pairwise_sum(sq) / static_cast<double>(s.n - 1);
    s.std_error = std::sqrt(s.var / static_cast<double>(s.n));
  }
  return s;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0; // from residual variance (n-2 dof)
};

// Ordinary least squares y = a + b x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    throw std::invalid_argument("fit_line: need matching vectors, n >= 2");
  double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

// Nonparametric bootstrap standard error of the mean of `xs` (resampling with
// replacement); used for environment-level uncertainty where per-environment
// values are themselves noisy estimates.
inline double bootstrap_se(std::span<const double> xs, int n_resamples,
                           CounterRng rng) {
  const std::size_t n = xs.size();
  if (n < 2 || n_resamples < 2) return 0.0;
  std::vector<double> means(n_resamples);
  std::vector<double> draw(n);
  for (int b = 0; b < n_resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i)
      draw[i] = xs[rng.next_u64() % n];
    means[b] = pairwise_sum(draw) / static_cast<double>(n);
  }
  return std::sqrt(summarize(means).var);
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double t = (en + 0.12 + 0.11 / en) * d;
  // Kolmogorov tail series.
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * t * t);
    p += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Concave + non-decreasing projection on a grid.
//
// Values v_i at strictly increasing abscissae t_i are projected (least
// squares) onto the cone of concave sequences by the pool-adjacent-violators
// algorithm applied to difference quotients (weights = interval lengths);
// non-negativity of slopes (monotonicity) is enforced by a final clamp, which
// preserves concavity.  Used to regularize estimated Lyapunov curves before
// Legendre-type optimization.
// ---------------------------------------------------------------------------
struct ConcaveFit {
  std::vector<double> values;    // projected values on the same grid
  double projection_distance = 0.0; // max |projected - raw|
};

inline ConcaveFit concave_increasing_projection(std::span<const double> t,
                                                std::span<const double> v,
                                                bool enforce_increasing = true) {
  const std::size_t n = t.size();
  if (v.size() != n || n < 2)
    throw std::invalid_argument("concave projection: need n >= 2 grids");
  // Difference quotients with interval weights.
  std::vector<double> slope(n - 1), w(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] = t[i + 1] - t[i];
    if (w[i] <= 0.0)
      throw std::invalid_argument("concave projection: grid not increasing");
    slope[i] = (v[i + 1] - v[i]) / w[i];
  }
  // PAVA for a non-increasing slope sequence (concavity).
  struct Block {
    double value, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    blocks.push_back({slope[i], w[i], 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].value < blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.count += b.count;
    }
  }
  std::vector<double> fitted_slope;
  fitted_slope.reserve(n - 1);
  for (const Block& b : blocks)
    for (std::size_t k = 0; k < b.count; ++k) fitted_slope.push_back(b.value);
  if (enforce_increasing)
    for (double& s : fitted_slope) s = std::max(s, 0.0);

  // Rebuild values anchored so that the (weighted) mean shift is zero.
  ConcaveFit out;
  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    out.values[i + 1] = out.values[i] + fitted_slope[i] * w[i];
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) shift += v[i] - out.values[i];
  shift /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] += shift;
    out.projection_distance =
        std::max(out.projection_distance, std::fabs(out.values[i] - v[i]));
  }
  return out;
}

}  // namespace rplab
