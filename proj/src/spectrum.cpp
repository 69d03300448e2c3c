// rp-lab: finite-difference eigensolver implementation.

#include "rplab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rplab/parallel.hpp"
#include "rplab/stats.hpp"

namespace rplab {

namespace {

// Dense-box linear index of the node with per-axis offsets m[k] in
// [-half_span, half_span].
inline long box_index(const int* m, int half_span, int d) {
  const long side = 2L * half_span + 1;
  long idx = 0;
  for (int k = d - 1; k >= 0; --k) idx = idx * side + (m[k] + half_span);
  return idx;
}

}  // namespace

std::string GridProblem::validate_message() const {
  if (dimension < 1 || dimension > 3) return "dimension must be 1, 2 or 3";
  if (R <= 0.0) return "R must be > 0";
  if (h <= 0.0) return "h must be > 0";
  if (h > R / 16.0 + 1e-12) return "grid spacing must satisfy h <= R/16";
  for (double v : V)
    if (!(v >= 0.0) || !std::isfinite(v))
      return "potential samples must be finite and >= 0";
  return "";
}

GridProblem GridProblem::build(
    int dimension, double R, double h,
    const std::function<double(const Vec&)>& potential) {
  GridProblem p;
  p.dimension = dimension;
  p.R = R;
  p.h = h;
  // Parameters must be checked before sizing the dense box: the index walk
  // below assumes d <= 3 and the box grows as (2R/h)^d.
  const std::string pre = p.validate_message();
  if (!pre.empty()) throw std::invalid_argument("GridProblem: " + pre);
  p.half_span = static_cast<int>(std::floor((R - 1e-12) / h));
  const int d = dimension;
  const int hs = p.half_span;
  const long side = 2L * hs + 1;
  long box = 1;
  for (int k = 0; k < d; ++k) box *= side;
  p.packed.assign(box, -1);

  const double R2 = R * R;
  int m[3] = {-hs, d >= 2 ? -hs : 0, d >= 3 ? -hs : 0};
  const int lo[3] = {-hs, d >= 2 ? -hs : 0, d >= 3 ? -hs : 0};
  const int hi[3] = {hs, d >= 2 ? hs : 0, d >= 3 ? hs : 0};
  for (;;) {
    double r2 = 0.0;
    Vec x = vec0();
    for (int k = 0; k < d; ++k) {
      x[k] = m[k] * h;
      r2 += x[k] * x[k];
    }
    if (r2 < R2 - 1e-12) {
      p.packed[box_index(m, hs, d)] = static_cast<std::int32_t>(p.n_nodes++);
      p.node_position.push_back(x);
    }
    int k = 0;
    while (k < d && ++m[k] > hi[k]) {
      m[k] = lo[k];
      ++k;
    }
    if (k == d) break;
  }

  p.V.resize(p.n_nodes);
  for (long i = 0; i < p.n_nodes; ++i) p.V[i] = potential(p.node_position[i]);
  const std::string msg = p.validate_message();
  if (!msg.empty()) throw std::invalid_argument("GridProblem: " + msg);
  return p;
}

void GridProblem::apply(std::span<const double> x, std::span<double> y) const {
  const int d = dimension;
  const int hs = half_span;
  const long side = 2L * hs + 1;
  long stride[3] = {1, side, side * side};
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const double diag = 2.0 * d * inv2h2;

  // Walk the dense box in packed order (packed indices are assigned in the
  // same lexicographic sweep used by build).
  long cell = 0;
  int m[3] = {-hs, d >= 2 ? -hs : 0, d >= 3 ? -hs : 0};
  const int lo[3] = {-hs, d >= 2 ? -hs : 0, d >= 3 ? -hs : 0};
  const int hi[3] = {hs, d >= 2 ? hs : 0, d >= 3 ? hs : 0};
  for (;;) {
    const std::int32_t i = packed[cell];
    if (i >= 0) {
      double nb = 0.0;
      for (int k = 0; k < d; ++k) {
        if (m[k] > lo[k]) {
          const std::int32_t j = packed[cell - stride[k]];
          if (j >= 0) nb += x[j];
        }
        if (m[k] < hi[k]) {
          const std::int32_t j = packed[cell + stride[k]];
          if (j >= 0) nb += x[j];
        }
      }
      y[i] = (diag + V[i]) * x[i] - inv2h2 * nb;
    }
    int k = 0;
    while (k < d && ++m[k] > hi[k]) {
      m[k] = lo[k];
      ++k;
    }
    ++cell;
    if (k == d) break;
  }
}

namespace {

double dot_v(std::span<const double> a, std::span<const double> b) {
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return pairwise_sum(prod);
}

double norm_v(std::span<const double> a) { return std::sqrt(dot_v(a, a)); }

// Jacobi-preconditioned CG for (A - sigma I) w = b.  Returns false when a
// direction of non-positive curvature shows up (sigma not below the spectrum).
bool cg_solve(const GridProblem& A, double sigma, std::span<const double> b,
              std::span<double> w, double rel_tol, long max_iter) {
  const long n = A.n_nodes;
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), Ap(n);
  std::fill(w.begin(), w.end(), 0.0);

  std::vector<double> inv_diag(n);
  const double diag0 = A.dimension / (A.h * A.h);
  for (long i = 0; i < n; ++i) inv_diag[i] = 1.0 / (diag0 + A.V[i] - sigma);

  for (long i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot_v(r, z);
  const double b_norm = norm_v(b);
  if (b_norm == 0.0) return true;

  for (long it = 0; it < max_iter; ++it) {
    A.apply(p, Ap);
    for (long i = 0; i < n; ++i) Ap[i] -= sigma * p[i];
    const double pAp = dot_v(p, Ap);
    if (!(pAp > 0.0)) return false;
    const double alpha = rz / pAp;
    for (long i = 0; i < n; ++i) {
      w[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (norm_v(r) <= rel_tol * b_norm) return true;
    for (long i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot_v(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (long i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return true;  // hand whatever we have back to the outer iteration
}

}  // namespace

EigenResult principal_eigenvalue(const GridProblem& problem, double tol,
                                 int max_outer) {
  const std::string msg = problem.validate_message();
  if (!msg.empty()) throw std::invalid_argument("principal_eigenvalue: " + msg);
  const long n = problem.n_nodes;
  if (n == 0) throw std::invalid_argument("principal_eigenvalue: empty grid");

  // Positive initial guess: product-of-cosines bump, the Dirichlet ground
  // state of the enclosing box.
  std::vector<double> v(n), Av(n), w(n);
  for (long i = 0; i < n; ++i) {
    double g = 1.0;
    for (int k = 0; k < problem.dimension; ++k)
      g *= std::cos(0.5 * M_PI * problem.node_position[i][k] / problem.R);
    v[i] = g;
  }
  {
    const double nv = norm_v(v);
    for (double& x : v) x /= nv;
  }

  EigenResult res;
  double sigma = 0.0;
  double rho = 0.0, rnorm = 0.0;
  double inner_tol = 1e-4;
  for (int outer = 1; outer <= max_outer; ++outer) {
    res.iterations = outer;
    if (!cg_solve(problem, sigma, v, w, inner_tol, 20 * n + 200)) {
      sigma = 0.5 * sigma;  // overshot the spectrum; retreat toward zero
      continue;
    }
    const double nw = norm_v(w);
    if (!(nw > 0.0) || !std::isfinite(nw))
      throw std::runtime_error("principal_eigenvalue: inner solve degenerated");
    for (long i = 0; i < n; ++i) v[i] = w[i] / nw;
    problem.apply(v, Av);
    rho = dot_v(v, Av);
    for (long i = 0; i < n; ++i) Av[i] -= rho * v[i];
    rnorm = norm_v(Av);
    if (rnorm <= tol) break;
    // Shift toward rho once the residual certifies a nearby eigenvalue, but
    // keep a fixed relative gap: the inner CG then stays well conditioned at
    // every outer step, and the Rayleigh quotient still converges fast
    // because its error is quadratic in the eigenvector error.
    if (rnorm < 0.05 * rho)
      sigma = std::max(0.0, rho - std::max(3.0 * rnorm, 0.05 * rho));
    // The inner solves only need to out-resolve the current eigen-residual.
    inner_tol = std::max(1e-12, std::min(1e-4, 0.01 * rnorm));
  }
  if (rnorm > tol * 100.0)
    throw std::runtime_error(
        "principal_eigenvalue: no convergence (residual " +
        std::to_string(rnorm) + ")");

  // Perron normalization: dominant sign positive, entries nonnegative.
  double vmax = 0.0, vmin = 0.0;
  for (double x : v) {
    vmax = std::max(vmax, x);
    vmin = std::min(vmin, x);
  }
  if (-vmin > vmax) {
    for (double& x : v) x = -x;
    std::swap(vmax, vmin);
    vmax = -vmax;
    vmin = -vmin;
  }
  res.perron_ok = vmin >= -1e-8 * vmax;
  res.lambda = rho;
  res.residual = rnorm;
  res.eigenvector = std::move(v);
  return res;
}

LambdaVReport lambda_V_limit(const PotentialSpec& spec,
                             std::span<const double> R_grid,
                             std::span<const std::uint64_t> seeds, double h,
                             int workers) {
  spec.validate();
  if (R_grid.size() < 3)
    throw std::invalid_argument("lambda_V_limit: need >= 3 radii");
  for (std::size_t i = 0; i + 1 < R_grid.size(); ++i)
    if (R_grid[i] >= R_grid[i + 1])
      throw std::invalid_argument("lambda_V_limit: R grid must increase");
  if (seeds.empty())
    throw std::invalid_argument("lambda_V_limit: need >= 1 seed");

  const double R_max = R_grid.back();
  const bool deterministic =
      spec.family == Family::Zero || spec.family == Family::Constant;

  LambdaVReport report;
  report.per_env.resize(seeds.size());

  parallel_cells(seeds.size(), workers, [&](std::size_t e) {
    LambdaVSequence seq;
    seq.env_seed = seeds[e];
    PointCloud cloud = deterministic
                           ? PointCloud::empty(spec, R_max)
                           : sample_cloud(spec, R_max, seeds[e]);
    const PotentialField field(spec, cloud);
    for (double R : R_grid) {
      const GridProblem problem = GridProblem::build(
          spec.dimension, R, h, [&](const Vec& x) { return field(x); });
      const EigenResult r = principal_eigenvalue(problem);
      seq.points.push_back({R, r.lambda, r.residual, r.iterations});
    }
    for (std::size_t i = 0; i + 1 < seq.points.size(); ++i) {
      const double slack = 2.0 * (seq.points[i].residual +
                                  seq.points[i + 1].residual) +
                           1e-9;
      if (seq.points[i + 1].lambda_hat > seq.points[i].lambda_hat + slack)
        seq.non_increasing = false;
    }
    report.per_env[e] = std::move(seq);
  });

  report.mean_by_R.assign(R_grid.size(), 0.0);
  for (std::size_t k = 0; k < R_grid.size(); ++k) {
    std::vector<double> vals;
    vals.reserve(seeds.size());
    for (const auto& seq : report.per_env)
      vals.push_back(seq.points[k].lambda_hat);
    report.mean_by_R[k] = pairwise_sum(vals) / vals.size();
  }
  report.limit_last = report.mean_by_R.back();
  {
    std::vector<double> last;
    for (const auto& seq : report.per_env)
      last.push_back(seq.points.back().lambda_hat);
    const auto [mn, mx] = std::minmax_element(last.begin(), last.end());
    report.spread_last = *mx - *mn;
  }
  // Guarded Aitken extrapolation of the (convergent-from-above) mean
  // sequence; falls back to the last value when the differences misbehave.
  report.limit_extrapolated = report.limit_last;
  const std::size_t K = report.mean_by_R.size();
  const double d1 = report.mean_by_R[K - 2] - report.mean_by_R[K - 3];
  const double d2 = report.mean_by_R[K - 1] - report.mean_by_R[K - 2];
  const double denom = d2 - d1;
  if (d1 < 0.0 && d2 < 0.0 && denom > 1e-15) {
    const double extrap = report.mean_by_R[K - 1] - d2 * d2 / denom;
    if (extrap <= report.limit_last && extrap >= 0.0)
      report.limit_extrapolated = extrap;
  }
  return report;
}

}  // namespace rplab
