// rp-lab: Monte Carlo estimators of the quenched functionals.
//
//   survival      S_t     = E_0[ exp(-int_0^t V) ]
//   e_lambda      e_l(0,x)= E_0[ exp(-int_0^H (l + V)), H < infty ],
//                 H the hitting time of the closed unit ball at x;
//                 a(0,x) := -log e_l(0,x)
//   metric_d      d(x,y)  = max( sup_{z in B(x)} a(z,y),
//                                sup_{w in B(y)} a(x,w) )
//   green         G(x, A) = E_x[ int_0^inf 1_A(Z_t) exp(-int_0^t (V+l0)) dt ]
//
// All estimators are templated on the potential callable, consume counter-based
// substreams (one per path), and reduce with fixed-tree pairwise sums, so the
// result for a given (seed, parameters) is a pure function independent of
// scheduling.
//
// Rare-event runs use Girsanov tilting: simulate with a constant drift toward
// the target and multiply each path weight by exp(girsanov_log_weight); the
// default tilt magnitude sqrt(2(lambda + mean segment potential)) matches the
// exponential decay rate of the target functional, which keeps per-hit weights
// nearly constant.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/paths.hpp"
#include "rplab/rng.hpp"
#include "rplab/stats.hpp"

namespace rplab {

struct FunctionalEstimate {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  double std_error = 0.0;
  long n_paths = 0;
  Vec tilt_drift = vec0();
  std::uint64_t environment_seed = 0;

  long n_hits = 0;                 // paths contributing a positive weight
  long n_window_violations = 0;    // paths stopped by the window guard
  bool upper_bound_only = false;   // no hits: log_value is a one-sided bound
  double neglected_mass_bound = 0; // exp(-lambda * t_max) censoring bound

  // -log of the estimate, clamped into [0, inf); the natural scale for the
  // metric and Lyapunov quantities (the functional never exceeds 1, estimates
  // may by noise).
  double a_hat() const { return std::max(0.0, -std::min(0.0, log_value)); }
};

// ---------------------------------------------------------------------------
// Survival curve.
// ---------------------------------------------------------------------------

// Per-path Feynman-Kac weights exp(-int_0^t V) snapshotted at each grid time;
// one trajectory serves the whole grid (common random numbers, so the curve
// is monotone path by path).  A window violation freezes the accumulated
// integral from the violation time on and is counted, never hidden.
template <class PotentialFn>
std::vector<FunctionalEstimate> survival_curve(const PathConfig& config,
                                               PotentialFn&& V,
                                               std::span<const double> t_grid,
                                               long n_paths, CounterRng env_rng,
                                               double window_radius = 0.0) {
  if (t_grid.empty()) throw std::invalid_argument("survival_curve: empty grid");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (t_grid[i] >= t_grid[i + 1])
      throw std::invalid_argument("survival_curve: grid must increase");
  if (t_grid.front() <= 0.0)
    throw std::invalid_argument("survival_curve: grid times must be > 0");
  if (t_grid.back() > config.t_max + 1e-12)
    throw std::invalid_argument("survival_curve: grid exceeds t_max");

  const int d = config.dimension;
  const std::size_t n_t = t_grid.size();
  std::vector<std::vector<double>> weights(n_t,
                                           std::vector<double>(n_paths, 0.0));
  long violations = 0;

  for (long p = 0; p < n_paths; ++p) {
    CounterRng rng =
        env_rng.child({stream_tag::kPath, static_cast<std::uint64_t>(p)});
    Vec z = vec0();
    double t = 0.0, integral = 0.0;
    double v0 = V(z);
    bool violated = false;
    for (std::size_t g = 0; g < n_t; ++g) {
      while (t < t_grid[g] - 1e-12 && !violated) {
        const double dt_s = std::min(config.dt, t_grid[g] - t);
        const double sdt = std::sqrt(dt_s);
        Vec znew = z;
        for (int k = 0; k < d; ++k)
          znew[k] += config.drift[k] * dt_s + sdt * rng.next_normal();
        if (window_radius > 0.0 && norm(znew) > window_radius) {
          violated = true;
          ++violations;
          break;
        }
        const double v1 = V(znew);
        integral += 0.5 * (v0 + v1) * dt_s;
        t += dt_s;
        z = znew;
        v0 = v1;
      }
      weights[g][p] = std::exp(-integral);
    }
  }

  std::vector<FunctionalEstimate> out(n_t);
  for (std::size_t g = 0; g < n_t; ++g) {
    const Summary s = summarize(weights[g]);
    out[g].value = s.mean;
    out[g].log_value = s.mean > 0.0
                           ? std::log(s.mean)
                           : -std::numeric_limits<double>::infinity();
    out[g].std_error = s.std_error;
    out[g].n_paths = n_paths;
    out[g].n_hits = n_paths;
    out[g].n_window_violations = violations;
    out[g].tilt_drift = config.drift;
  }
  return out;
}

struct DecayRate {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};

// Least-squares slope of -log S_t versus t.  The grid must hold >= 4 points;
// a non-positive survival estimate anywhere on the grid signals that n_paths
// was insufficient for the horizon and aborts rather than fitting garbage.
inline DecayRate decay_rate_fit(std::span<const double> t_grid,
                                std::span<const FunctionalEstimate> curve) {
  if (t_grid.size() < 4)
    throw std::invalid_argument("decay_rate: need >= 4 grid points");
  std::vector<double> x(t_grid.begin(), t_grid.end()), y(t_grid.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i].value > 0.0))
      throw std::runtime_error(
          "decay_rate: non-positive survival estimate (insufficient n_paths)");
    y[i] = -curve[i].log_value;
  }
  const LineFit f = fit_line(x, y);
  return {f.slope, f.slope_se, f.intercept};
}

// ---------------------------------------------------------------------------
// Hitting functional e_lambda.
// ---------------------------------------------------------------------------

struct HitTarget {
  Vec center = vec0();
  double radius = 1.0;
};

// Mean potential along the straight segment from start to the target center,
// probed at a few interior points; used only to choose the tilt magnitude
// (any tilt is unbiased, this one approximately minimizes variance).
template <class PotentialFn>
double segment_mean_potential(PotentialFn&& V, const Vec& start,
                              const Vec& target, int n_probe = 16) {
  double s = 0.0;
  for (int i = 0; i < n_probe; ++i) {
    const double f = (i + 0.5) / n_probe;
    s += V(add(start, scale(sub(target, start), f)));
  }
  return s / n_probe;
}

// Default tilt drift for a hitting run: direction start -> target, magnitude
// sqrt(2 lambda) floored at sqrt(2 (lambda + segment mean potential)).
template <class PotentialFn>
Vec suggested_tilt(PotentialFn&& V, const Vec& start, const Vec& target,
                   double lambda) {
  const Vec u = unit(sub(target, start));
  const double vseg = segment_mean_potential(V, start, target);
  const double mag =
      std::max(std::sqrt(2.0 * lambda), std::sqrt(2.0 * (lambda + vseg)));
  return scale(u, mag);
}

struct ELambdaOptions {
  Vec tilt = vec0();
  bool tilt_is_set = false;     // false: use suggested_tilt
  double window_radius = 0.0;   // 0 disables the guard
  double hopeless_margin = 7.0; // in units of 1/|tilt|; <= 0 disables
};

// Importance-sampled estimate of e_lambda(start -> target ball).
template <class PotentialFn>
FunctionalEstimate e_lambda_run(const PathConfig& base_config,
                                PotentialFn&& V, const Vec& start,
                                const HitTarget& target, double lambda,
                                long n_paths, CounterRng env_rng,
                                const ELambdaOptions& opt = {}) {
  if (lambda < 0.0) throw std::invalid_argument("e_lambda: lambda must be >= 0");
  if (dist(start, target.center) <= target.radius)
    throw std::invalid_argument("e_lambda: start inside the target ball");

  PathConfig config = base_config;
  config.drift = opt.tilt_is_set ? opt.tilt
                                 : suggested_tilt(V, start, target.center, lambda);

  PathGuards guards;
  guards.window_radius = opt.window_radius;
  const double tilt_mag = norm(config.drift);
  if (opt.hopeless_margin > 0.0 && tilt_mag > 0.0) {
    guards.hopeless_active = true;
    guards.hopeless_dir = unit(sub(target.center, start));
    guards.hopeless_threshold = dist(start, target.center) + target.radius +
                                opt.hopeless_margin / tilt_mag;
  }
  const StoppingSpec stop = StoppingSpec::hit_ball(target.center, target.radius);

  std::vector<double> w(n_paths, 0.0);
  FunctionalEstimate est;
  est.tilt_drift = config.drift;
  est.n_paths = n_paths;
  for (long p = 0; p < n_paths; ++p) {
    CounterRng rng =
        env_rng.child({stream_tag::kPath, static_cast<std::uint64_t>(p)});
    const TrajectoryOutcome o = simulate(config, stop, V, start, rng, guards);
    if (o.event == StopEvent::kHit) {
      w[p] = std::exp(-lambda * o.stop_time - o.integral_V +
                      o.girsanov_log_weight);
      ++est.n_hits;
    } else if (o.event == StopEvent::kWindowViolation) {
      ++est.n_window_violations;
    }
  }
  const Summary s = summarize(w);
  est.value = s.mean;
  est.std_error = s.std_error;
  est.neglected_mass_bound = lambda > 0.0 ? std::exp(-lambda * config.t_max) : 1.0;
  if (est.n_hits == 0) {
    est.upper_bound_only = true;
    // No hit in n_paths tries: report the censoring bound, not -infinity.
    est.log_value = -lambda * config.t_max;
  } else {
    est.log_value = std::log(s.mean);
  }
  return est;
}

// ---------------------------------------------------------------------------
// The metric d(x, y).
// ---------------------------------------------------------------------------

// Quasi-uniform offsets inside the closed unit ball, pulled back to radius
// 0.85 so every probe stays strictly interior: a symmetric lattice in d=1, a
// golden-angle spiral in d=2, a Fibonacci-sphere spiral with cube-root radii
// in d=3.
inline std::vector<Vec> unit_ball_probes(int d, int n) {
  std::vector<Vec> pts;
  pts.reserve(n);
  constexpr double kShrink = 0.85;
  constexpr double kGolden = 2.399963229728653;  // 2*pi*(1 - 1/phi)
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    Vec p = vec0();
    if (d == 1) {
      p[0] = kShrink * (2.0 * u - 1.0);
    } else if (d == 2) {
      const double r = kShrink * std::sqrt(u);
      p[0] = r * std::cos(kGolden * i);
      p[1] = r * std::sin(kGolden * i);
    } else {
      const double r = kShrink * std::cbrt(u);
      const double z = 1.0 - 2.0 * ((i + 0.5) / n);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      p[0] = r * rho * std::cos(kGolden * i);
      p[1] = r * rho * std::sin(kGolden * i);
      p[2] = r * z;
    }
    pts.push_back(p);
  }
  return pts;
}

// Probe points for the sup over a closed unit ball in a metric run: the two
// boundary points along the travel axis (these realise the extremal hitting
// distances, and chained paths enter the ball through them, so finite probing
// cannot manufacture triangle-inequality violations) plus interior spiral
// points for angular coverage.
inline std::vector<Vec> metric_probes(int d, int n, const Vec& axis) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double len = norm(axis);
  Vec u = vec0();
  if (len > 0.0)
    u = scale(axis, 1.0 / len);
  else
    u[0] = 1.0;
  if (n >= 1) pts.push_back(u);
  if (n >= 2) pts.push_back(scale(u, -1.0));
  if (n > 2) {
    const std::vector<Vec> inner = unit_ball_probes(d, n - 2);
    pts.insert(pts.end(), inner.begin(), inner.end());
  }
  return pts;
}

struct MetricEstimate {
  double value = 0.0;      // d_hat(x, y)
  double std_error = 0.0;  // of the term achieving the max
  double term_xy = 0.0;    // sup over starts in B(x) of a_hat(z -> B(y))
  double term_yx = 0.0;    // sup over starts in B(y) of a_hat(w -> B(x))
  bool censored = false;   // some contributing run had zero hits
};

// d(x,y) = max over the two travel directions of the worst-start hitting
// cost: starts probing B(x) against the ball at y and starts probing B(y)
// against the ball at x.  Exchanging x and y exchanges the two terms, so the
// estimated quantity is symmetric by construction; the sups over unit balls
// are approximated from below by n_start probe points.
template <class PotentialFn>
MetricEstimate metric_d_run(const PathConfig& config, PotentialFn&& V,
                            const Vec& x, const Vec& y, int n_start,
                            long n_paths, CounterRng env_rng,
                            const ELambdaOptions& base_opt = {}) {
  if (dist(x, y) <= 2.0)
    throw std::invalid_argument("metric_d: need |x - y| > 2");
  const std::vector<Vec> probes_x =
      metric_probes(config.dimension, n_start, sub(y, x));
  const std::vector<Vec> probes_y =
      metric_probes(config.dimension, n_start, sub(x, y));

  MetricEstimate est;
  double se_xy = 0.0, se_yx = 0.0;
  std::uint64_t run = 0;
  for (int j = 0; j < n_start; ++j) {
    // Start probes in B(x), fixed target ball at y.
    {
      const Vec z = add(x, probes_x[j]);
      ELambdaOptions opt = base_opt;
      opt.tilt_is_set = true;
      opt.tilt = suggested_tilt(V, z, y, 0.0);
      const FunctionalEstimate e = e_lambda_run(
          config, V, z, HitTarget{y, 1.0}, 0.0, n_paths,
          env_rng.child({stream_tag::kMisc, run++}), opt);
      if (e.upper_bound_only) est.censored = true;
      const double a = e.a_hat();
      if (a >= est.term_xy) {
        est.term_xy = a;
        se_xy = e.value > 0.0 ? e.std_error / e.value : 0.0;
      }
    }
    // Start probes in B(y), fixed target ball at x.
    {
      const Vec w = add(y, probes_y[j]);
      ELambdaOptions opt = base_opt;
      opt.tilt_is_set = true;
      opt.tilt = suggested_tilt(V, w, x, 0.0);
      const FunctionalEstimate e = e_lambda_run(
          config, V, w, HitTarget{x, 1.0}, 0.0, n_paths,
          env_rng.child({stream_tag::kMisc, run++}), opt);
      if (e.upper_bound_only) est.censored = true;
      const double a = e.a_hat();
      if (a >= est.term_yx) {
        est.term_yx = a;
        se_yx = e.value > 0.0 ? e.std_error / e.value : 0.0;
      }
    }
  }
  est.value = std::max(est.term_xy, est.term_yx);
  est.std_error = est.term_xy >= est.term_yx ? se_xy : se_yx;
  return est;
}

// ---------------------------------------------------------------------------
// Green measure.
// ---------------------------------------------------------------------------

struct BoxCell {
  Vec center = vec0();
  double halfwidth = 0.25;

  bool contains(const Vec& z, int d) const {
    for (int k = 0; k < d; ++k)
      if (std::fabs(z[k] - center[k]) > halfwidth) return false;
    return true;
  }
  double volume(int d) const { return std::pow(2.0 * halfwidth, d); }
};

struct GreenEstimate {
  double value = 0.0;        // G(x, A) / Leb(A), the density proxy g(x, .)
  double raw_mass = 0.0;     // G(x, A)
  double std_error = 0.0;    // on the density proxy
  long n_paths = 0;
  double lambda_floor = 0.0;
  double tail_fraction = 0.0;  // occupation mass accrued in the last quarter
  long n_window_violations = 0;
};

// Horizon-truncated occupation-density estimate
//   g_hat = (1/|A|) E[ int_0^T 1_A(Z_t) exp(-int_0^t (V + l0)) dt ].
// tail_fraction reports how much of the mass arrived during t in [3T/4, T]:
// a non-negligible value means the horizon cut the integrand and the caller
// should enlarge T (warned, not hidden).
template <class PotentialFn>
GreenEstimate green_run(const PathConfig& config, PotentialFn&& V,
                        const Vec& start, const BoxCell& cell, long n_paths,
                        double lambda_floor, CounterRng env_rng,
                        double window_radius = 0.0) {
  if (lambda_floor < 0.0)
    throw std::invalid_argument("green: lambda_floor must be >= 0");
  const int d = config.dimension;
  std::vector<double> occ(n_paths, 0.0), occ_tail(n_paths, 0.0);
  long violations = 0;
  const double t_tail = 0.75 * config.t_max;

  for (long p = 0; p < n_paths; ++p) {
    CounterRng rng =
        env_rng.child({stream_tag::kPath, static_cast<std::uint64_t>(p)});
    Vec z = start;
    double t = 0.0, lam = 0.0;
    double v0 = V(z) + lambda_floor;
    double in0 = cell.contains(z, d) ? 1.0 : 0.0;
    while (t < config.t_max - 1e-12) {
      const double dt_s = std::min(config.dt, config.t_max - t);
      const double sdt = std::sqrt(dt_s);
      Vec znew = z;
      for (int k = 0; k < d; ++k)
        znew[k] += config.drift[k] * dt_s + sdt * rng.next_normal();
      if (window_radius > 0.0 && norm(znew) > window_radius) {
        ++violations;
        break;
      }
      const double v1 = V(znew) + lambda_floor;
      const double w0 = std::exp(-lam);
      lam += 0.5 * (v0 + v1) * dt_s;
      const double w1 = std::exp(-lam);
      const double in1 = cell.contains(znew, d) ? 1.0 : 0.0;
      const double mass = 0.5 * (in0 * w0 + in1 * w1) * dt_s;
      occ[p] += mass;
      if (t >= t_tail) occ_tail[p] += mass;
      t += dt_s;
      z = znew;
      v0 = v1;
      in0 = in1;
    }
  }

  const double vol = cell.volume(d);
  GreenEstimate est;
  est.n_paths = n_paths;
  est.lambda_floor = lambda_floor;
  est.n_window_violations = violations;
  const Summary s = summarize(occ);
  est.raw_mass = s.mean;
  est.value = s.mean / vol;
  est.std_error = s.std_error / vol;
  const double tail_mass = pairwise_sum(occ_tail);
  const double total_mass = pairwise_sum(occ);
  est.tail_fraction = total_mass > 0.0 ? tail_mass / total_mass : 0.0;
  return est;
}

}  // namespace rplab
