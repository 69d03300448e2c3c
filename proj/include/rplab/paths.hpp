// rp-lab: discretized Brownian trajectories.
//
// Euler scheme Z_{k+1} = Z_k + drift*dt + sqrt(dt)*N(0, I) with
//   - hitting / exit detection for balls, optionally sharpened by the
//     Brownian-bridge crossing probability exp(-2ab/dt) applied to the signed
//     distance process (a, b the distances to the boundary at the step ends);
//   - trapezoidal accumulation of int_0^tau V(Z_s) ds;
//   - the Girsanov log-weight -drift.(Z_tau - Z_0) + |drift|^2 tau / 2, so
//     that reweighted expectations under the drifted measure equal driftless
//     ones.
//
// The stepping loop is templated on the potential callable; the callable must
// be safe for concurrent read-only use.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/rng.hpp"

namespace rplab {

struct PathConfig {
  int dimension = 2;
  double dt = 1e-3;
  double t_max = 100.0;
  Vec drift = vec0();
  bool bridge_correction = true;

  std::string validate_message() const {
    if (dimension < 1 || dimension > 3) return "dimension must be 1, 2 or 3";
    if (dt <= 0.0) return "dt must be > 0";
    if (t_max <= 0.0) return "t_max must be > 0";
    if (dt > t_max) return "dt must be <= t_max";
    return "";
  }
};

struct StoppingSpec {
  enum class Kind { kHitBall, kExitBall, kHorizon };
  Kind kind = Kind::kHorizon;
  Vec center = vec0();
  double radius = 1.0;

  static StoppingSpec hit_ball(const Vec& y, double radius = 1.0) {
    return {Kind::kHitBall, y, radius};
  }
  static StoppingSpec exit_ball(const Vec& c, double radius) {
    return {Kind::kExitBall, c, radius};
  }
  static StoppingSpec horizon() { return {}; }
};

enum class StopEvent {
  kHit,              // entered the closed target ball
  kExit,             // left the confinement ball
  kHorizon,          // reached t_max
  kWindowViolation,  // left the guaranteed evaluation window of the potential
  kHopeless          // passed the cut plane of the hopeless-path guard
};

struct TrajectoryOutcome {
  StopEvent event = StopEvent::kHorizon;
  double stop_time = 0.0;
  double integral_V = 0.0;          // int_0^tau V(Z_s) ds, trapezoid rule
  double girsanov_log_weight = 0.0; // 0 when drift = 0
  Vec endpoint = vec0();
};

// Optional guards on a simulation run.
//
// window_radius > 0 stops a path (event kWindowViolation) before it leaves
// the ball on which the sampled environment is guaranteed exact; estimators
// count these instead of silently clipping.
//
// The hopeless guard serves tilted rare-event runs: once a drifted path has
// overshot the plane through the target (projection onto `hopeless_dir`
// beyond `hopeless_threshold`), the chance of drifting back is bounded by
// exp(-2 |drift| margin), so stopping it early biases the hitting functional
// by a controlled, negligible amount while removing the dominant wall-clock
// cost of doomed paths.
struct PathGuards {
  double window_radius = 0.0;  // 0 disables
  bool hopeless_active = false;
  Vec hopeless_dir = vec0();   // unit vector
  double hopeless_threshold = std::numeric_limits<double>::infinity();

  static PathGuards none() { return {}; }
  static PathGuards window(double radius) {
    PathGuards g;
    g.window_radius = radius;
    return g;
  }
};

namespace detail {

// Crossing test for one Euler segment against a sphere.  Returns the step
// fraction in (0,1] when the segment (possibly via the bridge correction)
// reaches the boundary, or a negative value when it does not.
template <bool kInward>
double segment_crossing(double d0, double d1, double radius, double dt,
                        bool bridge, CounterRng& rng) {
  const double a = kInward ? d0 - radius : radius - d0;
  const double b = kInward ? d1 - radius : radius - d1;
  if (b <= 0.0) {
    // Discrete crossing; linear interpolation of the distance process.
    const double denom = a - b;
    return denom > 0.0 ? std::min(1.0, a / denom) : 1.0;
  }
  if (!bridge || a <= 0.0) return -1.0;
  const double q = 2.0 * a * b / dt;
  if (q >= 30.0) return -1.0;  // crossing probability < 1e-13
  if (rng.next_double() < std::exp(-q)) return a / (a + b);
  return -1.0;
}

}  // namespace detail

template <class PotentialFn>
TrajectoryOutcome simulate(const PathConfig& config, const StoppingSpec& stop,
                           PotentialFn&& V, const Vec& start, CounterRng& rng,
                           const PathGuards& guards = PathGuards::none()) {
  const int d = config.dimension;
  const Vec& h = config.drift;
  const double h2 = norm2(h);

  TrajectoryOutcome out;
  Vec z = start;
  double t = 0.0;
  double v0 = V(z);
  if (!std::isfinite(v0))
    throw std::runtime_error("simulate: non-finite potential at the start");

  auto finish = [&](StopEvent event, double stop_time, const Vec& endpoint) {
    out.event = event;
    out.stop_time = stop_time;
    out.endpoint = endpoint;
    out.girsanov_log_weight =
        h2 == 0.0 ? 0.0 : -dot(h, sub(endpoint, start)) + 0.5 * h2 * stop_time;
    return out;
  };

  for (;;) {
    const double remaining = config.t_max - t;
    if (remaining <= 1e-12) return finish(StopEvent::kHorizon, config.t_max, z);
    const double dt_s = std::min(config.dt, remaining);
    const double sdt = std::sqrt(dt_s);

    Vec znew = z;
    for (int k = 0; k < d; ++k)
      znew[k] += h[k] * dt_s + sdt * rng.next_normal();

    // Stopping on this segment.
    if (stop.kind != StoppingSpec::Kind::kHorizon) {
      const double d0 = dist(z, stop.center);
      const double d1 = dist(znew, stop.center);
      const bool inward = stop.kind == StoppingSpec::Kind::kHitBall;
      const double theta =
          inward ? detail::segment_crossing<true>(d0, d1, stop.radius, dt_s,
                                                  config.bridge_correction, rng)
                 : detail::segment_crossing<false>(
                       d0, d1, stop.radius, dt_s, config.bridge_correction, rng);
      if (theta >= 0.0) {
        Vec hitpoint = add(z, scale(sub(znew, z), theta));
        // Place the endpoint on the boundary sphere along the ray from the
        // center (the interpolated point sits near but not on it).
        const double dist_hp = dist(hitpoint, stop.center);
        if (dist_hp > 0.0)
          hitpoint = add(stop.center, scale(sub(hitpoint, stop.center),
                                            stop.radius / dist_hp));
        const double ve = V(hitpoint);
        out.integral_V += 0.5 * (v0 + ve) * theta * dt_s;
        return finish(inward ? StopEvent::kHit : StopEvent::kExit,
                      t + theta * dt_s, hitpoint);
      }
    }

    // Guards fire before the potential is evaluated at the new point: a
    // window violation means V(znew) is not certified there.
    if (guards.window_radius > 0.0 && norm(znew) > guards.window_radius)
      return finish(StopEvent::kWindowViolation, t + dt_s, znew);
    const double v1 = V(znew);
    if (!std::isfinite(v1))
      throw std::runtime_error("simulate: non-finite potential value");
    out.integral_V += 0.5 * (v0 + v1) * dt_s;
    t += dt_s;
    z = znew;
    v0 = v1;

    if (guards.hopeless_active &&
        dot(sub(z, start), guards.hopeless_dir) > guards.hopeless_threshold)
      return finish(StopEvent::kHopeless, t, z);
  }
}

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
};

// Monte Carlo estimate of the tubular probability
//   P_z[ sup_{s<=t} |Z_s - (z + (s/t)(x-z))| < rho ],
// the chance that Brownian motion stays within distance rho of the moving
// point sliding from z to x in time t.  Discretization dt <= rho^2/100.
inline ProbabilityEstimate tubular_probability(int dimension, const Vec& z,
                                               const Vec& x, double t,
                                               double rho, long n_paths,
                                               std::uint64_t seed) {
  if (t <= 0.0 || rho <= 0.0)
    throw std::invalid_argument("tubular_probability: t and rho must be > 0");
  if (n_paths < 1)
    throw std::invalid_argument("tubular_probability: n_paths >= 1");
  const double dt = std::min(rho * rho / 100.0, t / 8.0);
  const long n_steps = static_cast<long>(std::ceil(t / dt - 1e-9));
  const Vec disp = sub(x, z);
  CounterRng master(seed);

  long survived = 0;
  for (long p = 0; p < n_paths; ++p) {
    CounterRng rng = master.child({stream_tag::kPath, static_cast<std::uint64_t>(p)});
    Vec w = vec0();  // Z_s - z
    bool inside = true;
    for (long k = 1; k <= n_steps && inside; ++k) {
      const double s = std::min(t, k * dt);
      const double dt_s = s - std::min(t, (k - 1) * dt);
      const double sdt = std::sqrt(dt_s);
      for (int i = 0; i < dimension; ++i) w[i] += sdt * rng.next_normal();
      const Vec line = scale(disp, s / t);
      if (dist(w, line) >= rho) inside = false;
    }
    if (inside) ++survived;
  }
  ProbabilityEstimate est;
  est.n_paths = n_paths;
  est.value = static_cast<double>(survived) / n_paths;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) /
                            std::max<long>(1, n_paths));
  return est;
}

}  // namespace rplab
