// rp-lab: Lyapunov exponents, shape diagnostic, rate function, phase diagram.
//
// alpha_lambda(x) is estimated from the hitting functionals a(0, r x) / r on
// an increasing scale grid, averaged over independent environments, with the
// largest scale taken as the point estimate (the exact quantity is an inf
// over scales, so the largest affordable scale is the least biased monotone
// choice).  Downstream consumers (rate function, dual norm, phase verdict)
// operate on assembled curves over a lambda grid.
//
// Everything here works on the shifted potential V - vbar (vbar the declared
// essential infimum, an input of the model): curves are indexed by the
// shifted killing rate, and reports convert back where a statement about the
// original lambda is made.
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/paths.hpp"
#include "rplab/potentials.hpp"

namespace rplab {

// Quasi-uniform unit directions: +-e1 in d=1, 16 equiangular rays in d=2
// (including the coordinate axes), the 26 normalized cube directions in d=3.
std::vector<Vec> direction_grid(int dimension);

struct ScaleEstimate {
  double scale = 0.0;
  double mean = 0.0;  // mean over environments of a_hat(0, scale*x)/scale
  double se = 0.0;    // environment-level bootstrap standard error
  long n_paths = 0;
  double hit_fraction = 0.0;
  long n_window_violations = 0;
  long n_censored = 0;  // environments with zero hits at this scale
};

struct AlphaEstimate {
  double lambda = 0.0;  // shifted killing rate
  std::vector<ScaleEstimate> by_scale;
  std::vector<std::vector<double>> a_over_r_by_env;  // [scale][env]
  double alpha_hat = 0.0;  // largest-scale mean
  double se = 0.0;         // largest-scale bootstrap SE
  bool monotone_ok = true; // mean a/r non-increasing over scales within 3 SE
};

struct LyapunovCurve {
  Vec x = vec0();  // magnitude included: estimates of alpha_lambda(x)
  double vbar = 0.0;
  std::vector<double> lambdas;  // shifted grid, non-negative increasing
  std::vector<AlphaEstimate> by_lambda;
};

struct CurveOptions {
  std::vector<double> scales = {8.0, 16.0, 32.0};
  // Path budget per (env, lambda, scale) cell; when n_paths_by_scale is
  // non-empty it overrides n_paths scale by scale (the point estimate only
  // uses the largest scale, so smaller scales may run lighter).
  long n_paths = 2000;
  std::vector<long> n_paths_by_scale = {};
  long n_env = 10;
  std::uint64_t seed = 1;
  PathConfig path;        // dimension/dt/t_max template; drift is set per run
  int n_bootstrap = 200;
  int workers = 1;
  // Extra slack on the derived evaluation window
  //   |target| + 1 + backtrack + lateral spread + 2
  // (backtrack and spread use the smallest tilt on the lambda grid).
  double window_margin = 0.0;
};

// a(0, r x)/r over (lambda grid) x (scale grid) x environments; one sampled
// environment per index, shared across all cells of the curve.
LyapunovCurve estimate_curve(const PotentialSpec& spec, const Vec& x,
                             std::span<const double> lambda_grid,
                             const CurveOptions& opt);

// Single-lambda convenience wrapper (k >= 3 scales required).
AlphaEstimate estimate_alpha(const PotentialSpec& spec, const Vec& x,
                             double lambda, const CurveOptions& opt);

// Difference-quotient estimate between two scales of the same curve:
// (a(r2) - a(r1))/(r2 - r1) averaged over environments.  Cancels the
// additive o(r) offset of a(0, r x) and so converges faster than a(r)/r;
// used where a tighter point estimate matters more than the monotone
// conservatism of the largest-scale rule.
struct TwoScaleAlpha {
  double value = 0.0;
  double se = 0.0;
};
TwoScaleAlpha two_scale_alpha(const AlphaEstimate& est, std::size_t scale_lo,
                              std::size_t scale_hi, int n_bootstrap,
                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shape diagnostic.
// ---------------------------------------------------------------------------

struct ShapeDeviation {
  double scale = 0.0;
  double max_deviation = 0.0;  // over directions, of mean |a/r - alpha(u)|
  int argmax_direction = 0;
};

struct ShapeReport {
  std::vector<Vec> directions;
  std::vector<double> scales;
  std::vector<std::vector<double>> mean_a_over_r;  // [scale][direction]
  std::vector<std::vector<double>> sem_a_over_r;   // standard error of mean
  std::vector<double> alpha_by_direction;          // largest-scale means
  std::vector<ShapeDeviation> deviations;
  bool decreasing = false;  // deviation(largest) < deviation(smallest)
};

// Directional convergence of a(0, r u)/r toward alpha(u): the per-
// environment absolute deviation from the direction's largest-scale mean,
// averaged over environments and maximized over directions, per scale.
ShapeReport shape_diagnostic(const PotentialSpec& spec, double lambda,
                             std::span<const Vec> directions,
                             std::span<const double> scales, long n_env,
                             long n_paths, std::uint64_t seed,
                             const PathConfig& path, int workers = 1);

// ---------------------------------------------------------------------------
// Rate function.
// ---------------------------------------------------------------------------

struct RateInput {
  std::vector<double> lambdas;  // shifted grid
  std::vector<double> alphas;   // alpha_lambda(x) estimates on the grid
  std::vector<double> ses;      // optional (may be empty)
};

struct RateFunctionReport {
  double I_hat = 0.0;
  double lambda_star = 0.0;          // original units (shifted max minus vbar)
  double lambda_star_shifted = 0.0;
  double projection_distance = 0.0;  // concave-projection repair size
  bool right_censored = false;       // sup attained at the grid edge
  double sandwich_lower = 0.0;       // |x|^2 / 2
  double sandwich_upper = 0.0;       // |x|^2 / 2 + lambda_d + E sup V
  bool within_sandwich = false;
  double slack = 0.0;                // tolerance used for the verdict
};

// Principal Dirichlet eigenvalue of -(1/2) Laplacian on the unit ball
// (closed forms: pi^2/8, j0^2/2, pi^2/2 for d = 1, 2, 3); the dimension
// constant entering the sandwich upper bound.
double dirichlet_ball_eigenvalue(int dimension);

// I(x) = sup over the original lambda >= 0 of (alpha_lambda(x) - lambda).
// The input curve lives on the shifted grid; the sup is taken over shifted
// lambda >= vbar and vbar is added back, which is the same quantity exactly.
// The curve is concave-projected, interpolated linearly in s = sqrt(lambda)
// (exact for sqrt-shaped curves, extrapolating the first segment down to
// s = 0), and maximized segment by segment in closed form.  x_norm, lambda_d
// and e_sup_v feed the sandwich bounds
//   |x|^2/2  <=  I(x)  <=  |x|^2/2 + lambda_d + E sup_{B(0)} V.
RateFunctionReport rate_function(const RateInput& curve, double vbar,
                                 double x_norm, double lambda_d,
                                 double e_sup_v, double slack);

// ---------------------------------------------------------------------------
// Dual norm and drift phase diagram.
// ---------------------------------------------------------------------------

struct DirectionCurves {
  std::vector<Vec> directions;
  std::vector<double> lambdas;             // shifted grid
  std::vector<std::vector<double>> alpha;  // [direction][lambda]
};

struct DualValue {
  double value = 0.0;
  bool infinite = false;  // some direction has alpha = 0 with u.h > 0
};

// alpha*_lambda(h) = max over the direction grid of (u.h)/alpha_lambda(u);
// exact when h is parallel to a grid direction, a lower bound otherwise.
DualValue dual_norm(std::span<const Vec> directions,
                    std::span<const double> alpha_at_lambda, const Vec& h);

struct PhaseVerdict {
  Vec h = vec0();
  double dual_at_zero = 0.0;
  bool dual_at_zero_infinite = false;
  bool ballistic = false;
  bool undetermined = false;  // root beyond the curve grid (censored)
  double lambda_h = std::numeric_limits<double>::quiet_NaN();  // original units
  double censor_low = 0.0;    // when undetermined: root exceeds this
};

// Ballistic iff the dual at the original lambda = 0 (shifted lambda = vbar)
// exceeds 1; the free-energy rate lambda_h then solves alpha*_lambda(h) = 1
// (strictly decreasing in lambda), found by bisection on the interpolated
// curves to tol_lambda and reported in original units.  Curves interpolate
// linearly in sqrt(lambda); below the first grid node the first segment is
// extrapolated (clamped at 0), so grids need not include lambda = 0.
PhaseVerdict phase_verdict(const DirectionCurves& curves, const Vec& h,
                           double vbar, double tol_lambda = 1e-4);

// ---------------------------------------------------------------------------
// Endpoint large-deviation consistency check.
// ---------------------------------------------------------------------------

struct EndpointRate {
  double t = 0.0;
  double rate = 0.0;       // (1/t) log Q_t(Z_t in t B(v, r)); -inf if no hits
  double numerator = 0.0;  // E[1 e^{-int V} e^{glw}] estimate
  double denominator = 0.0;
  long n_inside = 0;
  long n_window_violations = 0;
};

class Environment;  // environment.hpp

// Empirical endpoint rates (1/t) log Q_{t}(Z_t in t B(v,r)) on a time grid,
// importance-sampled with constant drift v; for comparison against -inf of
// the rate function over B(v,r).
std::vector<EndpointRate> endpoint_ldp_check(const PotentialSpec& spec,
                                             std::uint64_t env_seed,
                                             const Vec& v, double radius,
                                             std::span<const double> t_grid,
                                             long n_paths,
                                             const PathConfig& path);

}  // namespace rplab
