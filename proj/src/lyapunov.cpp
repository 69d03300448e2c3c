#include "rplab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rplab/environment.hpp"
#include "rplab/feynman_kac.hpp"
#include "rplab/parallel.hpp"
#include "rplab/stats.hpp"

namespace rplab {
namespace {

// Path-loop potential with the declared essential infimum subtracted;
// estimation always runs on the shifted field so weights stay O(1).
struct ShiftedEnv {
  EnvPotential base;
  double shift = 0.0;
  double operator()(const Vec& z) const { return base(z) - shift; }
};

// Smallest tilt magnitude the hitting runs can end up with on a lambda grid;
// floored because the segment-mean part of the default tilt is unknown here.
double floored_tilt(double lambda_min) {
  return std::max(0.35, std::sqrt(2.0 * lambda_min));
}

// Evaluation window for a batch of tilted hitting runs out to dist_max:
// target distance + target radius + hopeless-guard backtrack + lateral
// diffusive spread at the typical arrival time + slack.
double curve_window(const PotentialSpec& spec, double dist_max,
                    double lambda_min, double margin) {
  if (spec.family == Family::Zero || spec.family == Family::Constant)
    return 0.0;
  const double tilt = floored_tilt(lambda_min);
  return dist_max + 1.0 + 7.0 / tilt + 4.0 * std::sqrt(dist_max / tilt) + 2.0 +
         margin;
}

// Horizon for one hitting cell: several multiples of the typical drift
// arrival time, never below the configured t_max backstop.
double cell_t_max(const PathConfig& path, double distance, double lambda) {
  const double tilt = std::sqrt(2.0 * lambda);
  if (tilt >= 0.25) return std::max(path.t_max, 5.0 * distance / tilt);
  return path.t_max;
}

void require_increasing_nonnegative(std::span<const double> xs,
                                    const char* what) {
  if (xs.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  if (xs.front() < 0.0)
    throw std::invalid_argument(std::string(what) + ": must be >= 0");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i] >= xs[i + 1])
      throw std::invalid_argument(std::string(what) +
                                  ": must be strictly increasing");
}

double mean_of(std::span<const double> xs) {
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Piecewise-linear interpolation in s = sqrt(lambda).  Below the first node
// the first segment is extrapolated and clamped at zero; above the last node
// the value is held flat (conservative for the dual norm).
struct SqrtInterp {
  std::vector<double> s;  // sqrt(lambda) nodes, strictly increasing
  std::vector<double> a;

  SqrtInterp(std::span<const double> lambdas, std::span<const double> alphas) {
    s.reserve(lambdas.size());
    a.assign(alphas.begin(), alphas.end());
    for (double l : lambdas) s.push_back(std::sqrt(l));
  }

  double operator()(double lambda) const {
    const double ss = std::sqrt(std::max(0.0, lambda));
    if (ss >= s.back()) return a.back();
    std::size_t i = 0;
    if (ss > s.front()) {
      while (i + 2 < s.size() && s[i + 1] < ss) ++i;
    }
    const double m = (a[i + 1] - a[i]) / (s[i + 1] - s[i]);
    return std::max(0.0, a[i] + m * (ss - s[i]));
  }
};

}  // namespace

std::vector<Vec> direction_grid(int dimension) {
  std::vector<Vec> dirs;
  if (dimension == 1) {
    dirs.push_back(vec(1.0));
    dirs.push_back(vec(-1.0));
  } else if (dimension == 2) {
    for (int k = 0; k < 16; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 16.0;
      dirs.push_back(vec(std::cos(th), std::sin(th)));
    }
  } else if (dimension == 3) {
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          dirs.push_back(unit(vec(i, j, k)));
        }
  } else {
    throw std::invalid_argument("direction_grid: dimension must be 1, 2 or 3");
  }
  return dirs;
}

LyapunovCurve estimate_curve(const PotentialSpec& spec, const Vec& x,
                             std::span<const double> lambda_grid,
                             const CurveOptions& opt) {
  spec.validate();
  const double xn = norm(x);
  if (!(xn > 0.0))
    throw std::invalid_argument("estimate_curve: x must be nonzero");
  require_increasing_nonnegative(lambda_grid, "estimate_curve lambda grid");
  require_increasing_nonnegative(opt.scales, "estimate_curve scale grid");
  if (opt.scales.size() < 2)
    throw std::invalid_argument("estimate_curve: need >= 2 scales");
  if (opt.scales.front() * xn <= 2.0)
    throw std::invalid_argument(
        "estimate_curve: smallest scale * |x| must exceed 2");
  if (opt.n_env < 1 || opt.n_paths < 1)
    throw std::invalid_argument("estimate_curve: n_env, n_paths must be >= 1");
  if (!opt.n_paths_by_scale.empty() &&
      opt.n_paths_by_scale.size() != opt.scales.size())
    throw std::invalid_argument(
        "estimate_curve: n_paths_by_scale must match the scale grid");

  PathConfig path = opt.path;
  path.dimension = spec.dimension;
  if (const std::string msg = path.validate_message(); !msg.empty())
    throw std::invalid_argument("estimate_curve: " + msg);

  const std::size_t nl = lambda_grid.size();
  const std::size_t ns = opt.scales.size();
  const std::size_t ne = static_cast<std::size_t>(opt.n_env);
  auto paths_at = [&](std::size_t si) {
    return opt.n_paths_by_scale.empty() ? opt.n_paths
                                        : opt.n_paths_by_scale[si];
  };

  const double window = curve_window(spec, opt.scales.back() * xn,
                                     lambda_grid.front(), opt.window_margin);

  std::vector<std::vector<std::vector<double>>> a(
      nl, std::vector<std::vector<double>>(ns, std::vector<double>(ne, 0.0)));
  std::vector<std::vector<std::vector<long>>> hits(
      nl, std::vector<std::vector<long>>(ns, std::vector<long>(ne, 0)));
  auto violations = hits, censored = hits;

  CounterRng master(opt.seed);
  parallel_cells(ne, opt.workers, [&](std::size_t e) {
    const std::uint64_t env_seed = master.child(e).key();
    const Environment env = Environment::prepare(spec, window, env_seed);
    const Vec start = vec0();
    const ShiftedEnv V{env.path_potential(start), spec.vbar()};
    for (std::size_t li = 0; li < nl; ++li) {
      for (std::size_t si = 0; si < ns; ++si) {
        const Vec target = scale(x, opt.scales[si]);
        PathConfig cfg = path;
        cfg.t_max = cell_t_max(path, norm(target), lambda_grid[li]);
        ELambdaOptions eo;
        eo.window_radius = env.window_radius;
        const CounterRng cell_rng =
            CounterRng(env_seed).child({stream_tag::kMisc, li, si});
        const FunctionalEstimate fe =
            e_lambda_run(cfg, V, start, HitTarget{target, 1.0},
                         lambda_grid[li], paths_at(si), cell_rng, eo);
        a[li][si][e] = fe.a_hat() / opt.scales[si];
        hits[li][si][e] = fe.n_hits;
        violations[li][si][e] = fe.n_window_violations;
        censored[li][si][e] = fe.upper_bound_only ? 1 : 0;
      }
    }
  });

  LyapunovCurve curve;
  curve.x = x;
  curve.vbar = spec.vbar();
  curve.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  curve.by_lambda.resize(nl);
  for (std::size_t li = 0; li < nl; ++li) {
    AlphaEstimate& ae = curve.by_lambda[li];
    ae.lambda = lambda_grid[li];
    ae.a_over_r_by_env = a[li];
    ae.by_scale.resize(ns);
    for (std::size_t si = 0; si < ns; ++si) {
      ScaleEstimate& se = ae.by_scale[si];
      se.scale = opt.scales[si];
      se.mean = mean_of(a[li][si]);
      se.se = bootstrap_se(a[li][si], opt.n_bootstrap,
                           master.child({stream_tag::kBootstrap, li, si}));
      se.n_paths = paths_at(si);
      long h = 0, v = 0, c = 0;
      for (std::size_t e = 0; e < ne; ++e) {
        h += hits[li][si][e];
        v += violations[li][si][e];
        c += censored[li][si][e];
      }
      se.hit_fraction = static_cast<double>(h) /
                        (static_cast<double>(paths_at(si)) * ne);
      se.n_window_violations = v;
      se.n_censored = c;
    }
    ae.alpha_hat = ae.by_scale.back().mean;
    ae.se = ae.by_scale.back().se;
    ae.monotone_ok = true;
    for (std::size_t si = 0; si + 1 < ns; ++si) {
      const ScaleEstimate& lo = ae.by_scale[si];
      const ScaleEstimate& hi = ae.by_scale[si + 1];
      const double tol = 3.0 * std::hypot(lo.se, hi.se) + 1e-12;
      if (hi.mean > lo.mean + tol) ae.monotone_ok = false;
    }
  }
  return curve;
}

AlphaEstimate estimate_alpha(const PotentialSpec& spec, const Vec& x,
                             double lambda, const CurveOptions& opt) {
  if (opt.scales.size() < 3)
    throw std::invalid_argument("estimate_alpha: need >= 3 scales");
  const double grid[1] = {lambda};
  return estimate_curve(spec, x, grid, opt).by_lambda.front();
}

TwoScaleAlpha two_scale_alpha(const AlphaEstimate& est, std::size_t scale_lo,
                              std::size_t scale_hi, int n_bootstrap,
                              std::uint64_t seed) {
  if (scale_hi >= est.by_scale.size() || scale_lo >= scale_hi)
    throw std::invalid_argument("two_scale_alpha: bad scale indices");
  const double r_lo = est.by_scale[scale_lo].scale;
  const double r_hi = est.by_scale[scale_hi].scale;
  const auto& v_lo = est.a_over_r_by_env[scale_lo];
  const auto& v_hi = est.a_over_r_by_env[scale_hi];
  std::vector<double> diff(v_lo.size());
  for (std::size_t e = 0; e < diff.size(); ++e)
    diff[e] = (r_hi * v_hi[e] - r_lo * v_lo[e]) / (r_hi - r_lo);
  TwoScaleAlpha out;
  out.value = mean_of(diff);
  out.se = bootstrap_se(diff, n_bootstrap,
                        CounterRng(seed).child({stream_tag::kBootstrap, 0x25}));
  return out;
}

ShapeReport shape_diagnostic(const PotentialSpec& spec, double lambda,
                             std::span<const Vec> directions,
                             std::span<const double> scales, long n_env,
                             long n_paths, std::uint64_t seed,
                             const PathConfig& path_in, int workers) {
  spec.validate();
  if (lambda < 0.0)
    throw std::invalid_argument("shape_diagnostic: lambda must be >= 0");
  if (directions.empty())
    throw std::invalid_argument("shape_diagnostic: no directions");
  require_increasing_nonnegative(scales, "shape_diagnostic scale grid");
  if (scales.size() < 2)
    throw std::invalid_argument("shape_diagnostic: need >= 2 scales");
  if (scales.front() <= 2.0)
    throw std::invalid_argument("shape_diagnostic: smallest scale must be > 2");
  if (n_env < 1 || n_paths < 1)
    throw std::invalid_argument("shape_diagnostic: n_env, n_paths >= 1");

  PathConfig path = path_in;
  path.dimension = spec.dimension;
  if (const std::string msg = path.validate_message(); !msg.empty())
    throw std::invalid_argument("shape_diagnostic: " + msg);

  ShapeReport rep;
  rep.directions.reserve(directions.size());
  for (const Vec& u : directions) {
    if (!(norm(u) > 0.0))
      throw std::invalid_argument("shape_diagnostic: zero direction");
    rep.directions.push_back(unit(u));
  }
  rep.scales.assign(scales.begin(), scales.end());

  const std::size_t nd = rep.directions.size();
  const std::size_t ns = scales.size();
  const std::size_t ne = static_cast<std::size_t>(n_env);
  const double window = curve_window(spec, scales.back(), lambda, 0.0);

  std::vector<std::vector<std::vector<double>>> a(
      ns, std::vector<std::vector<double>>(nd, std::vector<double>(ne, 0.0)));

  CounterRng master(seed);
  parallel_cells(ne, workers, [&](std::size_t e) {
    const std::uint64_t env_seed = master.child(e).key();
    const Environment env = Environment::prepare(spec, window, env_seed);
    const Vec start = vec0();
    const ShiftedEnv V{env.path_potential(start), spec.vbar()};
    for (std::size_t di = 0; di < nd; ++di) {
      for (std::size_t si = 0; si < ns; ++si) {
        const Vec target = scale(rep.directions[di], scales[si]);
        PathConfig cfg = path;
        cfg.t_max = cell_t_max(path, scales[si], lambda);
        ELambdaOptions eo;
        eo.window_radius = env.window_radius;
        const CounterRng cell_rng =
            CounterRng(env_seed).child({stream_tag::kMisc, 0x5A, di, si});
        const FunctionalEstimate fe =
            e_lambda_run(cfg, V, start, HitTarget{target, 1.0}, lambda,
                         n_paths, cell_rng, eo);
        a[si][di][e] = fe.a_hat() / scales[si];
      }
    }
  });

  rep.mean_a_over_r.assign(ns, std::vector<double>(nd, 0.0));
  rep.sem_a_over_r.assign(ns, std::vector<double>(nd, 0.0));
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t di = 0; di < nd; ++di) {
      const Summary s = summarize(a[si][di]);
      rep.mean_a_over_r[si][di] = s.mean;
      rep.sem_a_over_r[si][di] = s.std_error;
    }
  rep.alpha_by_direction = rep.mean_a_over_r.back();

  rep.deviations.resize(ns);
  for (std::size_t si = 0; si < ns; ++si) {
    ShapeDeviation& dev = rep.deviations[si];
    dev.scale = scales[si];
    for (std::size_t di = 0; di < nd; ++di) {
      std::vector<double> abs_dev(ne);
      for (std::size_t e = 0; e < ne; ++e)
        abs_dev[e] = std::fabs(a[si][di][e] - rep.alpha_by_direction[di]);
      const double m = mean_of(abs_dev);
      if (m > dev.max_deviation) {
        dev.max_deviation = m;
        dev.argmax_direction = static_cast<int>(di);
      }
    }
  }
  rep.decreasing =
      rep.deviations.back().max_deviation < rep.deviations.front().max_deviation;
  return rep;
}

double dirichlet_ball_eigenvalue(int dimension) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kJ0 = 2.404825557695773;  // first zero of Bessel J0
  switch (dimension) {
    case 1: return kPi * kPi / 8.0;
    case 2: return 0.5 * kJ0 * kJ0;
    case 3: return 0.5 * kPi * kPi;
    default:
      throw std::invalid_argument(
          "dirichlet_ball_eigenvalue: dimension must be 1, 2 or 3");
  }
}

RateFunctionReport rate_function(const RateInput& curve, double vbar,
                                 double x_norm, double lambda_d,
                                 double e_sup_v, double slack) {
  const std::size_t n = curve.lambdas.size();
  if (n < 2 || curve.alphas.size() != n)
    throw std::invalid_argument("rate_function: need >= 2 matched grid points");
  require_increasing_nonnegative(curve.lambdas, "rate_function lambda grid");
  if (vbar < 0.0)
    throw std::invalid_argument("rate_function: vbar must be >= 0");
  for (double a : curve.alphas)
    if (!std::isfinite(a))
      throw std::invalid_argument("rate_function: non-finite alpha");

  const ConcaveFit fit =
      concave_increasing_projection(curve.lambdas, curve.alphas);

  // Nodes in s = sqrt(lambda); extrapolate the first segment down to s = 0
  // (clamped at 0) so the sup ranges over the whole half-line.
  std::vector<double> s, a;
  s.reserve(n + 1);
  a.reserve(n + 1);
  if (curve.lambdas.front() > 1e-15) {
    const double s0 = std::sqrt(curve.lambdas.front());
    const double s1 = std::sqrt(curve.lambdas[1]);
    const double m = (fit.values[1] - fit.values[0]) / (s1 - s0);
    s.push_back(0.0);
    a.push_back(std::max(0.0, fit.values[0] - m * s0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(std::sqrt(curve.lambdas[i]));
    a.push_back(fit.values[i]);
  }

  // phi(s) = a(s) - s^2 on each linear segment, maximized in closed form over
  // the admissible region s >= sqrt(vbar).
  const double s_min = std::sqrt(vbar);
  double best_phi = -std::numeric_limits<double>::infinity();
  double best_s = s_min;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double lo = std::max(s[i], s_min);
    const double hi = s[i + 1];
    if (hi < lo) continue;
    const double m = (a[i + 1] - a[i]) / (s[i + 1] - s[i]);
    const double sv = std::clamp(0.5 * m, lo, hi);
    const double phi = a[i] + m * (sv - s[i]) - sv * sv;
    if (phi > best_phi) {
      best_phi = phi;
      best_s = sv;
    }
  }
  if (!std::isfinite(best_phi))
    throw std::invalid_argument(
        "rate_function: grid does not reach lambda >= vbar");

  RateFunctionReport rep;
  rep.I_hat = vbar + best_phi;
  rep.lambda_star_shifted = best_s * best_s;
  rep.lambda_star = rep.lambda_star_shifted - vbar;
  rep.projection_distance = fit.projection_distance;
  rep.right_censored = best_s >= s.back() - 1e-9;
  rep.sandwich_lower = 0.5 * x_norm * x_norm;
  rep.sandwich_upper = 0.5 * x_norm * x_norm + lambda_d + e_sup_v;
  rep.slack = slack;
  rep.within_sandwich = rep.I_hat >= rep.sandwich_lower - slack &&
                        rep.I_hat <= rep.sandwich_upper + slack;
  return rep;
}

DualValue dual_norm(std::span<const Vec> directions,
                    std::span<const double> alpha_at_lambda, const Vec& h) {
  if (directions.size() != alpha_at_lambda.size() || directions.empty())
    throw std::invalid_argument("dual_norm: mismatched direction grid");
  DualValue out;
  for (std::size_t j = 0; j < directions.size(); ++j) {
    const double d = dot(directions[j], h);
    if (d <= 1e-12) continue;
    if (alpha_at_lambda[j] <= 1e-12) {
      out.infinite = true;
      continue;
    }
    out.value = std::max(out.value, d / alpha_at_lambda[j]);
  }
  return out;
}

PhaseVerdict phase_verdict(const DirectionCurves& curves, const Vec& h,
                           double vbar, double tol_lambda) {
  const std::size_t nd = curves.directions.size();
  if (nd == 0 || curves.alpha.size() != nd)
    throw std::invalid_argument("phase_verdict: mismatched curves");
  require_increasing_nonnegative(curves.lambdas, "phase_verdict lambda grid");
  if (curves.lambdas.size() < 2)
    throw std::invalid_argument("phase_verdict: need >= 2 lambda nodes");
  for (const auto& row : curves.alpha)
    if (row.size() != curves.lambdas.size())
      throw std::invalid_argument("phase_verdict: ragged alpha table");
  if (vbar < 0.0 || vbar > curves.lambdas.back())
    throw std::invalid_argument(
        "phase_verdict: grid must reach the shifted lambda = vbar");
  if (tol_lambda <= 0.0)
    throw std::invalid_argument("phase_verdict: tol_lambda must be > 0");

  std::vector<SqrtInterp> interp;
  interp.reserve(nd);
  for (const auto& row : curves.alpha)
    interp.emplace_back(curves.lambdas, row);

  auto dual_at = [&](double lam) {
    std::vector<double> alpha(nd);
    for (std::size_t j = 0; j < nd; ++j) alpha[j] = interp[j](lam);
    return dual_norm(curves.directions, alpha, h);
  };
  auto exceeds_one = [](const DualValue& d) {
    return d.infinite || d.value > 1.0;
  };

  PhaseVerdict verdict;
  verdict.h = h;
  const DualValue at_zero = dual_at(vbar);
  verdict.dual_at_zero = at_zero.value;
  verdict.dual_at_zero_infinite = at_zero.infinite;
  verdict.ballistic = exceeds_one(at_zero);
  if (!verdict.ballistic) {
    verdict.lambda_h = 0.0;
    return verdict;
  }

  double lo = vbar, hi = curves.lambdas.back();
  if (exceeds_one(dual_at(hi))) {
    verdict.undetermined = true;
    verdict.censor_low = hi - vbar;
    return verdict;
  }
  for (int it = 0; it < 200 && hi - lo > tol_lambda; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (exceeds_one(dual_at(mid)))
      lo = mid;
    else
      hi = mid;
  }
  verdict.lambda_h = 0.5 * (lo + hi) - vbar;
  return verdict;
}

std::vector<EndpointRate> endpoint_ldp_check(const PotentialSpec& spec,
                                             std::uint64_t env_seed,
                                             const Vec& v, double radius,
                                             std::span<const double> t_grid,
                                             long n_paths,
                                             const PathConfig& path_in) {
  spec.validate();
  if (radius <= 0.0)
    throw std::invalid_argument("endpoint_ldp_check: radius must be > 0");
  require_increasing_nonnegative(t_grid, "endpoint_ldp_check time grid");
  if (t_grid.front() <= 0.0)
    throw std::invalid_argument("endpoint_ldp_check: times must be > 0");
  if (n_paths < 2)
    throw std::invalid_argument("endpoint_ldp_check: n_paths must be >= 2");

  PathConfig path = path_in;
  path.dimension = spec.dimension;
  if (const std::string msg = path.validate_message(); !msg.empty())
    throw std::invalid_argument("endpoint_ldp_check: " + msg);

  const int d = spec.dimension;
  const double t_max = t_grid.back();
  const double window =
      (spec.family == Family::Zero || spec.family == Family::Constant)
          ? 0.0
          : t_max * (norm(v) + radius) + 6.0 * std::sqrt(t_max) + 3.0;
  const Environment env = Environment::prepare(spec, window, env_seed);
  const ShiftedEnv V{env.path_potential(vec0()), spec.vbar()};

  const std::size_t n_t = t_grid.size();
  std::vector<std::vector<double>> num(n_t, std::vector<double>(n_paths, 0.0));
  std::vector<std::vector<double>> den(n_t, std::vector<double>(n_paths, 0.0));
  std::vector<long> inside(n_t, 0);
  long violations = 0;

  for (long p = 0; p < n_paths; ++p) {
    CounterRng rng = CounterRng(env_seed).child(
        {stream_tag::kPath, 0xED, static_cast<std::uint64_t>(p)});
    Vec z = vec0();
    double t = 0.0, integral = 0.0, glw = 0.0;
    double v0 = V(z);
    bool frozen = false;
    for (std::size_t g = 0; g < n_t; ++g) {
      while (t < t_grid[g] - 1e-12 && !frozen) {
        const double dt_s = std::min(path.dt, t_grid[g] - t);
        const double sdt = std::sqrt(dt_s);
        Vec znew = z;
        for (int k = 0; k < d; ++k)
          znew[k] += v[k] * dt_s + sdt * rng.next_normal();
        if (env.window_radius > 0.0 && norm(znew) > env.window_radius) {
          frozen = true;
          ++violations;
          break;
        }
        const double v1 = V(znew);
        integral += 0.5 * (v0 + v1) * dt_s;
        glw += -dot(v, sub(znew, z)) + 0.5 * norm2(v) * dt_s;
        t += dt_s;
        z = znew;
        v0 = v1;
      }
      const double w = std::exp(-integral + glw);
      den[g][p] = w;
      if (dist(z, scale(v, t_grid[g])) <= t_grid[g] * radius) {
        num[g][p] = w;
        ++inside[g];
      }
    }
  }

  std::vector<EndpointRate> out(n_t);
  for (std::size_t g = 0; g < n_t; ++g) {
    EndpointRate& r = out[g];
    r.t = t_grid[g];
    r.numerator = mean_of(num[g]);
    r.denominator = mean_of(den[g]);
    r.n_inside = inside[g];
    r.n_window_violations = violations;
    r.rate = r.numerator > 0.0 && r.denominator > 0.0
                 ? std::log(r.numerator / r.denominator) / r.t
                 : -std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace rplab
