// pybind11 surface for the rp-lab core: potential families and clouds,
// quenched Monte Carlo functionals, lattice eigenvalues, Lyapunov curves with
// their rate-function and phase reports, and the experiment driver.
//
// Reports cross the boundary as plain dicts (read-only result bundles);
// configuration objects (PotentialSpec, PathConfig, ExperimentConfig) are
// bound as mutable classes so Python callers can build them incrementally.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rplab/environment.hpp"
#include "rplab/experiment.hpp"
#include "rplab/feynman_kac.hpp"
#include "rplab/lyapunov.hpp"
#include "rplab/potentials.hpp"
#include "rplab/rng.hpp"
#include "rplab/spectrum.hpp"
#include "rplab/stats.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace rplab;

namespace {

// Positions cross the boundary as length-d sequences (length 3 also accepted,
// matching the padded storage convention).
Vec to_vec(py::handle obj, int d) {
  const auto seq = py::cast<std::vector<double>>(obj);
  if (seq.size() != static_cast<std::size_t>(d) && seq.size() != 3)
    throw std::invalid_argument("expected a length-" + std::to_string(d) +
                                " position, got length " +
                                std::to_string(seq.size()));
  Vec v = vec0();
  for (std::size_t k = 0; k < seq.size() && k < 3; ++k) v[k] = seq[k];
  return v;
}

py::list vec_to_list(const Vec& v, int d) {
  py::list out;
  for (int k = 0; k < d; ++k) out.append(v[k]);
  return out;
}

py::dict functional_dict(const FunctionalEstimate& e, int d) {
  return py::dict(
      "value"_a = e.value, "log_value"_a = e.log_value, "a_hat"_a = e.a_hat(),
      "std_error"_a = e.std_error, "n_paths"_a = e.n_paths,
      "n_hits"_a = e.n_hits, "n_window_violations"_a = e.n_window_violations,
      "upper_bound_only"_a = e.upper_bound_only,
      "neglected_mass_bound"_a = e.neglected_mass_bound,
      "tilt"_a = vec_to_list(e.tilt_drift, d));
}

PathConfig make_path(int dimension, double dt, double t_max) {
  PathConfig cfg;
  cfg.dimension = dimension;
  cfg.dt = dt;
  cfg.t_max = t_max;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Simulation and estimation laboratory for Brownian motion in "
      "stationary random potentials";

  // -------------------------------------------------------------------------
  // Potential families.
  // -------------------------------------------------------------------------
  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_static("zero", &PotentialSpec::zero, "d"_a)
      .def_static("constant", &PotentialSpec::constant, "d"_a, "level"_a)
      .def_static("lacoin", &PotentialSpec::lacoin, "d"_a, "gamma"_a,
                  "delta"_a)
      .def_static("polytail", &PotentialSpec::polytail, "d"_a, "gamma"_a,
                  "c9"_a)
      .def_static("ruess", &PotentialSpec::ruess, "nu"_a, "m"_a, "M"_a,
                  "halfwidth"_a)
      .def_property_readonly(
          "family", [](const PotentialSpec& s) { return family_name(s.family); })
      .def_readonly("dimension", &PotentialSpec::dimension)
      .def_readonly("gamma", &PotentialSpec::gamma)
      .def_readonly("delta", &PotentialSpec::delta)
      .def_readonly("c9", &PotentialSpec::c9)
      .def_readonly("nu", &PotentialSpec::nu)
      .def_readonly("m", &PotentialSpec::m)
      .def_readonly("M", &PotentialSpec::M)
      .def_readonly("line_halfwidth", &PotentialSpec::line_halfwidth)
      .def_readonly("c", &PotentialSpec::c)
      .def_property_readonly("vbar",
                             [](const PotentialSpec& s) { return s.vbar(); })
      .def("validate", &PotentialSpec::validate)
      .def("validate_message", &PotentialSpec::validate_message)
      .def("__repr__", [](const PotentialSpec& s) {
        std::ostringstream os;
        os << "PotentialSpec(" << family_name(s.family) << ", d=" << s.dimension
           << ")";
        return os.str();
      });

  m.def(
      "closed_form_moments",
      [](int d, double gamma, double delta) {
        const Moments mo = closed_form_moments(d, gamma, delta);
        return py::dict("mean"_a = mo.mean, "variance"_a = mo.variance);
      },
      "d"_a, "gamma"_a, "delta"_a,
      "Stationary mean and variance of the ball-cloud potential.");
  m.def("exp_moment_log", &exp_moment_log, "d"_a, "gamma"_a, "delta"_a, "s"_a,
        "R"_a,
        "log E exp(s * halo sum of ball weights reaching B(0, R)).");
  m.def("covariance_exact", &lacoin_covariance_exact, "d"_a, "gamma"_a,
        "delta"_a, "distance"_a,
        "Exact two-point covariance of the ball-cloud potential.");
  m.def(
      "truncation_radius",
      [](const PotentialSpec& spec, double eps, double R0, double p) {
        TruncationPolicy policy;
        policy.target_sup_error = eps;
        policy.evaluation_radius = R0;
        policy.failure_probability = p;
        return truncation_radius(policy, spec);
      },
      "spec"_a, "eps"_a = 0.01, "R0"_a = 5.0, "p"_a = 1e-6,
      "Cloud radius beyond which far centers perturb B(0, R0) by more than "
      "eps only with probability <= p.");
  m.def("expected_cloud_size", &expected_cloud_size, "spec"_a,
        "window_radius"_a, "mark_cutoff"_a = 0.0);

  // -------------------------------------------------------------------------
  // Sampled environments.
  // -------------------------------------------------------------------------
  py::class_<Environment>(m, "Environment",
                          "One sampled environment: a point cloud plus its "
                          "indexed evaluation machinery.  Deterministic "
                          "families carry an empty cloud and no window guard.")
      .def(py::init([](const PotentialSpec& spec, double window_radius,
                       std::uint64_t seed) {
             spec.validate();
             return Environment::prepare(spec, window_radius, seed);
           }),
           "spec"_a, "window_radius"_a, "seed"_a)
      .def_property_readonly("spec",
                             [](const Environment& e) { return e.spec; })
      .def_property_readonly("seed",
                             [](const Environment& e) { return e.seed; })
      .def_property_readonly(
          "window_radius", [](const Environment& e) { return e.window_radius; })
      .def_property_readonly(
          "cloud_size", [](const Environment& e) { return e.cloud.size(); })
      .def(
          "eval",
          [](const Environment& e, py::handle x) {
            return e.eval(to_vec(x, e.spec.dimension));
          },
          "x"_a, "Exact pointwise value (window-checked).")
      .def(
          "eval_many",
          [](const Environment& e, py::array_t<double, py::array::c_style |
                                                           py::array::forcecast>
                 pts) {
            const int d = e.spec.dimension;
            if (pts.ndim() != 2 || pts.shape(1) != d)
              throw std::invalid_argument("expected an (n, d) array");
            py::array_t<double> out(pts.shape(0));
            auto r = pts.unchecked<2>();
            auto w = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < pts.shape(0); ++i) {
              Vec v = vec0();
              for (int k = 0; k < d; ++k) v[k] = r(i, k);
              w(i) = e.eval(v);
            }
            return out;
          },
          "points"_a, "Vectorized eval over an (n, d) array of positions.")
      .def(
          "sup_on_ball",
          [](const Environment& e, py::handle center, double radius,
             double step) {
            return e.field->sup_on_ball(to_vec(center, e.spec.dimension),
                                        radius, step);
          },
          "center"_a, "radius"_a, "step"_a = 0.05,
          "Lattice-scan lower bound of sup V over a ball.");

  // -------------------------------------------------------------------------
  // Monte Carlo functionals.
  // -------------------------------------------------------------------------
  m.def(
      "survival_curve",
      [](const Environment& env, std::vector<double> t_grid, long n_paths,
         std::uint64_t seed, double dt, double window_radius) {
        PathConfig cfg = make_path(env.spec.dimension, dt,
                                   t_grid.empty() ? 1.0 : t_grid.back());
        const EnvPotential V = env.path_potential(vec0());
        const auto curve = survival_curve(cfg, V, t_grid, n_paths,
                                          CounterRng(seed), window_radius);
        py::list out;
        for (std::size_t g = 0; g < curve.size(); ++g) {
          py::dict row = functional_dict(curve[g], cfg.dimension);
          row["t"] = t_grid[g];
          out.append(row);
        }
        return out;
      },
      "env"_a, "t_grid"_a, "n_paths"_a, "seed"_a, "dt"_a = 1e-3,
      "window_radius"_a = 0.0,
      "Quenched survival weights E[exp(-int V)] on a time grid (common "
      "random numbers across the grid).");

  m.def(
      "decay_rate",
      [](std::vector<double> t_grid, std::vector<double> survival) {
        if (t_grid.size() != survival.size())
          throw std::invalid_argument("t_grid and survival differ in length");
        std::vector<FunctionalEstimate> curve(survival.size());
        for (std::size_t i = 0; i < survival.size(); ++i) {
          curve[i].value = survival[i];
          curve[i].log_value = survival[i] > 0.0
                                   ? std::log(survival[i])
                                   : -std::numeric_limits<double>::infinity();
        }
        const DecayRate r = decay_rate_fit(t_grid, curve);
        return py::dict("slope"_a = r.slope, "slope_se"_a = r.slope_se,
                        "intercept"_a = r.intercept);
      },
      "t_grid"_a, "survival"_a,
      "Least-squares slope of -log S_t versus t (>= 4 grid points).");

  m.def(
      "hitting_functional",
      [](const Environment& env, py::handle start, py::handle target_center,
         double lam, long n_paths, std::uint64_t seed, double dt, double t_max,
         double target_radius, double window_radius, py::object tilt) {
        const int d = env.spec.dimension;
        const Vec s = to_vec(start, d);
        const Vec tc = to_vec(target_center, d);
        const PathConfig cfg = make_path(d, dt, t_max);
        const EnvPotential V = env.path_potential(s);
        ELambdaOptions opt;
        opt.window_radius = window_radius;
        if (!tilt.is_none()) {
          opt.tilt = to_vec(tilt, d);
          opt.tilt_is_set = true;
        }
        const FunctionalEstimate e =
            e_lambda_run(cfg, V, s, HitTarget{tc, target_radius}, lam, n_paths,
                         CounterRng(seed), opt);
        return functional_dict(e, d);
      },
      "env"_a, "start"_a, "target_center"_a, "lam"_a, "n_paths"_a, "seed"_a,
      "dt"_a = 1e-2, "t_max"_a = 100.0, "target_radius"_a = 1.0,
      "window_radius"_a = 0.0, "tilt"_a = py::none(),
      "Importance-sampled e_lambda(start -> target ball); a_hat = -log of "
      "the estimate.");

  m.def(
      "metric_d",
      [](const Environment& env, py::handle x, py::handle y, int n_start,
         long n_paths, std::uint64_t seed, double dt, double t_max,
         double window_radius) {
        const int d = env.spec.dimension;
        const Vec vx = to_vec(x, d), vy = to_vec(y, d);
        const PathConfig cfg = make_path(d, dt, t_max);
        const EnvPotential V =
            env.path_potential(scale(add(vx, vy), 0.5));
        ELambdaOptions opt;
        opt.window_radius = window_radius;
        const MetricEstimate me = metric_d_run(cfg, V, vx, vy, n_start,
                                               n_paths, CounterRng(seed), opt);
        return py::dict("value"_a = me.value, "std_error"_a = me.std_error,
                        "term_xy"_a = me.term_xy, "term_yx"_a = me.term_yx,
                        "censored"_a = me.censored);
      },
      "env"_a, "x"_a, "y"_a, "n_start"_a = 3, "n_paths"_a = 400, "seed"_a = 1,
      "dt"_a = 1e-2, "t_max"_a = 100.0, "window_radius"_a = 0.0,
      "Point-to-point metric d(x, y): the worse of the two travel "
      "directions' worst-start hitting costs (needs |x - y| > 2).");

  m.def(
      "green_density",
      [](const Environment& env, py::handle start, py::handle cell_center,
         double halfwidth, long n_paths, double lambda_floor,
         std::uint64_t seed, double dt, double t_max, double window_radius) {
        const int d = env.spec.dimension;
        const Vec s = to_vec(start, d);
        BoxCell cell;
        cell.center = to_vec(cell_center, d);
        cell.halfwidth = halfwidth;
        const PathConfig cfg = make_path(d, dt, t_max);
        const EnvPotential V = env.path_potential(s);
        const GreenEstimate g = green_run(cfg, V, s, cell, n_paths,
                                          lambda_floor, CounterRng(seed),
                                          window_radius);
        return py::dict("value"_a = g.value, "raw_mass"_a = g.raw_mass,
                        "std_error"_a = g.std_error, "n_paths"_a = g.n_paths,
                        "lambda_floor"_a = g.lambda_floor,
                        "tail_fraction"_a = g.tail_fraction,
                        "n_window_violations"_a = g.n_window_violations);
      },
      "env"_a, "start"_a, "cell_center"_a, "halfwidth"_a = 0.25,
      "n_paths"_a = 2000, "lambda_floor"_a = 0.0, "seed"_a = 1, "dt"_a = 1e-2,
      "t_max"_a = 100.0, "window_radius"_a = 0.0,
      "Horizon-truncated occupation density of the killed process averaged "
      "over a box cell.");

  // -------------------------------------------------------------------------
  // Lyapunov exponents, rate function, phase diagram.
  // -------------------------------------------------------------------------
  m.def(
      "direction_grid",
      [](int d) {
        py::list out;
        for (const Vec& u : direction_grid(d)) out.append(vec_to_list(u, d));
        return out;
      },
      "d"_a, "Quasi-uniform unit directions used by shape/phase reports.");
  m.def("dirichlet_ball_eigenvalue", &dirichlet_ball_eigenvalue, "d"_a,
        "Principal Dirichlet eigenvalue of -(1/2) Laplacian on the unit "
        "ball.");

  m.def(
      "lyapunov_curve",
      [](const PotentialSpec& spec, py::handle x,
         std::vector<double> lambda_grid, std::vector<double> scales,
         long n_paths, long n_env, std::uint64_t seed, double dt, double t_max,
         std::vector<long> n_paths_by_scale, int n_bootstrap, int workers,
         double window_margin) {
        spec.validate();
        CurveOptions opt;
        opt.scales = std::move(scales);
        opt.n_paths = n_paths;
        opt.n_paths_by_scale = std::move(n_paths_by_scale);
        opt.n_env = n_env;
        opt.seed = seed;
        opt.path = make_path(spec.dimension, dt, t_max);
        opt.n_bootstrap = n_bootstrap;
        opt.workers = workers;
        opt.window_margin = window_margin;
        const LyapunovCurve c = estimate_curve(
            spec, to_vec(x, spec.dimension), lambda_grid, opt);
        py::list by_lambda;
        for (const AlphaEstimate& a : c.by_lambda) {
          py::list by_scale;
          for (const ScaleEstimate& s : a.by_scale)
            by_scale.append(py::dict(
                "scale"_a = s.scale, "mean"_a = s.mean, "se"_a = s.se,
                "n_paths"_a = s.n_paths, "hit_fraction"_a = s.hit_fraction,
                "n_window_violations"_a = s.n_window_violations,
                "n_censored"_a = s.n_censored));
          by_lambda.append(py::dict(
              "lam"_a = a.lambda, "alpha_hat"_a = a.alpha_hat, "se"_a = a.se,
              "monotone_ok"_a = a.monotone_ok, "by_scale"_a = by_scale));
        }
        return py::dict("x"_a = vec_to_list(c.x, spec.dimension),
                        "vbar"_a = c.vbar, "lambdas"_a = c.lambdas,
                        "by_lambda"_a = by_lambda);
      },
      "spec"_a, "x"_a, "lambda_grid"_a,
      "scales"_a = std::vector<double>{8.0, 16.0, 32.0}, "n_paths"_a = 2000,
      "n_env"_a = 10, "seed"_a = 1, "dt"_a = 1e-2, "t_max"_a = 100.0,
      "n_paths_by_scale"_a = std::vector<long>{}, "n_bootstrap"_a = 200,
      "workers"_a = 1, "window_margin"_a = 0.0,
      "alpha_lambda(x) on a killing-rate grid: a(0, r x)/r on an increasing "
      "scale grid, averaged over environments (shifted by the declared "
      "essential infimum of V).");

  m.def(
      "rate_function",
      [](std::vector<double> lambdas, std::vector<double> alphas,
         std::vector<double> ses, double vbar, double x_norm, double lambda_d,
         double e_sup_v, double slack) {
        RateInput in;
        in.lambdas = std::move(lambdas);
        in.alphas = std::move(alphas);
        in.ses = std::move(ses);
        const RateFunctionReport r =
            rate_function(in, vbar, x_norm, lambda_d, e_sup_v, slack);
        return py::dict(
            "I_hat"_a = r.I_hat, "lambda_star"_a = r.lambda_star,
            "lambda_star_shifted"_a = r.lambda_star_shifted,
            "projection_distance"_a = r.projection_distance,
            "right_censored"_a = r.right_censored,
            "sandwich_lower"_a = r.sandwich_lower,
            "sandwich_upper"_a = r.sandwich_upper,
            "within_sandwich"_a = r.within_sandwich, "slack"_a = r.slack);
      },
      "lambdas"_a, "alphas"_a, "ses"_a = std::vector<double>{}, "vbar"_a = 0.0,
      "x_norm"_a = 1.0, "lambda_d"_a = 0.0, "e_sup_v"_a = 0.0, "slack"_a = 0.1,
      "I(x) = sup_lambda (alpha_lambda(x) - lambda) with concave projection "
      "and sqrt-interpolation, plus the sandwich verdict.");

  m.def(
      "phase_verdict",
      [](py::sequence directions, std::vector<double> lambdas,
         py::sequence alpha, py::handle h, double vbar, double tol_lambda,
         int d) {
        DirectionCurves curves;
        for (py::handle u : directions)
          curves.directions.push_back(to_vec(u, d));
        curves.lambdas = std::move(lambdas);
        for (py::handle row : alpha)
          curves.alpha.push_back(py::cast<std::vector<double>>(row));
        const PhaseVerdict v =
            phase_verdict(curves, to_vec(h, d), vbar, tol_lambda);
        return py::dict("h"_a = vec_to_list(v.h, d),
                        "dual_at_zero"_a = v.dual_at_zero,
                        "dual_at_zero_infinite"_a = v.dual_at_zero_infinite,
                        "ballistic"_a = v.ballistic,
                        "undetermined"_a = v.undetermined,
                        "lambda_h"_a = v.lambda_h,
                        "censor_low"_a = v.censor_low);
      },
      "directions"_a, "lambdas"_a, "alpha"_a, "h"_a, "vbar"_a = 0.0,
      "tol_lambda"_a = 1e-4, "d"_a = 2,
      "Ballistic/sub-ballistic verdict for a constant drift h from "
      "direction-resolved alpha curves; lambda_h solves dual(h) = 1.");

  m.def(
      "shape_diagnostic",
      [](const PotentialSpec& spec, double lam, std::vector<double> scales,
         long n_env, long n_paths, std::uint64_t seed, double dt,
         double t_max, int workers) {
        spec.validate();
        const std::vector<Vec> dirs = direction_grid(spec.dimension);
        const PathConfig cfg = make_path(spec.dimension, dt, t_max);
        const ShapeReport rep = shape_diagnostic(
            spec, lam, dirs, scales, n_env, n_paths, seed, cfg, workers);
        py::list devs;
        for (const ShapeDeviation& dv : rep.deviations)
          devs.append(py::dict("scale"_a = dv.scale,
                               "max_deviation"_a = dv.max_deviation,
                               "argmax_direction"_a = dv.argmax_direction));
        py::list dirs_out;
        for (const Vec& u : rep.directions)
          dirs_out.append(vec_to_list(u, spec.dimension));
        return py::dict("directions"_a = dirs_out, "scales"_a = rep.scales,
                        "mean_a_over_r"_a = rep.mean_a_over_r,
                        "sem_a_over_r"_a = rep.sem_a_over_r,
                        "alpha_by_direction"_a = rep.alpha_by_direction,
                        "deviations"_a = devs,
                        "decreasing"_a = rep.decreasing);
      },
      "spec"_a, "lam"_a, "scales"_a, "n_env"_a, "n_paths"_a, "seed"_a = 1,
      "dt"_a = 1e-2, "t_max"_a = 100.0, "workers"_a = 1,
      "Directional convergence of a(0, r u)/r toward alpha(u) across "
      "scales.");

  m.def(
      "endpoint_ldp_check",
      [](const PotentialSpec& spec, std::uint64_t env_seed, py::handle v,
         double radius, std::vector<double> t_grid, long n_paths, double dt) {
        spec.validate();
        const PathConfig cfg = make_path(
            spec.dimension, dt, t_grid.empty() ? 1.0 : t_grid.back());
        const auto rates =
            endpoint_ldp_check(spec, env_seed, to_vec(v, spec.dimension),
                               radius, t_grid, n_paths, cfg);
        py::list out;
        for (const EndpointRate& r : rates)
          out.append(py::dict("t"_a = r.t, "rate"_a = r.rate,
                              "numerator"_a = r.numerator,
                              "denominator"_a = r.denominator,
                              "n_inside"_a = r.n_inside,
                              "n_window_violations"_a =
                                  r.n_window_violations));
        return out;
      },
      "spec"_a, "env_seed"_a, "v"_a, "radius"_a, "t_grid"_a,
      "n_paths"_a = 2000, "dt"_a = 1e-2,
      "Empirical endpoint rates (1/t) log Q_t(Z_t in t B(v, r)) on a time "
      "grid.");

  // -------------------------------------------------------------------------
  // Spectrum.
  // -------------------------------------------------------------------------
  m.def(
      "principal_eigenvalue",
      [](const Environment& env, double R, double h, double tol,
         int max_outer) {
        const GridProblem gp =
            GridProblem::build(env.spec.dimension, R, h,
                               [&](const Vec& z) { return env.eval(z); });
        const EigenResult r = principal_eigenvalue(gp, tol, max_outer);
        return py::dict("lam"_a = r.lambda, "residual"_a = r.residual,
                        "iterations"_a = r.iterations,
                        "perron_ok"_a = r.perron_ok,
                        "n_nodes"_a = gp.n_nodes);
      },
      "env"_a, "R"_a, "h"_a, "tol"_a = 1e-10, "max_outer"_a = 200,
      "Smallest Dirichlet eigenvalue of -(1/2) Laplacian + V on B(0, R), "
      "lattice spacing h (the environment window must cover R).");

  m.def(
      "lambda_v_limit",
      [](const PotentialSpec& spec, std::vector<double> R_grid,
         std::vector<std::uint64_t> seeds, double h, int workers) {
        spec.validate();
        const LambdaVReport rep =
            lambda_V_limit(spec, R_grid, seeds, h, workers);
        py::list per_env;
        for (const LambdaVSequence& seq : rep.per_env) {
          py::list pts;
          for (const LambdaVPoint& p : seq.points)
            pts.append(py::dict("R"_a = p.R, "lambda_hat"_a = p.lambda_hat,
                                "residual"_a = p.residual,
                                "iterations"_a = p.iterations));
          per_env.append(py::dict("env_seed"_a = seq.env_seed,
                                  "points"_a = pts,
                                  "non_increasing"_a = seq.non_increasing));
        }
        return py::dict("per_env"_a = per_env, "mean_by_R"_a = rep.mean_by_R,
                        "limit_extrapolated"_a = rep.limit_extrapolated,
                        "limit_last"_a = rep.limit_last,
                        "spread_last"_a = rep.spread_last);
      },
      "spec"_a, "R_grid"_a, "seeds"_a, "h"_a = 0.0625, "workers"_a = 1,
      "Per-environment principal-eigenvalue sequences on a growing ball "
      "grid, with the guarded extrapolation of the mean sequence.");

  // -------------------------------------------------------------------------
  // Experiment driver.
  // -------------------------------------------------------------------------
  py::class_<PathConfig>(m, "PathConfig")
      .def(py::init<>())
      .def_readwrite("dimension", &PathConfig::dimension)
      .def_readwrite("dt", &PathConfig::dt)
      .def_readwrite("t_max", &PathConfig::t_max);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_property(
          "kind",
          [](const ExperimentConfig& c) { return experiment_kind_name(c.kind); },
          [](ExperimentConfig& c, const std::string& name) {
            c.kind = experiment_kind_from_name(name);
          })
      .def_readwrite("potential", &ExperimentConfig::potential)
      .def_readwrite("path", &ExperimentConfig::path)
      .def_readwrite("n_env", &ExperimentConfig::n_env)
      .def_readwrite("n_paths", &ExperimentConfig::n_paths)
      .def_readwrite("t_grid", &ExperimentConfig::t_grid)
      .def_readwrite("lambda_grid", &ExperimentConfig::lambda_grid)
      .def_readwrite("scales", &ExperimentConfig::scales)
      .def_readwrite("R_grid", &ExperimentConfig::R_grid)
      .def_readwrite("lam", &ExperimentConfig::lambda)
      .def_readwrite("mesh_h", &ExperimentConfig::mesh_h)
      .def_property(
          "x",
          [](const ExperimentConfig& c) {
            return vec_to_list(c.x, c.potential.dimension);
          },
          [](ExperimentConfig& c, py::handle v) {
            c.x = to_vec(v, c.potential.dimension);
          })
      .def_property(
          "h_vec",
          [](const ExperimentConfig& c) {
            return vec_to_list(c.h_vec, c.potential.dimension);
          },
          [](ExperimentConfig& c, py::handle v) {
            c.h_vec = to_vec(v, c.potential.dimension);
          })
      .def_readwrite("ball_radius", &ExperimentConfig::ball_radius)
      .def_readwrite("slack", &ExperimentConfig::slack)
      .def_readwrite("n_bootstrap", &ExperimentConfig::n_bootstrap)
      .def_readwrite("dump_paths", &ExperimentConfig::dump_paths)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir);

  m.def(
      "validate_config",
      [](const ExperimentConfig& c) {
        py::list out;
        for (const ConfigViolation& v : validate(c))
          out.append(py::make_tuple(v.field, v.message));
        return out;
      },
      "config"_a,
      "Every invariant violation across the config graph; empty iff "
      "runnable.");
  m.def(
      "run_experiment",
      [](const ExperimentConfig& c) {
        const auto violations = validate(c);
        if (!violations.empty()) {
          std::ostringstream os;
          os << "invalid config:";
          for (const ConfigViolation& v : violations)
            os << " [" << v.field << "] " << v.message;
          throw std::invalid_argument(os.str());
        }
        return run(c);
      },
      "config"_a,
      "Run the experiment, writing CSV/JSON artifacts plus a manifest into "
      "config.out_dir; returns the artifact names.");
  m.def("config_echo", &config_echo, "config"_a,
        "Canonical sorted key=value echo (the manifest hash input).");
}
