#include "rplab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rplab/csvio.hpp"
#include "rplab/environment.hpp"
#include "rplab/feynman_kac.hpp"
#include "rplab/lyapunov.hpp"
#include "rplab/parallel.hpp"
#include "rplab/rng.hpp"
#include "rplab/spectrum.hpp"
#include "rplab/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rplab {
namespace {

bool is_sampled(const PotentialSpec& spec) {
  return spec.family != Family::Zero && spec.family != Family::Constant;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

std::string join_list(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt_g17(xs[i]);
  }
  return s;
}

std::string join_vec(const Vec& v, int d) {
  std::string s;
  for (int i = 0; i < d; ++i) {
    if (i) s += ',';
    s += fmt_g17(v[i]);
  }
  return s;
}

json vec_json(const Vec& v, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(v[i]);
  return a;
}

// Closed-form stationary mean/variance of V(0) per family.
Moments family_moments(const PotentialSpec& spec) {
  switch (spec.family) {
    case Family::Zero: return {0.0, 0.0};
    case Family::Constant: return {spec.c, 0.0};
    case Family::Lacoin:
      return closed_form_moments(spec.dimension, spec.gamma, spec.delta);
    case Family::PolyTail: {
      const double ld = unit_ball_volume(spec.dimension);
      const double d = spec.dimension;
      const double mean = spec.c9 * ld * spec.gamma / (spec.gamma - d);
      const double var =
          spec.c9 * spec.c9 * ld * 2.0 * spec.gamma / (2.0 * spec.gamma - d);
      return {mean, var};
    }
    case Family::Ruess: {
      const double p_far = std::exp(-2.0 * spec.nu * spec.line_halfwidth);
      const double mean = spec.m * (1.0 - p_far) + spec.M * p_far;
      const double var =
          (spec.M - spec.m) * (spec.M - spec.m) * p_far * (1.0 - p_far);
      return {mean, var};
    }
  }
  return {0.0, 0.0};
}

void check_grid(std::vector<ConfigViolation>& out, std::span<const double> g,
                const char* field, bool positive) {
  if (g.empty()) {
    out.push_back({field, "grid must be non-empty"});
    return;
  }
  if (positive && g.front() <= 0.0)
    out.push_back({field, "grid values must be > 0"});
  if (!positive && g.front() < 0.0)
    out.push_back({field, "grid values must be >= 0"});
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (g[i] >= g[i + 1]) {
      out.push_back({field, "grid must be strictly increasing"});
      break;
    }
}

// ---------------------------------------------------------------------------
// Per-kind runners.  Each appends artifact file names it wrote.
// ---------------------------------------------------------------------------

struct RunContext {
  const ExperimentConfig& cfg;
  fs::path dir;
  std::vector<std::string> artifacts;
  json notes;  // free-form extras folded into the manifest

  void write_csv(const std::string& name, CsvFile& file) {
    file.flush();
    artifacts.push_back(name);
  }
  void write_json(const std::string& name, const json& j) {
    write_text_file((dir / name).string(), j.dump(2) + "\n");
    artifacts.push_back(name);
  }
};

std::vector<std::string> fk_header(int d) {
  std::vector<std::string> h = {"quantity"};
  for (int i = 1; i <= d; ++i) h.push_back("x" + std::to_string(i));
  h.insert(h.end(), {"lambda", "value", "log_value", "stderr", "n_paths",
                     "env_seed"});
  return h;
}

void run_potential_stats(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PotentialSpec& spec = cfg.potential;
  const long ne = cfg.n_env;
  std::vector<double> v0(ne, 0.0);
  CounterRng master(cfg.seed);

  if (is_sampled(spec)) {
    parallel_cells(static_cast<std::size_t>(ne), cfg.workers,
                   [&](std::size_t e) {
                     const std::uint64_t s = master.child(e).key();
                     const PointCloud cloud = sample_cloud(spec, 1.0, s);
                     v0[e] = eval_potential(spec, cloud, vec0());
                   });
  } else {
    std::fill(v0.begin(), v0.end(),
              spec.family == Family::Constant ? spec.c : 0.0);
  }

  const Summary s = summarize(v0);
  const Moments closed = family_moments(spec);
  // Normal-approximation standard error of the sample variance.
  double m4 = 0.0;
  for (double v : v0) m4 += std::pow(v - s.mean, 4);
  m4 /= static_cast<double>(ne);
  const double se_var =
      std::sqrt(std::max(0.0, m4 - s.var * s.var) / static_cast<double>(ne));

  CsvFile csv((ctx.dir / "potential_stats.csv").string());
  csv.row({"stat", "empirical", "closed_form", "stderr", "n_env"});
  csv.row({"mean", fmt_g17(s.mean), fmt_g17(closed.mean), fmt_g17(s.std_error),
           std::to_string(ne)});
  csv.row({"variance", fmt_g17(s.var), fmt_g17(closed.variance),
           fmt_g17(se_var), std::to_string(ne)});
  ctx.write_csv("potential_stats.csv", csv);

  // One example cloud with its sidecar manifest.
  if (is_sampled(spec)) {
    const std::uint64_t s0 = master.child(std::uint64_t{0}).key();
    const PointCloud cloud = sample_cloud(spec, 1.0, s0);
    CsvFile ccsv((ctx.dir / "cloud.csv").string());
    std::vector<std::string> head;
    for (int i = 1; i <= spec.dimension; ++i)
      head.push_back("x" + std::to_string(i));
    head.push_back("r");
    ccsv.row(head);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::vector<std::string> row;
      for (int k = 0; k < spec.dimension; ++k)
        row.push_back(fmt_g17(cloud.centers[i][k]));
      row.push_back(cloud.marks.empty() ? "" : fmt_g17(cloud.marks[i]));
      ccsv.row(row);
    }
    ctx.write_csv("cloud.csv", ccsv);

    json side;
    side["family"] = family_name(spec.family);
    side["params"] = {{"d", spec.dimension},     {"gamma", spec.gamma},
                      {"delta", spec.delta},     {"c9", spec.c9},
                      {"nu", spec.nu},           {"m", spec.m},
                      {"M", spec.M},             {"halfwidth", spec.line_halfwidth}};
    side["window_radius"] = cloud.window_radius;
    side["seed"] = cloud.seed;
    side["truncation"] = {{"mark_cutoff", cloud.mark_cutoff},
                          {"halo", cloud.halo}};
    ctx.write_json("cloud.json", side);
  }
}

void run_survival(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PotentialSpec& spec = cfg.potential;
  const int d = spec.dimension;
  PathConfig path = cfg.path;
  path.dimension = d;
  const double t_max = cfg.t_grid.back();
  path.t_max = std::max(path.t_max, t_max);

  const double window =
      is_sampled(spec)
          ? norm(path.drift) * t_max + 6.0 * std::sqrt(t_max) + 3.0
          : 0.0;
  const std::uint64_t env_seed = CounterRng(cfg.seed).child(std::uint64_t{0}).key();
  const Environment env = Environment::prepare(spec, window, env_seed);
  const EnvPotential V = env.path_potential(vec0());

  const std::vector<FunctionalEstimate> curve =
      survival_curve(path, V, cfg.t_grid, cfg.n_paths,
                     CounterRng(env_seed).child({stream_tag::kMisc, 0x51}),
                     env.window_radius);

  CsvFile csv((ctx.dir / "survival.csv").string());
  csv.row(fk_header(d));
  // Survival rows start at the origin; the lambda column carries the grid
  // time (the format has one numeric index slot per row).
  for (std::size_t g = 0; g < curve.size(); ++g) {
    std::vector<std::string> row = {"survival"};
    for (int k = 0; k < d; ++k) row.push_back(fmt_g17(0.0));
    row.insert(row.end(),
               {fmt_g17(cfg.t_grid[g]), fmt_g17(curve[g].value),
                fmt_g17(curve[g].log_value), fmt_g17(curve[g].std_error),
                std::to_string(curve[g].n_paths), fmt_u64(env_seed)});
    csv.row(row);
  }
  ctx.write_csv("survival.csv", csv);

  json fitj;
  if (cfg.t_grid.size() >= 4) {
    try {
      const DecayRate fit = decay_rate_fit(cfg.t_grid, curve);
      fitj = {{"slope", fit.slope},
              {"slope_se", fit.slope_se},
              {"intercept", fit.intercept}};
    } catch (const std::exception& ex) {
      fitj = {{"error", ex.what()}};
    }
  } else {
    fitj = {{"error", "need >= 4 grid points for the decay fit"}};
  }
  fitj["n_window_violations"] = curve.front().n_window_violations;
  ctx.write_json("survival_fit.json", fitj);

  if (cfg.dump_paths > 0) {
    // Plain fixed-dt trajectories on independent streams, little-endian
    // doubles, d coordinates per record, (n_steps + 1) records per path.
    const long n_steps = static_cast<long>(std::llround(t_max / path.dt));
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(cfg.dump_paths) * (n_steps + 1) *
                  d * sizeof(double));
    for (long p = 0; p < cfg.dump_paths; ++p) {
      CounterRng rng = CounterRng(env_seed).child(
          {stream_tag::kMisc, 0xD0, static_cast<std::uint64_t>(p)});
      Vec z = vec0();
      auto put = [&](const Vec& q) {
        for (int k = 0; k < d; ++k) {
          double v = q[k];
          bytes.append(reinterpret_cast<const char*>(&v), sizeof v);
        }
      };
      put(z);
      for (long k = 0; k < n_steps; ++k) {
        const double sdt = std::sqrt(path.dt);
        for (int i = 0; i < d; ++i)
          z[i] += path.drift[i] * path.dt + sdt * rng.next_normal();
        put(z);
      }
    }
    write_text_file((ctx.dir / "trajectories.bin").string(), bytes);
    ctx.artifacts.push_back("trajectories.bin");
    ctx.write_json("trajectories.json",
                   json{{"n_paths", cfg.dump_paths},
                        {"records_per_path", n_steps + 1},
                        {"dimension", d},
                        {"dt", path.dt},
                        {"layout", "little-endian float64"}});
  }
}

CurveOptions curve_options(const ExperimentConfig& cfg) {
  CurveOptions opt;
  opt.scales = cfg.scales;
  opt.n_paths = cfg.n_paths;
  opt.n_env = cfg.n_env;
  opt.seed = cfg.seed;
  opt.path = cfg.path;
  opt.n_bootstrap = cfg.n_bootstrap;
  opt.workers = cfg.workers;
  return opt;
}

std::vector<std::string> lyap_header() {
  return {"lambda", "scale",  "direction_index", "a_over_r",
          "stderr", "n_env",  "n_paths"};
}

void append_curve_rows(CsvFile& csv, const LyapunovCurve& curve,
                       int direction_index, long n_env) {
  for (const AlphaEstimate& ae : curve.by_lambda)
    for (const ScaleEstimate& se : ae.by_scale)
      csv.row({fmt_g17(ae.lambda), fmt_g17(se.scale),
               std::to_string(direction_index), fmt_g17(se.mean),
               fmt_g17(se.se), std::to_string(n_env),
               std::to_string(se.n_paths)});
}

json curve_json(const LyapunovCurve& curve) {
  json per_lambda = json::array();
  for (const AlphaEstimate& ae : curve.by_lambda) {
    json scales = json::array();
    for (const ScaleEstimate& se : ae.by_scale)
      scales.push_back({{"scale", se.scale},
                        {"mean_a_over_r", se.mean},
                        {"se", se.se},
                        {"hit_fraction", se.hit_fraction},
                        {"n_window_violations", se.n_window_violations},
                        {"n_censored", se.n_censored}});
    per_lambda.push_back({{"lambda", ae.lambda},
                          {"alpha_hat", ae.alpha_hat},
                          {"se", ae.se},
                          {"monotone_ok", ae.monotone_ok},
                          {"by_scale", scales}});
  }
  return per_lambda;
}

void run_lyapunov(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const LyapunovCurve curve =
      estimate_curve(cfg.potential, cfg.x, cfg.lambda_grid, curve_options(cfg));

  CsvFile csv((ctx.dir / "lyapunov.csv").string());
  csv.row(lyap_header());
  append_curve_rows(csv, curve, 0, cfg.n_env);
  ctx.write_csv("lyapunov.csv", csv);

  json j;
  j["x"] = vec_json(curve.x, cfg.potential.dimension);
  j["vbar"] = curve.vbar;
  j["per_lambda"] = curve_json(curve);
  ctx.write_json("lyapunov.json", j);
}

void run_shape(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<Vec> dirs = direction_grid(cfg.potential.dimension);
  const ShapeReport rep =
      shape_diagnostic(cfg.potential, cfg.lambda, dirs, cfg.scales, cfg.n_env,
                       cfg.n_paths, cfg.seed, cfg.path, cfg.workers);

  CsvFile csv((ctx.dir / "shape.csv").string());
  csv.row(lyap_header());
  for (std::size_t si = 0; si < rep.scales.size(); ++si)
    for (std::size_t di = 0; di < rep.directions.size(); ++di)
      csv.row({fmt_g17(cfg.lambda), fmt_g17(rep.scales[si]),
               std::to_string(di), fmt_g17(rep.mean_a_over_r[si][di]),
               fmt_g17(rep.sem_a_over_r[si][di]), std::to_string(cfg.n_env),
               std::to_string(cfg.n_paths)});
  ctx.write_csv("shape.csv", csv);

  json j;
  j["lambda"] = cfg.lambda;
  j["directions"] = json::array();
  for (const Vec& u : rep.directions)
    j["directions"].push_back(vec_json(u, cfg.potential.dimension));
  j["alpha_by_direction"] = rep.alpha_by_direction;
  j["deviations"] = json::array();
  for (const ShapeDeviation& dv : rep.deviations)
    j["deviations"].push_back({{"scale", dv.scale},
                               {"max_deviation", dv.max_deviation},
                               {"argmax_direction", dv.argmax_direction}});
  j["decreasing"] = rep.decreasing;
  ctx.write_json("shape.json", j);
}

double estimate_e_sup_v(const ExperimentConfig& cfg) {
  const PotentialSpec& spec = cfg.potential;
  if (spec.family == Family::Zero) return 0.0;
  if (spec.family == Family::Constant) return spec.c;
  const long ne = std::min<long>(cfg.n_env, 50);
  std::vector<double> sups(ne, 0.0);
  CounterRng master(cfg.seed);
  parallel_cells(static_cast<std::size_t>(ne), cfg.workers, [&](std::size_t e) {
    const std::uint64_t s =
        master.child({stream_tag::kMisc, 0xE5, static_cast<std::uint64_t>(e)})
            .key();
    const Environment env = Environment::prepare(spec, 2.5, s);
    sups[e] = env.field->sup_on_ball(vec0(), 1.0, 0.05);
  });
  return pairwise_sum(sups) / static_cast<double>(ne);
}

void run_rate(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const LyapunovCurve curve =
      estimate_curve(cfg.potential, cfg.x, cfg.lambda_grid, curve_options(cfg));

  RateInput input;
  input.lambdas = curve.lambdas;
  for (const AlphaEstimate& ae : curve.by_lambda) {
    input.alphas.push_back(ae.alpha_hat);
    input.ses.push_back(ae.se);
  }
  const double e_sup_v = estimate_e_sup_v(cfg);
  const double lam_d = dirichlet_ball_eigenvalue(cfg.potential.dimension);
  const RateFunctionReport rep = rate_function(
      input, curve.vbar, norm(cfg.x), lam_d, e_sup_v, cfg.slack);

  CsvFile csv((ctx.dir / "rate_curve.csv").string());
  csv.row(lyap_header());
  append_curve_rows(csv, curve, 0, cfg.n_env);
  ctx.write_csv("rate_curve.csv", csv);

  json j;
  j["x"] = vec_json(cfg.x, cfg.potential.dimension);
  j["I_hat"] = rep.I_hat;
  j["lambda_star"] = rep.lambda_star;
  j["lambda_star_shifted"] = rep.lambda_star_shifted;
  j["projection_distance"] = rep.projection_distance;
  j["right_censored"] = rep.right_censored;
  j["sandwich_lower"] = rep.sandwich_lower;
  j["sandwich_upper"] = rep.sandwich_upper;
  j["within_sandwich"] = rep.within_sandwich;
  j["slack"] = rep.slack;
  j["lambda_d"] = lam_d;
  j["e_sup_v"] = e_sup_v;
  ctx.write_json("rate.json", j);
}

void run_phase(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<Vec> dirs = direction_grid(cfg.potential.dimension);

  DirectionCurves curves;
  curves.directions = dirs;
  curves.lambdas = cfg.lambda_grid;

  CsvFile csv((ctx.dir / "phase_curves.csv").string());
  csv.row(lyap_header());
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    const LyapunovCurve c =
        estimate_curve(cfg.potential, dirs[di], cfg.lambda_grid,
                       curve_options(cfg));
    std::vector<double> alphas;
    for (const AlphaEstimate& ae : c.by_lambda) alphas.push_back(ae.alpha_hat);
    curves.alpha.push_back(std::move(alphas));
    append_curve_rows(csv, c, static_cast<int>(di), cfg.n_env);
  }
  ctx.write_csv("phase_curves.csv", csv);

  const PhaseVerdict v =
      phase_verdict(curves, cfg.h_vec, cfg.potential.vbar(), 1e-4);
  json j;
  j["h"] = vec_json(cfg.h_vec, cfg.potential.dimension);
  j["dual_at_zero"] = v.dual_at_zero;
  j["dual_at_zero_infinite"] = v.dual_at_zero_infinite;
  j["ballistic"] = v.ballistic;
  j["undetermined"] = v.undetermined;
  if (std::isfinite(v.lambda_h)) j["lambda_h"] = v.lambda_h;
  j["censor_low"] = v.censor_low;
  ctx.write_json("phase.json", j);
}

void run_eigen(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PotentialSpec& spec = cfg.potential;
  CounterRng master(cfg.seed);
  std::vector<std::uint64_t> seeds(cfg.n_env);
  for (long e = 0; e < cfg.n_env; ++e)
    seeds[e] = master.child(static_cast<std::uint64_t>(e)).key();

  CsvFile csv((ctx.dir / "spectrum.csv").string());
  csv.row({"env_seed", "R", "h", "lambda_hat", "residual", "iters"});
  json j;

  if (cfg.R_grid.size() >= 3) {
    const LambdaVReport rep =
        lambda_V_limit(spec, cfg.R_grid, seeds, cfg.mesh_h, cfg.workers);
    for (const LambdaVSequence& seq : rep.per_env)
      for (const LambdaVPoint& pt : seq.points)
        csv.row({fmt_u64(seq.env_seed), fmt_g17(pt.R), fmt_g17(cfg.mesh_h),
                 fmt_g17(pt.lambda_hat), fmt_g17(pt.residual),
                 std::to_string(pt.iterations)});
    j["mean_by_R"] = rep.mean_by_R;
    j["limit_extrapolated"] = rep.limit_extrapolated;
    j["limit_last"] = rep.limit_last;
    j["spread_last"] = rep.spread_last;
    bool all_mono = true;
    for (const LambdaVSequence& seq : rep.per_env)
      all_mono = all_mono && seq.non_increasing;
    j["all_non_increasing"] = all_mono;
  } else {
    const double R_max = cfg.R_grid.back();
    std::vector<std::vector<LambdaVPoint>> pts(
        cfg.n_env, std::vector<LambdaVPoint>(cfg.R_grid.size()));
    parallel_cells(static_cast<std::size_t>(cfg.n_env), cfg.workers,
                   [&](std::size_t e) {
                     const Environment env =
                         Environment::prepare(spec, R_max + 1.0, seeds[e]);
                     for (std::size_t ri = 0; ri < cfg.R_grid.size(); ++ri) {
                       const GridProblem problem = GridProblem::build(
                           spec.dimension, cfg.R_grid[ri], cfg.mesh_h,
                           [&](const Vec& p) { return env.eval(p); });
                       const EigenResult res = principal_eigenvalue(problem);
                       pts[e][ri] = {cfg.R_grid[ri], res.lambda, res.residual,
                                     res.iterations};
                     }
                   });
    std::vector<double> mean_by_R(cfg.R_grid.size(), 0.0);
    for (long e = 0; e < cfg.n_env; ++e)
      for (std::size_t ri = 0; ri < cfg.R_grid.size(); ++ri) {
        const LambdaVPoint& pt = pts[e][ri];
        csv.row({fmt_u64(seeds[e]), fmt_g17(pt.R), fmt_g17(cfg.mesh_h),
                 fmt_g17(pt.lambda_hat), fmt_g17(pt.residual),
                 std::to_string(pt.iterations)});
        mean_by_R[ri] += pt.lambda_hat / static_cast<double>(cfg.n_env);
      }
    j["mean_by_R"] = mean_by_R;
  }
  ctx.write_csv("spectrum.csv", csv);
  ctx.write_json("eigen.json", j);
}

void run_ldp_check(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::uint64_t env_seed = CounterRng(cfg.seed).child(std::uint64_t{0}).key();
  const std::vector<EndpointRate> rates =
      endpoint_ldp_check(cfg.potential, env_seed, cfg.h_vec, cfg.ball_radius,
                         cfg.t_grid, cfg.n_paths, cfg.path);

  CsvFile csv((ctx.dir / "ldp_check.csv").string());
  csv.row({"t", "rate", "numerator", "denominator", "n_inside", "n_paths",
           "env_seed"});
  for (const EndpointRate& r : rates)
    csv.row({fmt_g17(r.t), fmt_g17(r.rate), fmt_g17(r.numerator),
             fmt_g17(r.denominator), std::to_string(r.n_inside),
             std::to_string(cfg.n_paths), fmt_u64(env_seed)});
  ctx.write_csv("ldp_check.csv", csv);

  json j;
  j["v"] = vec_json(cfg.h_vec, cfg.potential.dimension);
  j["ball_radius"] = cfg.ball_radius;
  j["final_rate"] = rates.back().rate;
  j["n_window_violations"] = rates.back().n_window_violations;
  ctx.write_json("ldp_check.json", j);
}

}  // namespace

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::PotentialStats: return "potential-stats";
    case ExperimentKind::Survival: return "survival";
    case ExperimentKind::Lyapunov: return "lyapunov";
    case ExperimentKind::Shape: return "shape";
    case ExperimentKind::Rate: return "rate";
    case ExperimentKind::Phase: return "phase";
    case ExperimentKind::Eigen: return "eigen";
    case ExperimentKind::LdpCheck: return "ldp-check";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::PotentialStats, ExperimentKind::Survival,
        ExperimentKind::Lyapunov, ExperimentKind::Shape, ExperimentKind::Rate,
        ExperimentKind::Phase, ExperimentKind::Eigen, ExperimentKind::LdpCheck})
    if (experiment_kind_name(k) == name) return k;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + token + "'");
    }
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
      ++used;
    if (used != token.size())
      throw std::invalid_argument("trailing characters in '" + token + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

Vec parse_vec(const std::string& text, int expected_dim) {
  const std::vector<double> xs = parse_double_list(text);
  if (static_cast<int>(xs.size()) != expected_dim)
    throw std::invalid_argument("expected " + std::to_string(expected_dim) +
                                " coordinates, got " +
                                std::to_string(xs.size()));
  Vec v = vec0();
  for (int i = 0; i < expected_dim; ++i) v[i] = xs[i];
  return v;
}

std::vector<ConfigViolation> validate(const ExperimentConfig& cfg) {
  std::vector<ConfigViolation> out;
  if (const std::string msg = cfg.potential.validate_message(); !msg.empty())
    out.push_back({"family", msg});
  if (const std::string msg = cfg.path.validate_message(); !msg.empty())
    out.push_back({"dt", msg});
  if (cfg.n_env < 1) out.push_back({"n-env", "must be >= 1"});
  if (cfg.n_paths < 1) out.push_back({"n-paths", "must be >= 1"});
  if (cfg.workers < 1) out.push_back({"workers", "must be >= 1"});
  if (cfg.n_bootstrap < 2) out.push_back({"n-bootstrap", "must be >= 2"});
  if (cfg.dump_paths < 0) out.push_back({"dump-paths", "must be >= 0"});
  if (cfg.out_dir.empty()) out.push_back({"out", "must be non-empty"});

  const bool curve_kind = cfg.kind == ExperimentKind::Lyapunov ||
                          cfg.kind == ExperimentKind::Rate ||
                          cfg.kind == ExperimentKind::Phase;
  switch (cfg.kind) {
    case ExperimentKind::PotentialStats:
      break;
    case ExperimentKind::Survival:
    case ExperimentKind::LdpCheck:
      check_grid(out, cfg.t_grid, "t-grid", /*positive=*/true);
      if (cfg.kind == ExperimentKind::LdpCheck && cfg.ball_radius <= 0.0)
        out.push_back({"ball-radius", "must be > 0"});
      break;
    case ExperimentKind::Lyapunov:
    case ExperimentKind::Rate:
    case ExperimentKind::Phase:
    case ExperimentKind::Shape: {
      check_grid(out, cfg.scales, "scales", /*positive=*/true);
      const double xn = cfg.kind == ExperimentKind::Shape ||
                                cfg.kind == ExperimentKind::Phase
                            ? 1.0
                            : norm(cfg.x);
      if ((cfg.kind == ExperimentKind::Lyapunov ||
           cfg.kind == ExperimentKind::Rate) &&
          !(xn > 0.0))
        out.push_back({"x", "must be nonzero"});
      if (!cfg.scales.empty() && xn > 0.0 && cfg.scales.front() * xn <= 2.0)
        out.push_back(
            {"scales", "smallest scale times |x| must exceed 2 "
                       "(targets sit outside the doubled unit ball)"});
      if (curve_kind)
        check_grid(out, cfg.lambda_grid, "lambda-grid", /*positive=*/false);
      if (cfg.kind == ExperimentKind::Shape && cfg.lambda < 0.0)
        out.push_back({"lambda", "must be >= 0"});
      if (cfg.kind == ExperimentKind::Phase && !(norm(cfg.h_vec) > 0.0))
        out.push_back({"h-vec", "must be nonzero"});
      break;
    }
    case ExperimentKind::Eigen: {
      check_grid(out, cfg.R_grid, "r-grid", /*positive=*/true);
      if (cfg.mesh_h <= 0.0)
        out.push_back({"mesh-h", "must be > 0"});
      else if (!cfg.R_grid.empty() &&
               cfg.mesh_h > cfg.R_grid.front() / 16.0 + 1e-12)
        out.push_back({"mesh-h",
                       "must be <= R/16 for the smallest domain radius"});
      break;
    }
  }
  return out;
}

std::string config_echo(const ExperimentConfig& cfg) {
  const int d = cfg.potential.dimension;
  std::map<std::string, std::string> kv;
  kv["kind"] = experiment_kind_name(cfg.kind);
  kv["family"] = family_name(cfg.potential.family);
  kv["d"] = std::to_string(d);
  kv["gamma"] = fmt_g17(cfg.potential.gamma);
  kv["delta"] = fmt_g17(cfg.potential.delta);
  kv["c9"] = fmt_g17(cfg.potential.c9);
  kv["nu"] = fmt_g17(cfg.potential.nu);
  kv["m"] = fmt_g17(cfg.potential.m);
  kv["big-m"] = fmt_g17(cfg.potential.M);
  kv["halfwidth"] = fmt_g17(cfg.potential.line_halfwidth);
  kv["c"] = fmt_g17(cfg.potential.c);
  kv["dt"] = fmt_g17(cfg.path.dt);
  kv["t-max"] = fmt_g17(cfg.path.t_max);
  kv["bridge"] = cfg.path.bridge_correction ? "1" : "0";
  kv["drift"] = join_vec(cfg.path.drift, d);
  kv["n-env"] = std::to_string(cfg.n_env);
  kv["n-paths"] = std::to_string(cfg.n_paths);
  kv["t-grid"] = join_list(cfg.t_grid);
  kv["lambda-grid"] = join_list(cfg.lambda_grid);
  kv["scales"] = join_list(cfg.scales);
  kv["r-grid"] = join_list(cfg.R_grid);
  kv["lambda"] = fmt_g17(cfg.lambda);
  kv["mesh-h"] = fmt_g17(cfg.mesh_h);
  kv["x"] = join_vec(cfg.x, d);
  kv["h-vec"] = join_vec(cfg.h_vec, d);
  kv["ball-radius"] = fmt_g17(cfg.ball_radius);
  kv["slack"] = fmt_g17(cfg.slack);
  kv["n-bootstrap"] = std::to_string(cfg.n_bootstrap);
  kv["dump-paths"] = std::to_string(cfg.dump_paths);
  kv["seed"] = std::to_string(cfg.seed);
  kv["workers"] = std::to_string(cfg.workers);
  kv["out"] = cfg.out_dir;
  std::string echo;
  for (const auto& [k, v] : kv) echo += k + "=" + v + "\n";
  return echo;
}

std::vector<std::string> run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx{cfg, fs::path(cfg.out_dir), {}, json::object()};
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" +
                             cfg.out_dir + "': " + ec.message());

  switch (cfg.kind) {
    case ExperimentKind::PotentialStats: run_potential_stats(ctx); break;
    case ExperimentKind::Survival: run_survival(ctx); break;
    case ExperimentKind::Lyapunov: run_lyapunov(ctx); break;
    case ExperimentKind::Shape: run_shape(ctx); break;
    case ExperimentKind::Rate: run_rate(ctx); break;
    case ExperimentKind::Phase: run_phase(ctx); break;
    case ExperimentKind::Eigen: run_eigen(ctx); break;
    case ExperimentKind::LdpCheck: run_ldp_check(ctx); break;
  }

  const std::string echo = config_echo(cfg);
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(echo)));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json manifest;
  manifest["kind"] = experiment_kind_name(cfg.kind);
  json cfg_json = json::object();
  std::istringstream lines(echo);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    cfg_json[line.substr(0, eq)] = line.substr(eq + 1);
  }
  manifest["config"] = cfg_json;
  manifest["content_hash"] = hash;
  manifest["wall_seconds"] = wall;
  manifest["artifacts"] = ctx.artifacts;
  if (!ctx.notes.empty()) manifest["notes"] = ctx.notes;
  write_text_file((ctx.dir / "manifest.json").string(),
                  manifest.dump(2) + "\n");
  ctx.artifacts.push_back("manifest.json");
  return ctx.artifacts;
}

}  // namespace rplab
