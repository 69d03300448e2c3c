// rp-lab: potential sampling, moments, covariances, and the indexed evaluator.

#include "rplab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rplab {

namespace {

constexpr double kMarkCutoffTol = 1e-6;  // expected in-window mass of dropped marks
constexpr double kWindowSlack = 1e-9;

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
  return r;
}

// int_a^b r^p dr with the logarithmic case handled.
double power_integral(double p, double a, double b) {
  if (std::fabs(p + 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

// Intensity mass of the halo band {(w,r): |w| <= L + r, r in [a,b)}:
//   delta * L_d * int_a^b (r + L)^d r^(-delta-1) dr   (binomial expansion).
double halo_band_mass(int d, double delta, double L, double a, double b) {
  double s = 0.0;
  for (int j = 0; j <= d; ++j)
    s += binom(d, j) * std::pow(L, d - j) * power_integral(j - delta - 1.0, a, b);
  return delta * unit_ball_volume(d) * s;
}

// Expected potential mass inside the window contributed by marks >= M:
//   delta * L_d * int_M^inf (r + L)^d r^(-delta-1-gamma) dr.
double missing_mean_tail(int d, double gamma, double delta, double L, double M) {
  double s = 0.0;
  for (int j = 0; j <= d; ++j) {
    const double p = j - delta - 1.0 - gamma;
    // integrable because gamma + delta > d >= j
    s += binom(d, j) * std::pow(L, d - j) * (-std::pow(M, p + 1.0) / (p + 1.0));
  }
  return delta * unit_ball_volume(d) * s;
}

// Exterior shell integral int_B^inf u^(-g) (u + L)^(d-1) du by binomial
// expansion; finite iff g > d, which spec validation guarantees.  L may be
// negative (the (u - |L|)^(d-1) variant of the lower bound); the exponents
// d-1-k are integers, so std::pow is well defined for negative bases.
double exterior_tail_integral(int d, double g, double B, double L) {
  double s = 0.0;
  for (int k = 0; k < d; ++k)
    s += binom(d - 1, k) * std::pow(L, d - 1 - k) * std::pow(B, k + 1.0 - g) /
         (g - k - 1.0);
  return s;
}

// PolyTail halo policy.  Centers beyond the sampled ball B(0, L + halo) are
// never drawn; their *expected* total contribution at the window center is
// added back as a deterministic compensation constant (the tail mean decays
// only like A^(d-gamma), so matching it by brute halo growth is hopeless for
// gamma close to d).  After compensation the residual error inside the
// window is (a) the spatial spread of the tail mean across the window and
// (b) the centered far-field fluctuation; the halo is the smallest power of
// two >= 16 bringing the spread below 0.01 and the fluctuation sd below
// 0.003 in potential units.
double polytail_halo(const PotentialSpec& spec, double L) {
  const int d = spec.dimension;
  const double dl = d * unit_ball_volume(d);
  const double g = spec.gamma;
  for (double halo = 16.0;; halo *= 2.0) {
    const double A = L + halo;
    const double spread =
        spec.c9 * dl *
        (exterior_tail_integral(d, g, A - L, L) -
         exterior_tail_integral(d, g, A + L, -L));
    const double fluct_var =
        spec.c9 * spec.c9 * dl * exterior_tail_integral(d, 2.0 * g, A - L, L);
    if (spread <= 0.01 && fluct_var <= 9e-6) return halo;
    if (halo > 1e6)
      throw std::invalid_argument(
          "polytail: no feasible halo for this window/exponent combination");
  }
}

// The compensation constant: expected contribution, at the window center, of
// the centers the halo cutoff removed.
double polytail_compensation(const PotentialSpec& spec, double window,
                             double halo) {
  const int d = spec.dimension;
  return spec.c9 * d * unit_ball_volume(d) *
         exterior_tail_integral(d, spec.gamma, window + halo, 0.0);
}

Vec uniform_in_ball(int d, double radius, CounterRng& rng) {
  Vec u = vec0();
  if (d == 1) {
    u[0] = (rng.next_double() < 0.5) ? -1.0 : 1.0;
  } else {
    double n2 = 0.0;
    do {
      for (int i = 0; i < d; ++i) u[i] = rng.next_normal();
      n2 = norm2(u);
    } while (n2 == 0.0);
    u = scale(u, 1.0 / std::sqrt(n2));
  }
  const double rad = radius * std::pow(rng.next_double(), 1.0 / d);
  return scale(u, rad);
}

void sort_by_radius(PointCloud& cloud) {
  std::vector<std::size_t> order(cloud.centers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return norm2(cloud.centers[a]) < norm2(cloud.centers[b]);
  });
  std::vector<Vec> centers(cloud.centers.size());
  std::vector<double> marks;
  if (!cloud.marks.empty()) marks.resize(cloud.marks.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    centers[i] = cloud.centers[order[i]];
    if (!marks.empty()) marks[i] = cloud.marks[order[i]];
  }
  cloud.centers = std::move(centers);
  cloud.marks = std::move(marks);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Zero: return "zero";
    case Family::Constant: return "constant";
    case Family::Lacoin: return "lacoin";
    case Family::PolyTail: return "polytail";
    case Family::Ruess: return "ruess";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "zero") return Family::Zero;
  if (name == "constant") return Family::Constant;
  if (name == "lacoin") return Family::Lacoin;
  if (name == "polytail") return Family::PolyTail;
  if (name == "ruess") return Family::Ruess;
  throw std::invalid_argument("unknown potential family: " + name);
}

double PotentialSpec::vbar() const {
  switch (family) {
    case Family::Zero: return 0.0;
    case Family::Constant: return c;
    case Family::Lacoin: return 0.0;
    case Family::PolyTail: return 0.0;
    case Family::Ruess: return m;
  }
  return 0.0;
}

std::string PotentialSpec::validate_message() const {
  if (dimension < 1 || dimension > 3) return "dimension must be 1, 2 or 3";
  switch (family) {
    case Family::Zero:
      return "";
    case Family::Constant:
      if (c < 0.0) return "constant level must be >= 0";
      return "";
    case Family::Lacoin:
      if (gamma <= 0.0) return "lacoin: gamma must be > 0";
      if (delta <= 0.0) return "lacoin: delta must be > 0";
      if (gamma + delta - dimension <= 0.0)
        return "lacoin: gamma + delta - d must be > 0 (else the potential is "
               "almost surely infinite)";
      return "";
    case Family::PolyTail:
      if (gamma <= dimension) return "polytail: gamma must be > d";
      if (c9 <= 0.0) return "polytail: c9 must be > 0";
      return "";
    case Family::Ruess:
      if (dimension != 2) return "ruess: planar process requires d = 2";
      if (nu <= 0.0) return "ruess: nu must be > 0";
      if (m < 0.0) return "ruess: m must be >= 0";
      if (M <= m) return "ruess: M must be > m";
      if (line_halfwidth <= 0.0) return "ruess: R must be > 0";
      return "";
  }
  return "unknown family";
}

void PotentialSpec::validate() const {
  const std::string msg = validate_message();
  if (!msg.empty()) throw std::invalid_argument(msg);
}

PotentialSpec PotentialSpec::zero(int d) {
  PotentialSpec s;
  s.family = Family::Zero;
  s.dimension = d;
  return s;
}

PotentialSpec PotentialSpec::constant(int d, double level) {
  PotentialSpec s;
  s.family = Family::Constant;
  s.dimension = d;
  s.c = level;
  return s;
}

PotentialSpec PotentialSpec::lacoin(int d, double gamma, double delta) {
  PotentialSpec s;
  s.family = Family::Lacoin;
  s.dimension = d;
  s.gamma = gamma;
  s.delta = delta;
  return s;
}

PotentialSpec PotentialSpec::polytail(int d, double gamma, double c9) {
  PotentialSpec s;
  s.family = Family::PolyTail;
  s.dimension = d;
  s.gamma = gamma;
  s.c9 = c9;
  return s;
}

PotentialSpec PotentialSpec::ruess(double nu, double m, double M,
                                   double halfwidth) {
  PotentialSpec s;
  s.family = Family::Ruess;
  s.dimension = 2;
  s.nu = nu;
  s.m = m;
  s.M = M;
  s.line_halfwidth = halfwidth;
  return s;
}

double lacoin_mark_cutoff(const PotentialSpec& spec, double window_radius) {
  if (spec.family != Family::Lacoin)
    throw std::invalid_argument("lacoin_mark_cutoff: lacoin only");
  int K = 0;
  while (missing_mean_tail(spec.dimension, spec.gamma, spec.delta,
                           window_radius, std::pow(2.0, K + 1)) >=
             kMarkCutoffTol &&
         K < 60)
    ++K;
  return std::pow(2.0, K + 1);
}

double expected_cloud_size(const PotentialSpec& spec, double window_radius,
                           double mark_cutoff) {
  spec.validate();
  const int d = spec.dimension;
  const double L = window_radius;
  switch (spec.family) {
    case Family::Zero:
    case Family::Constant:
      return 0.0;
    case Family::Lacoin: {
      const double M =
          mark_cutoff > 0.0 ? mark_cutoff : lacoin_mark_cutoff(spec, L);
      return halo_band_mass(d, spec.delta, L, 1.0, M);
    }
    case Family::PolyTail:
      return unit_ball_volume(d) * std::pow(L + polytail_halo(spec, L), d);
    case Family::Ruess:
      return spec.nu * 2.0 * (L + spec.line_halfwidth);
  }
  return 0.0;
}

PointCloud PointCloud::empty(const PotentialSpec& spec, double window_radius) {
  PointCloud c;
  c.dimension = spec.dimension;
  c.family = spec.family;
  c.window_radius = window_radius;
  return c;
}

PointCloud sample_cloud(const PotentialSpec& spec, double window_radius,
                        std::uint64_t seed) {
  spec.validate();
  if (window_radius <= 0.0)
    throw std::invalid_argument("sample_cloud: window_radius must be > 0");
  if (spec.family == Family::Zero || spec.family == Family::Constant)
    throw std::invalid_argument(
        "sample_cloud: deterministic families have no cloud");

  const int d = spec.dimension;
  const double L = window_radius;
  PointCloud cloud;
  cloud.dimension = d;
  cloud.family = spec.family;
  cloud.window_radius = L;
  cloud.seed = seed;
  CounterRng root = CounterRng(seed).child(stream_tag::kCloud);

  if (spec.family == Family::Lacoin) {
    // Mark cutoff: smallest power of two M = 2^(K+1) whose discarded
    // expected in-window mass is below tolerance.
    cloud.mark_cutoff = lacoin_mark_cutoff(spec, L);
    const int K =
        static_cast<int>(std::lround(std::log2(cloud.mark_cutoff))) - 1;

    for (int k = 0; k <= K; ++k) {
      const double a = std::pow(2.0, k);
      const double b = std::pow(2.0, k + 1);
      CounterRng rng = root.child(static_cast<std::uint64_t>(k));
      const double mass = halo_band_mass(d, spec.delta, L, a, b);
      const long n = rng.next_poisson(mass);
      // Joint density on the band is proportional to (r+L)^d r^(-delta-1);
      // propose from the truncated Pareto factor, accept with the ratio to
      // the envelope (b+L)^d.
      const double pa = std::pow(a, -spec.delta);
      const double pb = std::pow(b, -spec.delta);
      for (long i = 0; i < n; ++i) {
        double r;
        for (;;) {
          const double u = rng.next_double();
          r = std::pow(pa - u * (pa - pb), -1.0 / spec.delta);
          const double accept = std::pow((r + L) / (b + L), d);
          if (rng.next_double() < accept) break;
        }
        cloud.centers.push_back(uniform_in_ball(d, L + r, rng));
        cloud.marks.push_back(r);
      }
    }
  } else if (spec.family == Family::PolyTail) {
    cloud.halo = polytail_halo(spec, L);
    CounterRng rng = root.child(0);
    const double R_all = L + cloud.halo;
    const double mass = unit_ball_volume(d) * std::pow(R_all, d);
    const long n = rng.next_poisson(mass);
    cloud.centers.reserve(n);
    for (long i = 0; i < n; ++i)
      cloud.centers.push_back(uniform_in_ball(d, R_all, rng));
  } else {  // Ruess
    CounterRng rng = root.child(0);
    const double half = L + spec.line_halfwidth;  // lines reaching B(0, L)
    const long n = rng.next_poisson(spec.nu * 2.0 * half);
    cloud.centers.reserve(n);
    for (long i = 0; i < n; ++i) {
      const double rho = (2.0 * rng.next_double() - 1.0) * half;
      const double theta = rng.next_double() * M_PI;
      cloud.centers.push_back(vec(rho, theta));
    }
  }

  sort_by_radius(cloud);
  return cloud;
}

PointCloud restrict_cloud(const PotentialSpec& spec, const PointCloud& cloud,
                          double smaller_window) {
  if (smaller_window > cloud.window_radius)
    throw std::invalid_argument("restrict_cloud: window must shrink");
  PointCloud out;
  out.dimension = cloud.dimension;
  out.family = cloud.family;
  out.window_radius = smaller_window;
  out.halo = cloud.halo;
  out.mark_cutoff = cloud.mark_cutoff;
  out.seed = cloud.seed;
  for (std::size_t i = 0; i < cloud.centers.size(); ++i) {
    double reach;
    switch (spec.family) {
      case Family::Lacoin: reach = smaller_window + cloud.marks[i]; break;
      case Family::PolyTail: reach = smaller_window + cloud.halo; break;
      case Family::Ruess: reach = smaller_window + spec.line_halfwidth; break;
      default: throw std::invalid_argument("restrict_cloud: no cloud family");
    }
    const double position = spec.family == Family::Ruess
                                ? std::fabs(cloud.centers[i][0])
                                : norm(cloud.centers[i]);
    if (position <= reach) {
      out.centers.push_back(cloud.centers[i]);
      if (!cloud.marks.empty()) out.marks.push_back(cloud.marks[i]);
    }
  }
  return out;
}

double eval_potential(const PotentialSpec& spec, const PointCloud& cloud,
                      const Vec& x) {
  spec.validate();
  switch (spec.family) {
    case Family::Zero:
      return 0.0;
    case Family::Constant:
      return spec.c;
    default:
      break;
  }
  if (norm(x) > cloud.window_radius + kWindowSlack)
    throw std::domain_error(
        "eval_potential: point outside the guaranteed window (truncation "
        "violation)");
  double v = 0.0;
  switch (spec.family) {
    case Family::Lacoin:
      for (std::size_t i = 0; i < cloud.centers.size(); ++i) {
        const double r = cloud.marks[i];
        if (dist2(x, cloud.centers[i]) <= r * r)
          v += std::pow(r, -spec.gamma);
      }
      return v;
    case Family::PolyTail:
      v = polytail_compensation(spec, cloud.window_radius, cloud.halo);
      for (const Vec& w : cloud.centers) {
        const double q = dist(x, w);
        v += spec.c9 * (q <= 1.0 ? 1.0 : std::pow(q, -spec.gamma));
      }
      return v;
    case Family::Ruess: {
      for (const Vec& line : cloud.centers) {
        const double rho = line[0], theta = line[1];
        const double signed_dist =
            x[0] * std::cos(theta) + x[1] * std::sin(theta) - rho;
        if (std::fabs(signed_dist) <= spec.line_halfwidth) return spec.m;
      }
      return spec.M;
    }
    default:
      return 0.0;
  }
}

Moments closed_form_moments(int d, double gamma, double delta) {
  if (gamma + delta - d <= 0.0)
    throw std::invalid_argument(
        "closed_form_moments: gamma + delta - d <= 0, potential almost surely "
        "infinite");
  if (2.0 * gamma + delta - d <= 0.0)
    throw std::invalid_argument("closed_form_moments: variance undefined");
  Moments mo;
  mo.mean = unit_ball_volume(d) * delta / (gamma + delta - d);
  mo.variance = unit_ball_volume(d) * delta / (2.0 * gamma + delta - d);
  return mo;
}

double exp_moment_log(int d, double gamma, double delta, double s, double R) {
  if (gamma + delta - d <= 0.0)
    throw std::invalid_argument("exp_moment: gamma + delta - d must be > 0");
  if (R < 0.0) throw std::invalid_argument("exp_moment: R must be >= 0");
  const double Ld = unit_ball_volume(d);
  auto f = [=](double r) {
    return delta * Ld * std::pow(r + R, d) * std::pow(r, -delta - 1.0) *
           std::expm1(s * std::pow(r, -gamma));
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, 1.0, std::numeric_limits<double>::infinity(), 12, 1e-10, &error);
  if (!(std::isfinite(value)) ||
      (value != 0.0 && std::fabs(error / value) > 1e-8))
    throw std::runtime_error("exp_moment: quadrature did not converge");
  return value;
}

double exp_moment(int d, double gamma, double delta, double s, double R) {
  return std::exp(exp_moment_log(d, gamma, delta, s, R));
}

double truncation_radius(const TruncationPolicy& policy,
                         const PotentialSpec& spec) {
  if (policy.target_sup_error <= 0.0)
    throw std::invalid_argument("truncation: eps must be > 0");
  if (policy.evaluation_radius <= 1.0)
    throw std::invalid_argument("truncation: R0 must be > 1");
  if (policy.failure_probability <= 0.0 || policy.failure_probability >= 1.0)
    throw std::invalid_argument("truncation: p must be in (0,1)");
  double rate;
  switch (spec.family) {
    case Family::Lacoin: rate = 2.0 * policy.target_sup_error; break;
    case Family::PolyTail: rate = 4.0 * policy.target_sup_error; break;
    default:
      throw std::invalid_argument(
          "truncation_radius: tail bound known only for lacoin/polytail");
  }
  const double r_star =
      std::pow(std::log(1.0 / policy.failure_probability) / rate,
               1.0 / spec.gamma);
  // Geometric grid R_j = 2 R0 * 2^(j/4); the first point is already > 2 R0.
  double R = 2.0 * policy.evaluation_radius;
  int j = 0;
  do {
    ++j;
    R = 2.0 * policy.evaluation_radius * std::pow(2.0, j / 4.0);
  } while (R < r_star && j < 400);
  return R;
}

CovarianceEstimate empirical_covariance(const PotentialSpec& spec, const Vec& x,
                                        long n_env, std::uint64_t seed) {
  spec.validate();
  if (n_env < 100)
    throw std::invalid_argument("empirical_covariance: n_env >= 100 required");
  CovarianceEstimate est;
  est.n_env = n_env;
  if (spec.family == Family::Zero || spec.family == Family::Constant)
    return est;  // degenerate field: covariance 0 with zero error

  const double L = std::max(1.0, norm(x)) + 0.5;
  std::vector<double> v0(n_env), vx(n_env);
  CounterRng master(seed);
  for (long e = 0; e < n_env; ++e) {
    const std::uint64_t env_seed = master.child(e).key();
    const PointCloud cloud = sample_cloud(spec, L, env_seed);
    v0[e] = eval_potential(spec, cloud, vec0());
    vx[e] = eval_potential(spec, cloud, x);
  }
  const double m0 = std::accumulate(v0.begin(), v0.end(), 0.0) / n_env;
  const double mx = std::accumulate(vx.begin(), vx.end(), 0.0) / n_env;
  double cov = 0.0, var_w = 0.0;
  std::vector<double> w(n_env);
  for (long e = 0; e < n_env; ++e) w[e] = (v0[e] - m0) * (vx[e] - mx);
  for (long e = 0; e < n_env; ++e) cov += w[e];
  cov /= (n_env - 1);
  for (long e = 0; e < n_env; ++e) var_w += (w[e] - cov) * (w[e] - cov);
  var_w /= (n_env - 1);
  est.value = cov;
  est.std_error = std::sqrt(var_w / n_env);
  return est;
}

double shared_ball_covariance(const PotentialSpec& spec, const PointCloud& cloud,
                              const Vec& x) {
  if (spec.family != Family::Lacoin)
    throw std::invalid_argument("shared_ball_covariance: lacoin only");
  if (norm(x) > cloud.window_radius + kWindowSlack)
    throw std::domain_error("shared_ball_covariance: x outside window");
  double t = 0.0;
  for (std::size_t i = 0; i < cloud.centers.size(); ++i) {
    const double r = cloud.marks[i];
    const double r2 = r * r;
    if (norm2(cloud.centers[i]) <= r2 && dist2(x, cloud.centers[i]) <= r2)
      t += std::pow(r, -2.0 * spec.gamma);
  }
  return t;
}

double lacoin_covariance_exact(int d, double gamma, double delta,
                               double distance) {
  auto f = [=](double r) {
    return delta * std::pow(r, -2.0 * gamma - delta - 1.0) *
           lens_volume(d, r, distance);
  };
  const double lo = std::max(1.0, distance / 2.0);
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, lo, std::numeric_limits<double>::infinity(), 12, 1e-12, &error);
  return value;
}

// ---------------------------------------------------------------------------
// PotentialField
// ---------------------------------------------------------------------------

PotentialField::PotentialField(const PotentialSpec& spec,
                               const PointCloud& cloud)
    : spec_(spec), cloud_(cloud) {
  spec_.validate();
  if (spec_.family == Family::Lacoin) build_lacoin_index();
  if (spec_.family == Family::Ruess) {
    lines_.reserve(cloud_.centers.size());
    for (const Vec& line : cloud_.centers)
      lines_.push_back({std::cos(line[1]), std::sin(line[1]), line[0]});
  }
}

void PotentialField::build_lacoin_index() {
  const int d = spec_.dimension;
  extent_ = cloud_.window_radius;
  cell_ = 0.5;
  // Memory guard: coarsen the grid if the window is very large.
  for (;;) {
    n_side_ = static_cast<int>(std::ceil(2.0 * extent_ / cell_)) + 1;
    double total = 1.0;
    for (int k = 0; k < d; ++k) total *= n_side_;
    if (total <= 4e6) break;
    cell_ *= 2.0;
  }
  std::size_t n_cells = 1;
  for (int k = 0; k < d; ++k) n_cells *= n_side_;
  base_.assign(n_cells, 0.0);
  std::vector<std::uint32_t> counts(n_cells + 1, 0);

  const std::size_t n_balls = cloud_.centers.size();
  std::vector<std::uint8_t> klass(n_balls, 0);  // 0 drop, 1 grid, 2 big, 3 const
  for (std::size_t i = 0; i < n_balls; ++i) {
    const double r = cloud_.marks[i];
    const double center_norm = norm(cloud_.centers[i]);
    if (center_norm + extent_ <= r) {
      klass[i] = 3;
      const double w = std::pow(r, -spec_.gamma);
      const_all_ += w;
    } else if (center_norm - extent_ > r) {
      klass[i] = 0;
    } else if (r >= kFarRadius) {
      klass[i] = 2;
      big_balls_.push_back(static_cast<std::uint32_t>(i));
    } else {
      klass[i] = 1;
    }
  }

  // Cell-walk helper over the bounding box of a ball, classifying each cell.
  auto for_each_cell = [&](std::size_t ball, auto&& on_partial,
                           auto&& on_full) {
    const Vec& w = cloud_.centers[ball];
    const double r = cloud_.marks[ball];
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int k = 0; k < d; ++k) {
      lo[k] = std::max(
          0, static_cast<int>(std::floor((w[k] - r + extent_) / cell_)));
      hi[k] = std::min(
          n_side_ - 1,
          static_cast<int>(std::floor((w[k] + r + extent_) / cell_)));
      if (lo[k] > hi[k]) return;
    }
    const double r2 = r * r;
    int idx[3] = {lo[0], lo[1], lo[2]};
    for (;;) {
      double min2 = 0.0, max2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double a = -extent_ + idx[k] * cell_;
        const double b = a + cell_;
        const double below = a - w[k], above = w[k] - b;
        const double gap = std::max({below, above, 0.0});
        min2 += gap * gap;
        const double far = std::max(std::fabs(w[k] - a), std::fabs(w[k] - b));
        max2 += far * far;
      }
      if (max2 <= r2) {
        std::size_t c = 0;
        for (int k = d - 1; k >= 0; --k) c = c * n_side_ + idx[k];
        on_full(c);
      } else if (min2 <= r2) {
        std::size_t c = 0;
        for (int k = d - 1; k >= 0; --k) c = c * n_side_ + idx[k];
        on_partial(c);
      }
      int k = 0;
      while (k < d && ++idx[k] > hi[k]) {
        idx[k] = lo[k];
        ++k;
      }
      if (k == d) break;
    }
  };

  // Pass 1: accumulate fully-covered weight and count partials.
  for (std::size_t i = 0; i < n_balls; ++i) {
    if (klass[i] != 1) continue;
    const double w = std::pow(cloud_.marks[i], -spec_.gamma);
    for_each_cell(
        i, [&](std::size_t c) { ++counts[c + 1]; },
        [&](std::size_t c) { base_[c] += w; });
  }
  // CSR offsets.
  partial_offset_.assign(n_cells + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c)
    partial_offset_[c + 1] = partial_offset_[c] + counts[c + 1];
  partial_ball_.assign(partial_offset_[n_cells], 0);
  std::vector<std::uint32_t> cursor(partial_offset_.begin(),
                                    partial_offset_.end() - 1);
  // Pass 2: fill partial lists.
  for (std::size_t i = 0; i < n_balls; ++i) {
    if (klass[i] != 1) continue;
    for_each_cell(
        i,
        [&](std::size_t c) {
          partial_ball_[cursor[c]++] = static_cast<std::uint32_t>(i);
        },
        [&](std::size_t) {});
  }
}

inline std::size_t PotentialField::cell_of(const Vec& x) const {
  const int d = spec_.dimension;
  std::size_t c = 0;
  for (int k = d - 1; k >= 0; --k) {
    int i = static_cast<int>(std::floor((x[k] + extent_) / cell_));
    i = std::clamp(i, 0, n_side_ - 1);
    c = c * n_side_ + i;
  }
  return c;
}

double PotentialField::eval_near(const Vec& x) const {
  const std::size_t c = cell_of(x);
  double v = base_[c];
  const std::uint32_t lo = partial_offset_[c], hi = partial_offset_[c + 1];
  for (std::uint32_t t = lo; t < hi; ++t) {
    const std::uint32_t i = partial_ball_[t];
    const double r = cloud_.marks[i];
    if (dist2(x, cloud_.centers[i]) <= r * r) v += std::pow(r, -spec_.gamma);
  }
  return v;
}

double PotentialField::far_field_at(const Vec& anchor) const {
  if (spec_.family != Family::Lacoin) return 0.0;
  double v = const_all_;
  for (std::uint32_t i : big_balls_) {
    const double r = cloud_.marks[i];
    if (dist2(anchor, cloud_.centers[i]) <= r * r)
      v += std::pow(r, -spec_.gamma);
  }
  return v;
}

double PotentialField::eval_exact(const Vec& x) const {
  switch (spec_.family) {
    case Family::Zero:
      return 0.0;
    case Family::Constant:
      return spec_.c;
    case Family::Lacoin: {
      if (norm(x) > extent_ + kWindowSlack)
        throw std::domain_error(
            "PotentialField: point outside guaranteed window");
      return eval_near(x) + far_field_at(x);
    }
    case Family::PolyTail: {
      if (norm(x) > cloud_.window_radius + kWindowSlack)
        throw std::domain_error(
            "PotentialField: point outside guaranteed window");
      double v = polytail_compensation(spec_, cloud_.window_radius, cloud_.halo);
      for (const Vec& w : cloud_.centers) {
        const double q2 = dist2(x, w);
        v += spec_.c9 *
             (q2 <= 1.0 ? 1.0 : std::pow(q2, -0.5 * spec_.gamma));
      }
      return v;
    }
    case Family::Ruess: {
      if (norm(x) > cloud_.window_radius + kWindowSlack)
        throw std::domain_error(
            "PotentialField: point outside guaranteed window");
      for (const auto& ln : lines_) {
        const double s = x[0] * ln[0] + x[1] * ln[1] - ln[2];
        if (std::fabs(s) <= spec_.line_halfwidth) return spec_.m;
      }
      return spec_.M;
    }
  }
  return 0.0;
}

double PotentialField::sup_on_ball(const Vec& center, double radius,
                                   double step) const {
  const int d = spec_.dimension;
  double best = 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil(radius / step)));
  int idx[3] = {-n, d >= 2 ? -n : 0, d >= 3 ? -n : 0};
  int lo[3] = {-n, d >= 2 ? -n : 0, d >= 3 ? -n : 0};
  int hi[3] = {n, d >= 2 ? n : 0, d >= 3 ? n : 0};
  const double r2 = radius * radius;
  for (;;) {
    Vec x = center;
    double off2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double o = idx[k] * step;
      x[k] += o;
      off2 += o * o;
    }
    if (off2 <= r2) best = std::max(best, eval_exact(x));
    int k = 0;
    while (k < d && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      ++k;
    }
    if (k == d) break;
  }
  return best;
}

}  // namespace rplab
