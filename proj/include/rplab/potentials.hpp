// rp-lab: stationary random potentials driven by Poisson clouds.
//
// Families:
//   Lacoin   — marked Poisson points (center w, radius r>=1) with mark tail
//              P(r >= s) = s^-delta; V(x) = sum r_i^-gamma over balls covering x.
//   PolyTail — unit-intensity Poisson centers, V(x) = sum W(x - w_j) with
//              W(y) = c9 * (|y|^-gamma ∧ 1), gamma > d.
//   Ruess    — planar Poisson line process (rho, theta) with intensity
//              nu * Leb x Uniform[0,pi); V = m within distance R of a line,
//              else M.
//   Constant / Zero — deterministic controls.
//
// Clouds are sampled on a window ball B(0, L) *plus the mark-dependent halo*
// {(w, r): |w| <= L + r}, so that inside B(0, L) the Boolean model has exactly
// the infinite-volume law (up to an explicitly budgeted mark-radius cutoff,
// see sample_cloud).
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/rng.hpp"

namespace rplab {

enum class Family { Zero, Constant, Lacoin, PolyTail, Ruess };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct PotentialSpec {
  Family family = Family::Zero;
  int dimension = 2;
  double gamma = 0.0;           // Lacoin / PolyTail decay exponent
  double delta = 0.0;           // Lacoin mark-tail exponent
  double c9 = 0.0;              // PolyTail amplitude
  double nu = 0.0;              // Ruess line intensity
  double m = 0.0, M = 0.0;      // Ruess low / high levels
  double line_halfwidth = 0.0;  // Ruess thickness R
  double c = 0.0;               // Constant level

  // Declared essential infimum of V; an input of the model, never estimated.
  double vbar() const;

  // Empty string when valid, else a human-readable violation.
  std::string validate_message() const;
  void validate() const;  // throws std::invalid_argument on violation

  static PotentialSpec zero(int d);
  static PotentialSpec constant(int d, double level);
  static PotentialSpec lacoin(int d, double gamma, double delta);
  static PotentialSpec polytail(int d, double gamma, double c9);
  static PotentialSpec ruess(double nu, double m, double M, double halfwidth);
};

struct TruncationPolicy {
  double target_sup_error = 0.01;   // eps, potential units
  double evaluation_radius = 5.0;   // R0 > 1
  double failure_probability = 1e-6;  // p in (0,1)
};

struct PointCloud {
  int dimension = 0;
  Family family = Family::Zero;
  std::vector<Vec> centers;    // Ruess: (rho, theta, 0) line parameters
  std::vector<double> marks;   // Lacoin radii; empty otherwise
  double window_radius = 0.0;  // guaranteed-evaluation ball radius L
  double halo = 0.0;           // PolyTail fixed halo width
  double mark_cutoff = 0.0;    // Lacoin: marks sampled on [1, mark_cutoff)
  std::uint64_t seed = 0;

  std::size_t size() const { return centers.size(); }
  static PointCloud empty(const PotentialSpec& spec, double window_radius);
};

// Exact-law sample of the cloud on the window plus halo; identical
// (spec, window_radius, seed) triples give bit-identical clouds.  Lacoin marks
// are sampled in radius shells [2^k, 2^(k+1)) up to a cutoff chosen so that
// the expected potential mass of the discarded huge-mark balls inside the
// window is below 1e-6 (closed-form tail integral).  Throws for Zero/Constant.
PointCloud sample_cloud(const PotentialSpec& spec, double window_radius,
                        std::uint64_t seed);

// Expected number of sampled points/lines for a window.  For Lacoin the count
// depends on the mark cutoff; pass 0 to use the sampler's own cutoff policy.
double expected_cloud_size(const PotentialSpec& spec, double window_radius,
                           double mark_cutoff = 0.0);

// The cutoff radius the sampler would pick for this window (Lacoin only).
double lacoin_mark_cutoff(const PotentialSpec& spec, double window_radius);

// Coupled restriction to a smaller window: drops every ball/line/center whose
// influence region does not meet B(0, L_small).  Restriction of a sample is a
// sample of the smaller window, and pointwise V can only decrease.
PointCloud restrict_cloud(const PotentialSpec& spec, const PointCloud& cloud,
                          double smaller_window);

// Direct O(N) evaluation; exact for the sampled cloud.  For PolyTail the
// deterministic expected contribution of the centers beyond the sampled halo
// is added back as a compensation constant, making the value at the window
// center unbiased for the infinite-volume field.  Throws std::domain_error
// outside the guaranteed window.
double eval_potential(const PotentialSpec& spec, const PointCloud& cloud,
                      const Vec& x);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Closed-form stationary moments of the Lacoin family:
//   E V = L_d * delta / (gamma + delta - d),
//   Var V = L_d * delta / (2*gamma + delta - d).
// Throws when gamma + delta - d <= 0 (the potential is a.s. infinite).
Moments closed_form_moments(int d, double gamma, double delta);

// log E exp(s * sum_i r_i^-gamma * 1{|w_i| <= r_i + R})
//   = int_1^inf delta*L_d*(r+R)^d * r^(-delta-1) * (e^{s r^-gamma} - 1) dr,
// adaptive quadrature, relative tolerance 1e-8.
double exp_moment_log(int d, double gamma, double delta, double s, double R);
double exp_moment(int d, double gamma, double delta, double s, double R);

// Smallest radius on the geometric grid R_j = 2*R0*2^(j/4), j >= 1, satisfying
// the family's tail bound exp(-2 eps R^gamma) <= p (Lacoin) resp.
// exp(-4 eps R^gamma) <= p (PolyTail).
double truncation_radius(const TruncationPolicy& policy,
                         const PotentialSpec& spec);

struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_env = 0;
};

// Sample covariance of (V(0), V(x)) over independent clouds with a
// normal-approximation standard error.
CovarianceEstimate empirical_covariance(const PotentialSpec& spec, const Vec& x,
                                        long n_env, std::uint64_t seed);

// Unbiased single-cloud estimator of Cov(V(0), V(x)) for the Lacoin family:
// by the Campbell formula the covariance of two Poisson linear statistics is
// the integral of the product, i.e. only balls covering *both* points
// contribute:  T(w) = sum_i r_i^(-2 gamma) 1{ball i covers 0 and x}.
// Far lower variance than the product estimator at large |x|.
double shared_ball_covariance(const PotentialSpec& spec, const PointCloud& cloud,
                              const Vec& x);

// Exact covariance by quadrature of the lens volume (same Campbell identity).
double lacoin_covariance_exact(int d, double gamma, double delta,
                               double distance);

// ---------------------------------------------------------------------------
// Indexed evaluation engine.
//
// For Lacoin clouds a uniform cell grid (cell 0.5) stores, per cell, the
// accumulated weight of balls fully covering the cell plus the list of balls
// whose boundary crosses it; balls with r >= far_radius (or fully containing
// the window) are kept in a short global list.  Exact evaluation scans
// base + partials + global list.  Path loops may use a "frozen far field":
// the global-list contribution is evaluated once at an anchor point and
// treated as constant along the path (spatial variation <= 2 E[V from
// r >= far_radius], about 3e-3 at the defaults), which the estimators' own
// tolerances dominate.
// ---------------------------------------------------------------------------
class PotentialField {
 public:
  PotentialField(const PotentialSpec& spec, const PointCloud& cloud);

  const PotentialSpec& spec() const { return spec_; }
  const PointCloud& cloud() const { return cloud_; }
  double window_radius() const { return cloud_.window_radius; }

  // Exact value; throws std::domain_error outside the guaranteed window.
  double eval_exact(const Vec& x) const;
  double operator()(const Vec& x) const { return eval_exact(x); }

  // Far-field contribution (global list + whole-window balls) at a point.
  double far_field_at(const Vec& anchor) const;

  // Near-field part only (grid base + boundary partials); add a frozen
  // far_field_at() value to obtain the path-loop approximation.
  double eval_near(const Vec& x) const;

  // Scan-based approximation of sup over B(center, radius), lattice step
  // `step` (a lower bound of the true sup; adequate for the piecewise-
  // constant Lacoin field at step ~ 0.05).
  double sup_on_ball(const Vec& center, double radius, double step) const;

  bool has_grid() const { return !base_.empty(); }
  static constexpr double kFarRadius = 16.0;

 private:
  void build_lacoin_index();
  inline std::size_t cell_of(const Vec& x) const;

  PotentialSpec spec_;
  PointCloud cloud_;

  // Lacoin grid index.
  double cell_ = 0.5;
  double extent_ = 0.0;  // grid covers [-extent_, extent_]^d
  int n_side_ = 0;
  std::vector<double> base_;
  std::vector<std::uint32_t> partial_offset_;
  std::vector<std::uint32_t> partial_ball_;
  std::vector<std::uint32_t> big_balls_;
  double const_all_ = 0.0;  // balls containing the whole window

  // Ruess precomputed line normals.
  std::vector<std::array<double, 3>> lines_;  // (cos t, sin t, rho)

  friend struct PathPotential;
};

// Lightweight callable for path loops: near field exact, far field frozen at
// the anchor.  For non-Lacoin families it forwards to the exact evaluator.
struct PathPotential {
  const PotentialField* field = nullptr;
  double frozen_far = 0.0;

  PathPotential() = default;
  PathPotential(const PotentialField& f, const Vec& anchor)
      : field(&f), frozen_far(f.far_field_at(anchor)) {}

  double operator()(const Vec& x) const {
    if (field->spec().family == Family::Lacoin)
      return field->eval_near(x) + frozen_far;
    return field->eval_exact(x);
  }
};

}  // namespace rplab
