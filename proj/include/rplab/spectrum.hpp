// rp-lab: principal Dirichlet eigenvalue of -1/2 Laplacian + V on a ball.
//
// Finite differences on a uniform lattice with a staircase Dirichlet mask
// (nodes strictly inside B(0,R) are unknowns, everything else is clamped to
// zero).  The smallest eigenvalue is computed matrix-free by shifted inverse
// power iteration with a Jacobi-preconditioned conjugate-gradient inner
// solver; the decreasing-in-R sequence lambda_hat(R) is the finite-volume
// approximation of the limiting spectral bottom lambda_V.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/potentials.hpp"

namespace rplab {

struct GridProblem {
  int dimension = 1;
  double R = 1.0;       // ball radius
  double h = 1.0 / 16;  // lattice spacing, h <= R/16
  int half_span = 0;    // nodes at m*h, |m| <= half_span per axis
  long n_nodes = 0;     // packed in-ball unknowns

  std::vector<double> V;              // per packed node
  std::vector<std::int32_t> packed;   // dense box cell -> packed index or -1
  std::vector<Vec> node_position;     // per packed node

  std::string validate_message() const;

  // Samples the potential callable at every in-ball node.
  static GridProblem build(int dimension, double R, double h,
                           const std::function<double(const Vec&)>& potential);

  // y = (-1/2 Lap_h + V) x on packed nodes (Dirichlet outside the ball).
  void apply(std::span<const double> x, std::span<double> y) const;
};

struct EigenResult {
  double lambda = 0.0;
  double residual = 0.0;  // ||A v - lambda v||_2 with ||v||_2 = 1
  int iterations = 0;     // outer inverse-iteration steps
  bool perron_ok = true;  // eigenvector entries nonnegative up to tolerance
  std::vector<double> eigenvector;
};

// Smallest eigenvalue to residual <= tol; throws on non-convergence and
// reports a Perron failure (sign-changing eigenvector) via perron_ok.
EigenResult principal_eigenvalue(const GridProblem& problem,
                                 double tol = 1e-10, int max_outer = 200);

struct LambdaVPoint {
  double R = 0.0;
  double lambda_hat = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct LambdaVSequence {
  std::uint64_t env_seed = 0;
  std::vector<LambdaVPoint> points;
  bool non_increasing = true;  // within solver tolerance
};

struct LambdaVReport {
  std::vector<LambdaVSequence> per_env;
  std::vector<double> mean_by_R;    // mean lambda_hat over environments
  double limit_extrapolated = 0.0;  // Aitken on the mean sequence (guarded)
  double limit_last = 0.0;          // mean at R_max; limit in [extrap, last]
  double spread_last = 0.0;         // max - min over environments at R_max
};

// Per-environment eigenvalue sequences on a growing R grid.  One cloud per
// seed is sampled at the largest window and shared across all R (coupled
// domains), so each sequence is non-increasing up to discretization noise.
LambdaVReport lambda_V_limit(const PotentialSpec& spec,
                             std::span<const double> R_grid,
                             std::span<const std::uint64_t> seeds, double h,
                             int workers = 1);

}  // namespace rplab
