// rp-lab: experiment orchestration.
//
// One flat ExperimentConfig drives every subcommand; validate() reports all
// invariant violations (field-tagged so the CLI can map them back to config
// file lines or flags), run() executes the experiment and writes CSV/JSON
// artifacts plus a manifest into the output directory.  Identical
// (config, seed, workers) triples reproduce byte-identical CSV bodies.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rplab/geom.hpp"
#include "rplab/paths.hpp"
#include "rplab/potentials.hpp"

namespace rplab {

enum class ExperimentKind {
  PotentialStats,
  Survival,
  Lyapunov,
  Shape,
  Rate,
  Phase,
  Eigen,
  LdpCheck,
};

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PotentialStats;
  PotentialSpec potential;
  PathConfig path;

  long n_env = 100;
  long n_paths = 1000;

  std::vector<double> t_grid = {1.0, 2.0, 3.0, 4.0};       // survival, ldp-check
  std::vector<double> lambda_grid = {0.25, 0.5, 1.0, 2.0}; // lyapunov/rate/phase
  std::vector<double> scales = {4.0, 8.0, 16.0};           // hitting scale grid
  std::vector<double> R_grid = {1.0, 2.0, 4.0};            // eigen domains

  double lambda = 0.5;       // shape: single killing rate
  double mesh_h = 0.0625;    // eigen lattice spacing
  Vec x = vec(1.0);          // lyapunov/rate target vector
  Vec h_vec = vec0();        // phase drift h / ldp-check velocity v
  double ball_radius = 0.2;  // ldp-check endpoint ball radius
  double slack = 0.1;        // rate sandwich verdict slack
  int n_bootstrap = 200;
  long dump_paths = 0;       // survival: trajectories to dump in binary

  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "rp_lab_out";
};

struct ConfigViolation {
  std::string field;    // config key ("gamma", "t-grid", ...) or "" if global
  std::string message;
};

// Every invariant violation across the config graph; empty iff runnable.
std::vector<ConfigViolation> validate(const ExperimentConfig& config);

// Runs the experiment, writing artifacts into config.out_dir.  Assumes the
// config validates (call validate() first); throws std::runtime_error on
// resource failures.  Returns the list of files written (relative names).
std::vector<std::string> run(const ExperimentConfig& config);

// Canonical "key=value\n" echo of every field, sorted by key; the manifest
// hash is computed over this string.
std::string config_echo(const ExperimentConfig& config);

// Comma-separated list of doubles <-> vector, used by the CLI and the config
// file parser; throws std::invalid_argument with the offending token.
std::vector<double> parse_double_list(const std::string& text);
Vec parse_vec(const std::string& text, int expected_dim);

}  // namespace rplab
