// rp-lab: one sampled environment bundled with its evaluation machinery.
//
// Monte Carlo drivers hold an Environment per (spec, window, seed) cell and
// hand lightweight EnvPotential callables to the path loops.  EnvPotential
// dispatches on a small mode tag instead of a virtual call so the per-step
// cost stays a branch plus the grid lookup.
#pragma once

#include <cstdint>
#include <memory>

#include "rplab/geom.hpp"
#include "rplab/potentials.hpp"

namespace rplab {

// Path-loop potential callable.  For the ball-cloud family the far field
// (balls with radius >= PotentialField::kFarRadius plus whole-window balls)
// is frozen at an anchor point; its spatial variation over a path is bounded
// by twice the expected far mass, negligible against estimator tolerances.
class EnvPotential {
 public:
  enum class Mode { kZero, kConstant, kFrozenFar, kExact };

  EnvPotential() = default;
  static EnvPotential zero() { return EnvPotential(Mode::kZero, nullptr, 0.0); }
  static EnvPotential constant(double c) {
    return EnvPotential(Mode::kConstant, nullptr, c);
  }
  static EnvPotential frozen_far(const PotentialField& f, const Vec& anchor) {
    return EnvPotential(Mode::kFrozenFar, &f, f.far_field_at(anchor));
  }
  static EnvPotential exact(const PotentialField& f) {
    return EnvPotential(Mode::kExact, &f, 0.0);
  }

  double operator()(const Vec& x) const {
    switch (mode_) {
      case Mode::kZero: return 0.0;
      case Mode::kConstant: return aux_;
      case Mode::kFrozenFar: return field_->eval_near(x) + aux_;
      case Mode::kExact: return field_->eval_exact(x);
    }
    return 0.0;
  }

 private:
  EnvPotential(Mode mode, const PotentialField* field, double aux)
      : mode_(mode), field_(field), aux_(aux) {}
  Mode mode_ = Mode::kZero;
  const PotentialField* field_ = nullptr;
  double aux_ = 0.0;  // constant level or frozen far-field value
};

struct Environment {
  PotentialSpec spec;
  std::uint64_t seed = 0;
  double window_radius = 0.0;  // 0 for deterministic families (no guard)
  PointCloud cloud;
  std::unique_ptr<PotentialField> field;

  static Environment prepare(const PotentialSpec& spec, double window_radius,
                             std::uint64_t seed) {
    Environment env;
    env.spec = spec;
    env.seed = seed;
    const bool deterministic = spec.family == Family::Zero ||
                               spec.family == Family::Constant;
    env.window_radius = deterministic ? 0.0 : window_radius;
    env.cloud = deterministic ? PointCloud::empty(spec, window_radius)
                              : sample_cloud(spec, window_radius, seed);
    env.field = std::make_unique<PotentialField>(spec, env.cloud);
    return env;
  }

  // Exact pointwise value (window-checked for sampled families).
  double eval(const Vec& x) const { return (*field)(x); }

  // Callable for path loops anchored near `anchor` (start point or segment
  // midpoint); exact for every family except the ball cloud, which uses the
  // frozen far field.
  EnvPotential path_potential(const Vec& anchor) const {
    switch (spec.family) {
      case Family::Zero: return EnvPotential::zero();
      case Family::Constant: return EnvPotential::constant(spec.c);
      case Family::Lacoin: return EnvPotential::frozen_far(*field, anchor);
      default: return EnvPotential::exact(*field);
    }
  }
};

}  // namespace rplab
