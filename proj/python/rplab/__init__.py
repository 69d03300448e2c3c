"""Simulation and estimation laboratory for Brownian motion in stationary
random potentials.

The heavy lifting lives in the compiled :mod:`rplab._core` extension;
this package re-exports its public surface.
"""

from ._core import (
    Environment,
    ExperimentConfig,
    PathConfig,
    PotentialSpec,
    closed_form_moments,
    config_echo,
    covariance_exact,
    decay_rate,
    direction_grid,
    dirichlet_ball_eigenvalue,
    endpoint_ldp_check,
    exp_moment_log,
    expected_cloud_size,
    green_density,
    hitting_functional,
    lambda_v_limit,
    lyapunov_curve,
    metric_d,
    phase_verdict,
    principal_eigenvalue,
    rate_function,
    run_experiment,
    shape_diagnostic,
    survival_curve,
    truncation_radius,
    validate_config,
)

__version__ = "0.1.0"

__all__ = [
    "Environment",
    "ExperimentConfig",
    "PathConfig",
    "PotentialSpec",
    "closed_form_moments",
    "config_echo",
    "covariance_exact",
    "decay_rate",
    "direction_grid",
    "dirichlet_ball_eigenvalue",
    "endpoint_ldp_check",
    "exp_moment_log",
    "expected_cloud_size",
    "green_density",
    "hitting_functional",
    "lambda_v_limit",
    "lyapunov_curve",
    "metric_d",
    "phase_verdict",
    "principal_eigenvalue",
    "rate_function",
    "run_experiment",
    "shape_diagnostic",
    "survival_curve",
    "truncation_radius",
    "validate_config",
]
