"""End-to-end smoke tests for the Python bindings.

Each test drives one public entry point with a small budget and checks it
against a closed form or an internal consistency property; the heavy
statistical validation lives in the C++ test suites.
"""

import json
import math

import numpy as np
import pytest

import rplab


def test_spec_factories_and_moments():
    lac = rplab.PotentialSpec.lacoin(2, 3.0, 1.5)
    assert lac.family == "lacoin"
    assert lac.dimension == 2
    assert lac.vbar == 0.0
    lac.validate()
    mo = rplab.closed_form_moments(2, 3.0, 1.5)
    assert mo["mean"] == pytest.approx(math.pi * 1.5 / 2.5, rel=1e-12)
    assert mo["variance"] == pytest.approx(math.pi * 1.5 / 5.5, rel=1e-12)
    with pytest.raises(ValueError):
        rplab.PotentialSpec.lacoin(2, 0.4, 1.5).validate()
    assert rplab.covariance_exact(2, 3.0, 1.5, 0.0) == pytest.approx(
        mo["variance"], rel=1e-6
    )
    assert rplab.truncation_radius(lac) > 10.0


def test_environment_eval_and_reproducibility():
    spec = rplab.PotentialSpec.lacoin(2, 3.0, 1.5)
    e1 = rplab.Environment(spec, 4.0, 42)
    e2 = rplab.Environment(spec, 4.0, 42)
    assert e1.cloud_size == e2.cloud_size
    assert e1.cloud_size > 0
    v0 = e1.eval([0.0, 0.0])
    assert v0 == e2.eval([0.0, 0.0])
    assert v0 >= 0.0
    vals = e1.eval_many(np.array([[0.0, 0.0], [1.0, 1.0]]))
    assert vals.shape == (2,)
    assert vals[0] == v0
    assert e1.sup_on_ball([0.0, 0.0], 1.0) >= v0
    with pytest.raises(ValueError):
        e1.eval([100.0, 0.0])


def test_survival_matches_constant_closed_form():
    env = rplab.Environment(rplab.PotentialSpec.constant(2, 0.7), 0.0, 1)
    t = [1.0, 2.0, 3.0, 4.0]
    curve = rplab.survival_curve(env, t, n_paths=60, seed=3, dt=1e-3)
    for row, tg in zip(curve, t):
        assert row["t"] == tg
        assert row["value"] == pytest.approx(math.exp(-0.7 * tg), rel=1e-9)
    fit = rplab.decay_rate(t, [row["value"] for row in curve])
    assert fit["slope"] == pytest.approx(0.7, abs=1e-9)


def test_hitting_functional_zero_potential_d1():
    env = rplab.Environment(rplab.PotentialSpec.zero(1), 0.0, 1)
    r = rplab.hitting_functional(
        env, [4.0], [0.0], lam=2.0, n_paths=2000, seed=5, dt=1e-2, t_max=30.0
    )
    # Exact one-dimensional value: a = sqrt(2 lam) (|x| - 1) = 6.
    assert r["n_hits"] > 1500
    assert not r["upper_bound_only"]
    assert r["a_hat"] == pytest.approx(6.0, abs=0.2)


def test_hitting_on_sampled_environment():
    spec = rplab.PotentialSpec.lacoin(2, 3.0, 1.5)
    env = rplab.Environment(spec, 8.0, 3)
    r = rplab.hitting_functional(
        env,
        [0.0, 0.0],
        [5.0, 0.0],
        lam=0.5,
        n_paths=300,
        seed=4,
        dt=1e-2,
        t_max=40.0,
        window_radius=8.0,
    )
    # V >= 0, so the cost dominates the free-motion decay sqrt(2 lam) * 4.
    assert r["n_hits"] > 0
    assert r["a_hat"] > 0.8 * 4.0 * math.sqrt(1.0)
    assert r["a_hat"] < 40.0


def test_metric_requires_separation_and_is_positive():
    env = rplab.Environment(rplab.PotentialSpec.constant(2, 0.3), 0.0, 1)
    m = rplab.metric_d(
        env, [0.0, 0.0], [4.0, 0.0], n_start=3, n_paths=200, seed=7, t_max=60.0
    )
    assert m["value"] > 0.0
    assert not m["censored"]
    assert m["value"] == pytest.approx(max(m["term_xy"], m["term_yx"]))
    with pytest.raises(ValueError):
        rplab.metric_d(env, [0.0, 0.0], [1.5, 0.0])


def test_green_density_constant_d1():
    env = rplab.Environment(rplab.PotentialSpec.constant(1, 0.5), 0.0, 1)
    g = rplab.green_density(
        env, [0.0], [2.0], halfwidth=0.25, n_paths=800, seed=9, dt=5e-3,
        t_max=30.0
    )
    # Exact density exp(-|x|)/1 averaged over [1.75, 2.25].
    cell_avg = (math.exp(-1.75) - math.exp(-2.25)) / 0.5
    assert g["value"] == pytest.approx(cell_avg, abs=0.03)
    assert g["tail_fraction"] < 0.02
    assert g["n_window_violations"] == 0


def test_lyapunov_curve_and_rate_function_zero_potential():
    spec = rplab.PotentialSpec.zero(1)
    out = rplab.lyapunov_curve(
        spec,
        [1.0],
        [0.5, 2.0],
        scales=[4.0, 8.0, 16.0],
        n_paths=300,
        n_env=2,
        seed=11,
        dt=1e-2,
        t_max=60.0,
    )
    assert out["lambdas"] == [0.5, 2.0]
    a = [row["alpha_hat"] for row in out["by_lambda"]]
    # Largest-scale truth: sqrt(2 lam) (1 - 1/16).
    assert a[0] == pytest.approx(math.sqrt(1.0) * 15 / 16, abs=0.05)
    assert a[1] == pytest.approx(math.sqrt(4.0) * 15 / 16, abs=0.05)
    # Flat potential: a/r rises toward sqrt(2 lam), so the monotone-decreasing
    # convergence diagnostic fires by design.
    assert not any(row["monotone_ok"] for row in out["by_lambda"])

    lams = [0.25, 0.5, 1.0, 2.0, 4.0]
    alphas = [math.sqrt(2.0 * l) for l in lams]
    rep = rplab.rate_function(
        lams,
        alphas,
        [],
        vbar=0.0,
        x_norm=1.0,
        lambda_d=rplab.dirichlet_ball_eigenvalue(1),
        e_sup_v=0.0,
        slack=0.1,
    )
    assert rep["I_hat"] == pytest.approx(0.5, abs=0.02)
    assert rep["within_sandwich"]
    assert not rep["right_censored"]


def test_phase_verdict_exact_curves():
    dirs = rplab.direction_grid(2)
    assert len(dirs) == 16
    lams = [0.0625, 0.25, 1.0, 4.0]
    alpha = [[math.sqrt(2.0 * l) for l in lams] for _ in dirs]
    v = rplab.phase_verdict(
        dirs, lams, alpha, h=[1.0, 0.0], vbar=0.0, tol_lambda=1e-5, d=2
    )
    assert v["ballistic"]
    assert not v["undetermined"]
    # dual(h) = 1/sqrt(2 lam) = 1 at lam = 1/2.
    assert v["lambda_h"] == pytest.approx(0.5, abs=1e-3)


def test_principal_eigenvalue_dirichlet_ball():
    env = rplab.Environment(rplab.PotentialSpec.zero(1), 0.0, 1)
    r = rplab.principal_eigenvalue(env, R=1.0, h=1.0 / 64)
    assert r["lam"] == pytest.approx(math.pi**2 / 8.0, rel=0.01)
    assert r["perron_ok"]
    assert r["residual"] < 1e-9


def test_lambda_v_limit_zero_potential():
    rep = rplab.lambda_v_limit(
        rplab.PotentialSpec.zero(1), [1.0, 2.0, 4.0], [1, 2], h=1.0 / 16
    )
    assert rep["mean_by_R"][0] > rep["mean_by_R"][1] > rep["mean_by_R"][2]
    assert all(seq["non_increasing"] for seq in rep["per_env"])
    # pi^2 / (8 R^2) at R = 4.
    assert rep["limit_last"] == pytest.approx(math.pi**2 / 128.0, rel=0.05)


def test_run_experiment_roundtrip(tmp_path):
    cfg = rplab.ExperimentConfig()
    cfg.kind = "survival"
    cfg.potential = rplab.PotentialSpec.zero(2)
    cfg.path.dimension = 2
    cfg.path.dt = 1e-2
    cfg.path.t_max = 4.0
    cfg.t_grid = [1.0, 2.0, 3.0, 4.0]
    cfg.n_paths = 50
    cfg.seed = 7
    cfg.out_dir = str(tmp_path / "out")
    files = rplab.run_experiment(cfg)
    assert "survival.csv" in files
    assert "manifest.json" in files
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["kind"] == "survival"
    body = (tmp_path / "out" / "survival.csv").read_bytes()

    cfg.out_dir = str(tmp_path / "out2")
    rplab.run_experiment(cfg)
    assert (tmp_path / "out2" / "survival.csv").read_bytes() == body

    echo = rplab.config_echo(cfg)
    assert "seed=7" in echo


def test_validate_config_reports_field_tags():
    cfg = rplab.ExperimentConfig()
    cfg.kind = "lyapunov"
    cfg.potential = rplab.PotentialSpec.lacoin(2, 0.4, 1.5)
    issues = rplab.validate_config(cfg)
    assert issues
    assert any(field == "family" for field, _ in issues)
    with pytest.raises(ValueError):
        rplab.run_experiment(cfg)
