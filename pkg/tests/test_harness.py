import json

import numpy as np
import pytest

import frictionlab as fl
from frictionlab.harness import (
    ExperimentConfig,
    binomial_ci,
    chi_square_uniform,
    ks_two_sample,
    run_experiment,
    wilson_interval,
)


def test_ks_identical_samples():
    x = np.linspace(0, 1, 100)
    assert ks_two_sample(x, x).statistic == 0.0


def test_ks_calibration():
    rng = np.random.default_rng(70)
    a = rng.standard_normal(10_000)
    b = rng.standard_normal(10_000)
    assert ks_two_sample(a, b).pvalue >= 0.01
    c = rng.standard_normal(10_000) + 1.0
    assert ks_two_sample(a, c).pvalue <= 1e-6


def test_ks_empty_guard():
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])


def test_chi_square_uniform_cases():
    grid = (np.arange(16_000) + 0.5) / 16_000 * 2 * np.pi
    assert chi_square_uniform(grid, 16).statistic == 0.0
    rng = np.random.default_rng(71)
    u = rng.uniform(0, 2 * np.pi, 10_000)
    assert chi_square_uniform(u, 16).pvalue >= 0.01
    point = np.zeros(10_000)
    assert chi_square_uniform(point, 16).pvalue <= 1e-10
    with pytest.raises(ValueError):
        chi_square_uniform(u[:100], 16)
    with pytest.raises(ValueError):
        chi_square_uniform(u, 1)


def test_wilson_interval_values():
    lo, hi = binomial_ci(50, 100, 0.95)
    assert lo == pytest.approx(0.404, abs=5e-4)
    assert hi == pytest.approx(0.596, abs=5e-4)
    assert binomial_ci(0, 100)[0] == 0.0
    assert binomial_ci(100, 100)[1] == 1.0
    with pytest.raises(ValueError):
        binomial_ci(1, 0)
    with pytest.raises(ValueError):
        wilson_interval(5, 4, 2.0)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nope", seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="exit_prob", seed=1, n_paths=10)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="exit_prob", seed=1, eps=[-0.1])


def test_config_json_round_trip(tmp_path):
    cfg = ExperimentConfig(kind="exit_prob", seed=5, eps=[0.2], n_paths=500)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    cfg2 = ExperimentConfig.from_json(path)
    assert cfg2 == cfg


def test_exit_prob_experiment_and_determinism(tmp_path):
    cfg = ExperimentConfig(kind="exit_prob", seed=9, eps=[0.2], n_paths=4000,
                           q0=0.0, lo=-1.5, hi=1.5, dt=1e-4,
                           out_dir=str(tmp_path / "run1"))
    r1 = run_experiment(cfg)
    assert r1.passed, r1.verdicts
    assert (tmp_path / "run1" / "report.json").exists()
    assert (tmp_path / "run1" / "samples.csv").exists()
    cfg2 = ExperimentConfig(kind="exit_prob", seed=9, eps=[0.2], n_paths=4000,
                            q0=0.0, lo=-1.5, hi=1.5, dt=1e-4,
                            out_dir=str(tmp_path / "run2"))
    r2 = run_experiment(cfg2)
    a = json.loads(r1.to_json(with_runtime=False))
    b = json.loads(r2.to_json(with_runtime=False))
    a["config"].pop("out_dir")
    b["config"].pop("out_dir")
    assert a == b
    # byte-identity modulo the runtime/out_dir fields
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_worker_count_does_not_change_estimates():
    base = dict(kind="exit_prob", seed=11, eps=[0.2], n_paths=2000,
                q0=0.2, lo=-1.5, hi=1.5, dt=1e-4)
    r1 = run_experiment(ExperimentConfig(workers=1, **base))
    r2 = run_experiment(ExperimentConfig(workers=2, **base))
    assert r1.estimates == r2.estimates


def test_error_attached_to_report():
    cfg = ExperimentConfig(kind="exit_prob", seed=1, eps=[0.2], n_paths=200,
                           q0=2.0, lo=-1.0, hi=1.0)  # start outside (lo, hi)
    rep = run_experiment(cfg)
    assert rep.error is not None
    assert not rep.passed


def test_verdicts_cite_tolerances():
    cfg = ExperimentConfig(kind="exit_prob", seed=9, eps=[0.2], n_paths=1000,
                           lo=-1.5, hi=1.5, dt=1e-4)
    rep = run_experiment(cfg)
    assert all(v["tolerance"] for v in rep.verdicts)


def test_exit_time_runner_smoke():
    cfg = ExperimentConfig(kind="exit_time", seed=13, eps=[0.2], n_paths=5000,
                           q0=0.0, lo=-1.5, hi=1.5, dt=4e-5)
    rep = run_experiment(cfg)
    assert rep.error is None
    assert rep.passed, rep.verdicts


def test_laplace_runner_smoke():
    cfg = ExperimentConfig(kind="laplace", seed=14, eps=[0.2], n_paths=20_000,
                           q0=0.0, lo=-1.5, hi=1.5, dt=4e-5,
                           lam_values=[0.5, 1.0])
    rep = run_experiment(cfg)
    assert rep.error is None
    assert rep.passed, rep.verdicts


def test_limit_vs_eps_runner_smoke():
    cfg = ExperimentConfig(kind="limit_vs_eps", seed=15, eps=[0.02],
                           n_paths=5000, q0=0.0, T=0.5, dt=1e-3)
    rep = run_experiment(cfg)
    assert rep.error is None
    assert rep.passed, rep.verdicts


def test_mixing_runner_with_explicit_parameters():
    cfg = ExperimentConfig(kind="mixing_uniformity", seed=16, eps=[0.1],
                           n_paths=400, q0=0.0, dt=5e-5,
                           delta=0.3, delta_prime=0.03, delta2=0.5, M=3)
    rep = run_experiment(cfg)
    assert rep.error is None  # explicit parameters bypass the schedule ladder
    assert "chi_square_pvalue" in rep.estimates
