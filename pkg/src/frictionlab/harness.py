"""Declarative experiment runner: Monte Carlo vs oracle with explicit verdicts.

Each experiment kind confronts simulator output with the matching oracle
quantity and records pass/fail verdicts that cite the tolerance used.
Reports are deterministic given (config, seed): runtime metadata lives under
its own key so the rest of the JSON is byte-stable.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import stats as sps

from . import oracle as orc
from . import sde
from .limitproc import limit_marginal_1d
from .profiles import FrictionProfile, make_profile
from .scale import ProjectedScale, ScaleEvaluator
from .glue import project_1d

__all__ = [
    "ExperimentConfig",
    "StatsReport",
    "TestResult",
    "run_experiment",
    "ks_two_sample",
    "chi_square_uniform",
    "binomial_ci",
    "wilson_interval",
]

EXPERIMENT_KINDS = (
    "exit_prob",
    "exit_time",
    "laplace",
    "mixing_uniformity",
    "eps_convergence",
    "limit_vs_eps",
)


# ---------------------------------------------------------------------------
# statistics helpers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestResult:
    statistic: float
    pvalue: float


def ks_two_sample(a, b) -> TestResult:
    """Two-sample Kolmogorov-Smirnov statistic with asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be nonempty")
    res = sps.ks_2samp(a, b, method="asymp")
    return TestResult(statistic=float(res.statistic), pvalue=float(res.pvalue))


def chi_square_uniform(angles, bins: int = 16) -> TestResult:
    """Pearson chi-square of angles in [0, 2pi) against the uniform law."""
    angles = np.asarray(angles, dtype=float)
    if bins < 2:
        raise ValueError("bins must be at least 2")
    if angles.size < 10 * bins:
        raise ValueError(f"need at least {10 * bins} angles for {bins} bins")
    counts, _ = np.histogram(angles, bins=bins, range=(0.0, 2.0 * math.pi))
    stat, p = sps.chisquare(counts)
    return TestResult(statistic=float(stat), pvalue=float(p))


def wilson_interval(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Wilson score interval at z standard normal units."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not (0 <= successes <= trials):
        raise ValueError("need 0 <= successes <= trials")
    p = successes / trials
    z2 = z * z
    center = (p + z2 / (2 * trials)) / (1 + z2 / trials)
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials**2)) / (1 + z2 / trials)
    lo = 0.0 if successes == 0 else max(center - half, 0.0)
    hi = 1.0 if successes == trials else min(center + half, 1.0)
    return lo, hi


def binomial_ci(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson interval at a two-sided confidence level."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must be in (0, 1)")
    z = float(sps.norm.ppf(0.5 + level / 2.0))
    return wilson_interval(successes, trials, z)


# ---------------------------------------------------------------------------
# configuration and report containers
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    kind: str
    seed: int
    profile: str = "quadratic"
    profile_params: dict = field(default_factory=dict)
    eps: list = field(default_factory=lambda: [0.1])
    n_paths: int = 10_000
    dt: Optional[float] = None
    scheme: str = "natural_scale"
    q0: float = 0.0
    theta0: float = 0.0
    lo: Optional[float] = None
    hi: Optional[float] = None
    T: float = 1.0
    lam_values: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    bins: int = 16
    delta: Optional[float] = None
    delta_prime: Optional[float] = None
    delta2: Optional[float] = None
    M: Optional[int] = None
    strict: bool = False
    workers: Optional[int] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choices: {EXPERIMENT_KINDS}")
        if self.n_paths < 100:
            raise ValueError("n_paths must be at least 100")
        if any(e <= 0 for e in self.eps):
            raise ValueError("eps values must be positive")

    @property
    def z_crit(self) -> float:
        return 4.0 if self.strict else 3.0

    @property
    def p_crit(self) -> float:
        return 0.01

    def build_profile(self) -> FrictionProfile:
        return make_profile(self.profile, **self.profile_params)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class StatsReport:
    kind: str
    config: dict
    verdicts: list = field(default_factory=list)
    estimates: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)  # name -> list of columns
    error: Optional[str] = None
    runtime: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and all(v["passed"] for v in self.verdicts)

    def add_verdict(self, name: str, passed: bool, tolerance: str, **details):
        self.verdicts.append({"name": name, "passed": bool(passed),
                              "tolerance": tolerance, **details})

    def payload(self, with_runtime: bool = True) -> dict:
        d = {
            "kind": self.kind,
            "config": self.config,
            "passed": self.passed,
            "verdicts": self.verdicts,
            "estimates": self.estimates,
            "oracle": self.oracle,
            "error": self.error,
        }
        if with_runtime:
            d["runtime"] = self.runtime
        return d

    def to_json(self, with_runtime: bool = True) -> str:
        return json.dumps(self.payload(with_runtime), sort_keys=True, indent=2,
                          default=_json_default)

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report = out / "report.json"
        report.write_text(self.to_json() + "\n")
        csv = out / "samples.csv"
        with open(csv, "w") as fh:
            names = list(self.samples)
            if names:
                cols = [np.asarray(self.samples[n]) for n in names]
                fh.write(",".join(names) + "\n")
                rows = max(len(c) for c in cols)
                for i in range(rows):
                    fh.write(",".join(
                        (f"{c[i]:.17g}" if i < len(c) else "") for c in cols) + "\n")
        return report, csv


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _seed_for(cfg: ExperimentConfig, index: int) -> int:
    return (cfg.seed + 0x9E3779B1 * index) & 0x7FFFFFFF


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig) -> StatsReport:
    """Run one experiment; failures are attached to the report."""
    if cfg.workers is not None:
        import numba

        numba.set_num_threads(max(1, int(cfg.workers)))
    report = StatsReport(kind=cfg.kind, config=cfg.to_dict())
    t0 = time.time()
    try:
        _RUNNERS[cfg.kind](cfg, report)
    except Exception as exc:  # noqa: BLE001 - failures belong in the report
        report.error = f"{type(exc).__name__}: {exc}"
    report.runtime = {"wall_seconds": time.time() - t0}
    if cfg.out_dir:
        report.write(cfg.out_dir)
    return report


def _run_exit_prob(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    lo = cfg.lo if cfg.lo is not None else profile.q_min
    hi = cfg.hi if cfg.hi is not None else profile.q_max
    sides_all, eps_col = [], []
    for i, eps in enumerate(cfg.eps):
        ev = ScaleEvaluator(profile, eps)
        p_exact = orc.exit_probability(ev, cfg.q0, lo, hi)
        sample = sde.exit_sample_1d(profile, eps, cfg.q0, lo, hi, cfg.n_paths,
                                    dt=cfg.dt, scheme=cfg.scheme, seed=_seed_for(cfg, i))
        k = int(np.sum(sample.sides == 1))
        ci = wilson_interval(k, cfg.n_paths, cfg.z_crit)
        ok = ci[0] <= p_exact <= ci[1]
        report.estimates[f"p_upper[eps={eps}]"] = k / cfg.n_paths
        report.oracle[f"p_upper[eps={eps}]"] = p_exact
        report.add_verdict(
            f"exit_prob[eps={eps}]", ok,
            f"oracle within Wilson {cfg.z_crit:.0f}-sigma interval",
            interval=list(ci), successes=k, trials=cfg.n_paths,
        )
        sides_all.append(sample.sides)
        eps_col.append(np.full(cfg.n_paths, eps))
    report.samples = {"eps": np.concatenate(eps_col), "side": np.concatenate(sides_all)}


def _run_exit_time(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    lo = cfg.lo if cfg.lo is not None else profile.q_min
    hi = cfg.hi if cfg.hi is not None else profile.q_max
    eps = cfg.eps[0]
    ev = ScaleEvaluator(profile, eps)
    expected = orc.expected_exit_time(ev, cfg.q0, lo, hi)
    dt0 = cfg.dt if cfg.dt is not None else sde.natural_dt(eps)
    means, ses, dts = [], [], [dt0, dt0 / 2.0, dt0 / 4.0]
    finest = None
    for j, dt in enumerate(dts):
        sample = sde.exit_sample_1d(profile, eps, cfg.q0, lo, hi, cfg.n_paths,
                                    dt=dt, scheme=cfg.scheme, seed=_seed_for(cfg, j))
        means.append(float(np.mean(sample.times)))
        ses.append(float(np.std(sample.times, ddof=1) / math.sqrt(cfg.n_paths)))
        finest = sample
    rel_err = abs(means[-1] - expected) / expected
    report.estimates["mean_exit_time"] = means[-1]
    report.estimates["dt_ladder"] = dts
    report.estimates["means_by_dt"] = means
    report.estimates["se_by_dt"] = ses
    report.oracle["expected_exit_time"] = expected
    report.add_verdict("exit_time_within_2pct", rel_err <= 0.02,
                       "relative error <= 2% at finest dt",
                       relative_error=rel_err)
    bias_proxy = abs(means[1] - means[2])
    stat_err = 2.5 * math.hypot(ses[1], ses[2])
    report.add_verdict("exit_time_dt_bias", bias_proxy <= stat_err,
                       "half-step change below 2.5x combined standard error",
                       bias_proxy=bias_proxy, stat_err=stat_err)
    report.samples = {"exit_time": finest.times, "side": finest.sides}


def _run_laplace(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    lo = cfg.lo if cfg.lo is not None else profile.q_min
    hi = cfg.hi if cfg.hi is not None else profile.q_max
    eps = cfg.eps[0]
    ev = ScaleEvaluator(profile, eps)
    dt = cfg.dt if cfg.dt is not None else sde.natural_dt(eps)
    sample = sde.exit_sample_1d(profile, eps, cfg.q0, lo, hi, cfg.n_paths,
                                dt=dt, scheme=cfg.scheme, seed=cfg.seed)
    for lam in cfg.lam_values:
        mc = float(np.mean(np.exp(-lam * sample.times)))
        bvp = orc.laplace_exit_time(ev, lam, cfg.q0, lo, hi)
        rel = abs(mc - bvp) / bvp
        report.estimates[f"laplace[lam={lam}]"] = mc
        report.oracle[f"laplace[lam={lam}]"] = bvp
        report.add_verdict(f"laplace[lam={lam}]", rel <= 0.01,
                           "MC mean of exp(-lam tau) within 1% of BVP value",
                           relative_error=rel)
    report.samples = {"exit_time": sample.times}


def _run_mixing_uniformity(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    eps = cfg.eps[0]
    ps = ProjectedScale(profile)
    explicit = (cfg.delta, cfg.delta_prime, cfg.delta2, cfg.M)
    sched = None
    if any(v is None for v in explicit):
        sched = orc.schedule(ps, eps, enforce=False)
    delta = cfg.delta if cfg.delta is not None else sched.delta
    delta_prime = cfg.delta_prime if cfg.delta_prime is not None else sched.delta_prime
    delta2 = cfg.delta2 if cfg.delta2 is not None else sched.delta2
    M = cfg.M if cfg.M is not None else sched.M
    bounds = orc.mixing_bounds(ps, eps, delta, delta_prime, delta2, M)
    report.oracle["schedule"] = {
        "M": M, "delta": delta, "delta_prime": delta_prime, "delta2": delta2,
    }
    if sched is not None:
        report.oracle["schedule"].update({
            "constraint_324": [sched.lhs_324, sched.rhs_324],
            "constraint_325": [sched.lhs_325, sched.rhs_325],
            "asymptotic_ok": sched.asymptotic_ok,
        })
    report.oracle["omega"] = bounds.omega
    sample = sde.exit_sample_2d(profile, eps, cfg.theta0, cfg.q0,
                                -1.0 - delta, 1.0 + delta, cfg.n_paths,
                                dt=cfg.dt, seed=cfg.seed)
    res = chi_square_uniform(sample.thetas, cfg.bins)
    report.estimates["chi_square"] = res.statistic
    report.estimates["chi_square_pvalue"] = res.pvalue
    report.add_verdict("theta_uniformity", res.pvalue >= cfg.p_crit,
                       f"chi-square p >= {cfg.p_crit} over {cfg.bins} bins",
                       pvalue=res.pvalue)
    counts, _ = np.histogram(sample.thetas, bins=cfg.bins, range=(0.0, 2 * math.pi))
    freq_dev = float(np.max(np.abs(counts / cfg.n_paths - 1.0 / cfg.bins)))
    p_bin = 1.0 / cfg.bins
    budget = 4.0 * bounds.omega + cfg.z_crit * math.sqrt(p_bin * (1 - p_bin) / cfg.n_paths)
    report.estimates["max_bin_deviation"] = freq_dev
    report.oracle["bin_deviation_budget"] = budget
    report.add_verdict("bin_deviation_within_budget", freq_dev <= budget,
                       "max bin deviation within 4*omega + z-sigma budget",
                       deviation=freq_dev, budget=budget)
    report.samples = {"theta_exit": sample.thetas, "side": sample.sides,
                      "clock": sample.clocks}


def _run_eps_convergence(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    eps_sorted = sorted(cfg.eps, reverse=True)
    if len(eps_sorted) < 3:
        raise ValueError("eps_convergence needs at least three eps values")
    dt = cfg.dt if cfg.dt is not None else 1e-3
    margs = []
    for eps in eps_sorted:
        q_T = sde.marginal_sample_1d(profile, eps, cfg.q0, cfg.T, cfg.n_paths,
                                     dt=dt, seed=cfg.seed)
        margs.append(project_1d(q_T))
    ks_vals = []
    for e1, e2, m1, m2 in zip(eps_sorted, eps_sorted[1:], margs, margs[1:]):
        res = ks_two_sample(m1, m2)
        ks_vals.append(res.statistic)
        report.estimates[f"ks[{e1}->{e2}]"] = res.statistic
    decreasing = all(x > y for x, y in zip(ks_vals, ks_vals[1:]))
    report.add_verdict("ks_monotone_decreasing", decreasing,
                       "two-sample KS decreases along the eps ladder",
                       ks_values=ks_vals)
    report.samples = {f"marginal_eps_{e}": m for e, m in zip(eps_sorted, margs)}


def _run_limit_vs_eps(cfg: ExperimentConfig, report: StatsReport):
    profile = cfg.build_profile()
    eps = min(cfg.eps)
    dt = cfg.dt if cfg.dt is not None else 1e-3
    q_T = sde.marginal_sample_1d(profile, eps, cfg.q0, cfg.T, cfg.n_paths,
                                 dt=dt, seed=cfg.seed)
    ps = ProjectedScale(profile)
    y_T = limit_marginal_1d(ps, project_1d(cfg.q0), cfg.T, cfg.n_paths,
                            dt=dt, seed=cfg.seed + 1)
    res = ks_two_sample(project_1d(q_T), y_T)
    tol = 0.05
    report.estimates["ks_eps_vs_limit"] = res.statistic
    report.add_verdict("limit_agreement", res.statistic <= tol,
                       f"KS(projected eps-marginal, limit marginal) <= {tol}",
                       statistic=res.statistic)
    report.samples = {"eps_marginal": project_1d(q_T), "limit_marginal": y_T}


_RUNNERS = {
    "exit_prob": _run_exit_prob,
    "exit_time": _run_exit_time,
    "laplace": _run_laplace,
    "mixing_uniformity": _run_mixing_uniformity,
    "eps_convergence": _run_eps_convergence,
    "limit_vs_eps": _run_limit_vs_eps,
}
