"""Simulators for the regularized 1-d process and the 2-d cylinder model.

Two schemes are available for the driftless case:

* ``euler``: Euler-Maruyama on the position itself.  The drift term
  ``-lam'/(2 (lam+eps)^3)`` is stiff near the band edges, so the default
  step is very small.
* ``natural_scale``: the process is simulated through its natural-scale
  coordinate ``x = u_eps(q)``.  Ito's formula applied to ``u_eps`` shows the
  stiff drift is exactly the Ito correction of the coordinate change
  (``u_eps' = lam + eps``, ``u_eps'' = lam'``), so ``x`` is a standard
  Wiener process in the original time variable and the scheme is exact in
  distribution at grid times.  Exit detection still happens at step
  resolution (sign change plus linear interpolation of the crossing time,
  no bridge correction), which is the one discretization effect the
  dt-refinement tests measure.

Angular dynamics on the cylinder uses an independent noise stream with
per-step variance ``dt/(lam(y)+eps)^2``; the same integrand accumulated
along the path is the angular clock.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .profiles import FrictionProfile
from .rng import Component, StreamKey, derive_key32
from .scale import NaturalTable, ScaleEvaluator, natural_table

__all__ = [
    "PathRecord",
    "ExitRecord",
    "ExitSample",
    "CrossingCounters",
    "RunawayError",
    "default_dt",
    "natural_dt",
    "simulate_path_1d",
    "simulate_path_2d",
    "first_exit",
    "exit_sample_1d",
    "exit_sample_2d",
    "marginal_sample_1d",
    "marginal_sample_2d",
    "crossing_sequence",
    "tau_sigma_counts",
    "alpha_beta_count",
    "alpha_beta_sample",
]

MAX_STEPS_CAP = 10**9
_TWO_PI = 2.0 * np.pi


class RunawayError(RuntimeError):
    """A path failed to cross within the hard step cap (dt/eps mismatch?)."""


@dataclass
class PathRecord:
    """Discretized trajectory; 2-d paths carry the angular clock."""

    times: np.ndarray
    states: np.ndarray  # (n,) positions or (n, 2) columns (theta, y)
    clock: Optional[np.ndarray] = None
    stopped: bool = False
    boundary: Optional[str] = None  # "lower" | "upper"

    @property
    def is_2d(self) -> bool:
        return self.states.ndim == 2


@dataclass(frozen=True)
class ExitRecord:
    exit_time: float
    exit_state: object  # float (1-d) or (theta, y) tuple (2-d)
    which_level: str  # "lower" | "upper"


@dataclass(frozen=True)
class ExitSample:
    """Batch of first-exit outcomes (side 0 = lower, 1 = upper)."""

    sides: np.ndarray
    times: np.ndarray
    thetas: Optional[np.ndarray] = None
    clocks: Optional[np.ndarray] = None

    @property
    def p_upper(self) -> float:
        return float(np.mean(self.sides == 1))

    @property
    def n(self) -> int:
        return len(self.sides)


@dataclass
class CrossingCounters:
    """Stopping-time bookkeeping for one path."""

    taus: list = field(default_factory=list)
    sigmas: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    n_eps: int = 0
    truncated: bool = False
    absorbed: Optional[str] = None


def default_dt(profile: FrictionProfile, eps: float, grid_n: int = 4096) -> float:
    """Euler step: min(eps^2, min over the domain of (lam+eps)^4) / 50."""
    q = np.linspace(profile.q_min, profile.q_max, grid_n)
    m = float(np.min(np.asarray(profile.lam(q), dtype=float) + eps))
    return min(eps * eps, m**4) / 50.0


def natural_dt(eps: float) -> float:
    """Natural-scale step resolving the band boundary layer (width eps in x)."""
    return eps * eps / 50.0


def _auto_dt(levels: Sequence[float], x0: float, divisor: float = 32.0) -> float:
    """Step size resolving the natural-scale level geometry.

    The smallest gap between adjacent levels (and from the start point to
    its neighbours) is resolved by ``divisor`` step standard deviations, so
    missed sub-step touches stay well below the statistical tolerances.
    """
    pts = np.sort(np.asarray(list(levels) + [x0], dtype=float))
    gaps = np.diff(pts)
    gap = float(np.min(gaps[gaps > 0])) if np.any(gaps > 0) else 1.0
    return (gap / divisor) ** 2


def _as_key32(seed: int, component: int) -> tuple[np.uint32, np.uint32]:
    k0, k1 = derive_key32(seed, component)
    return np.uint32(k0), np.uint32(k1)


# ---------------------------------------------------------------------------
# single-path simulators (PathRecord producers)
# ---------------------------------------------------------------------------

def simulate_path_1d(
    profile: FrictionProfile,
    eps: float,
    q0: float,
    T: float,
    dt: Optional[float] = None,
    scheme: str = "natural_scale",
    seed: int = 0,
    path: int = 0,
) -> PathRecord:
    """Simulate one regularized 1-d path on [0, T], stopped at the domain ends."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    profile.check_domain(q0)
    if scheme == "natural_scale":
        if profile.has_drift:
            raise ValueError("natural_scale requires a driftless profile")
        if dt is None:
            dt = natural_dt(eps)
        n = int(np.ceil(T / dt))
        rng = StreamKey(seed, path, Component.Y_NOISE).generator()
        ev = ScaleEvaluator(profile, eps)
        x = np.empty(n + 1)
        x[0] = float(ev.u(q0))
        x[1:] = x[0] + np.cumsum(rng.standard_normal(n) * np.sqrt(dt))
        lo, hi = ev.x_min, ev.x_max
        times = np.arange(n + 1) * dt
        crossed = (x <= lo) | (x >= hi)
        stopped, boundary = False, None
        if crossed.any():
            k = int(np.argmax(crossed))
            boundary = "lower" if x[k] <= lo else "upper"
            lvl = lo if boundary == "lower" else hi
            frac = (lvl - x[k - 1]) / (x[k] - x[k - 1])
            times = np.concatenate([times[:k], [times[k - 1] + frac * dt]])
            x = np.concatenate([x[:k], [lvl]])
            stopped = True
        q = ev.u_inv_array(x)
        if stopped:
            q[-1] = profile.q_min if boundary == "lower" else profile.q_max
        return PathRecord(times=times, states=q, stopped=stopped, boundary=boundary)

    if scheme != "euler":
        raise ValueError(f"unknown scheme {scheme!r}")
    if dt is None:
        dt = default_dt(profile, eps)
    n = int(np.ceil(T / dt))
    rng = StreamKey(seed, path, Component.Y_NOISE).generator()
    qs = [float(q0)]
    ts = [0.0]
    q = float(q0)
    stopped, boundary = False, None
    sqdt = np.sqrt(dt)
    zs = rng.standard_normal(n)
    for k in range(n):
        lam = float(profile.lam(q))
        lam_p = float(profile.lam_prime(q))
        denom = lam + eps
        drift = -lam_p / (2.0 * denom**3)
        if profile.drift_b is not None:
            drift += float(profile.drift_b(q)) / denom
        qn = q + drift * dt + sqdt * zs[k] / denom
        if qn <= profile.q_min or qn >= profile.q_max:
            lvl = profile.q_min if qn <= profile.q_min else profile.q_max
            frac = (lvl - q) / (qn - q)
            ts.append((k + frac) * dt)
            qs.append(lvl)
            stopped = True
            boundary = "lower" if lvl == profile.q_min else "upper"
            break
        q = qn
        ts.append((k + 1) * dt)
        qs.append(q)
    return PathRecord(times=np.asarray(ts), states=np.asarray(qs), stopped=stopped, boundary=boundary)


def simulate_path_2d(
    profile: FrictionProfile,
    eps: float,
    theta0: float,
    y0: float,
    T: float,
    dt: Optional[float] = None,
    scheme: str = "natural_scale",
    seed: int = 0,
    path: int = 0,
) -> PathRecord:
    """Simulate one cylinder path; angular noise independent of the radial one.

    The returned record stores states (theta mod 2pi, y) and the clock
    T_eps(t) = int_0^t ds/(lam(y_s)+eps)^2.
    """
    if profile.has_drift:
        raise ValueError("the cylinder model requires a driftless profile")
    rad = simulate_path_1d(profile, eps, y0, T, dt=dt, scheme=scheme, seed=seed, path=path)
    y = rad.states
    n_inc = len(y) - 1
    dts = np.diff(rad.times)
    rng = StreamKey(seed, path, Component.THETA_NOISE).generator()
    lam = np.asarray(profile.lam(y[:-1]), dtype=float)
    noise = 1.0 / (lam + eps)
    dtheta = np.sqrt(dts) * noise * rng.standard_normal(n_inc)
    theta = theta0 + np.concatenate([[0.0], np.cumsum(dtheta)])
    clock = np.concatenate([[0.0], np.cumsum(dts * noise**2)])
    states = np.column_stack([theta % _TWO_PI, y])
    return PathRecord(times=rad.times, states=states, clock=clock,
                      stopped=rad.stopped, boundary=rad.boundary)


# ---------------------------------------------------------------------------
# first exits
# ---------------------------------------------------------------------------

def first_exit(
    profile: FrictionProfile,
    eps: float,
    start,
    lo_level: float,
    hi_level: float,
    dt: Optional[float] = None,
    scheme: str = "natural_scale",
    seed: int = 0,
    path: int = 0,
    max_steps: int = MAX_STEPS_CAP,
) -> ExitRecord:
    """First exit of a single path from (lo_level, hi_level).

    ``start`` is a position for the 1-d process or a (theta0, y0) pair for
    the cylinder; the exit state is snapped onto the crossed level.
    """
    if isinstance(start, (tuple, list)):
        theta0, y0 = float(start[0]), float(start[1])
        sample = exit_sample_2d(profile, eps, theta0, y0, lo_level, hi_level,
                                n_paths=1, dt=dt, seed=seed, path_offset=path, max_steps=max_steps)
        side = "lower" if sample.sides[0] == 0 else "upper"
        lvl = lo_level if side == "lower" else hi_level
        return ExitRecord(exit_time=float(sample.times[0]),
                          exit_state=(float(sample.thetas[0]), lvl), which_level=side)
    q0 = float(start)
    if not (lo_level < q0 < hi_level):
        raise ValueError("need lo_level < start < hi_level")
    sample = exit_sample_1d(profile, eps, q0, lo_level, hi_level, n_paths=1,
                            dt=dt, scheme=scheme, seed=seed, path_offset=path, max_steps=max_steps)
    side = "lower" if sample.sides[0] == 0 else "upper"
    return ExitRecord(exit_time=float(sample.times[0]),
                      exit_state=lo_level if side == "lower" else hi_level,
                      which_level=side)


def exit_sample_1d(
    profile: FrictionProfile,
    eps: float,
    q0: float,
    lo: float,
    hi: float,
    n_paths: int,
    dt: Optional[float] = None,
    scheme: str = "natural_scale",
    seed: int = 0,
    path_offset: int = 0,
    max_steps: int = MAX_STEPS_CAP,
    allow_censored: bool = False,
) -> ExitSample:
    """Batch first-exit Monte Carlo for the 1-d process."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not (lo < q0 < hi):
        raise ValueError("need lo < q0 < hi")
    if scheme == "natural_scale":
        if profile.has_drift:
            raise ValueError("natural_scale requires a driftless profile")
        if dt is None:
            dt = natural_dt(eps)
        ev = ScaleEvaluator(profile, eps)
        x0, L, H = (float(ev.u(v)) for v in (q0, lo, hi))
        k0, k1 = _as_key32(seed, Component.Y_NOISE)
        if path_offset:
            k0 = np.uint32(k0 ^ np.uint32(path_offset & 0xFFFFFFFF))
        sides, taus = _kernels.exit_1d(n_paths, x0, L, H, dt, np.int64(max_steps), k0, k1)
    elif scheme == "euler":
        if dt is None:
            dt = default_dt(profile, eps)
        sides, taus = _euler_exit_batch(profile, eps, q0, lo, hi, n_paths, dt, seed, max_steps)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not allow_censored and np.any(sides == _kernels.SIDE_NONE):
        raise RunawayError(
            f"{int(np.sum(sides == 2))} paths failed to exit within {max_steps} steps "
            f"(dt={dt:g}, eps={eps:g}); refine dt or raise the cap"
        )
    return ExitSample(sides=sides, times=taus)


def exit_sample_2d(
    profile: FrictionProfile,
    eps: float,
    theta0: float,
    y0: float,
    lo: float,
    hi: float,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    path_offset: int = 0,
    max_steps: int = MAX_STEPS_CAP,
    table: Optional[NaturalTable] = None,
) -> ExitSample:
    """Batch first-exit for the cylinder; records exit angle and clock."""
    if profile.has_drift:
        raise ValueError("the cylinder model requires a driftless profile")
    if not (lo < y0 < hi):
        raise ValueError("need lo < y0 < hi")
    if dt is None:
        dt = natural_dt(eps)
    tab = table if table is not None else natural_table(profile, eps)
    ev = ScaleEvaluator(profile, eps)
    x0, L, H = (float(ev.u(v)) for v in (y0, lo, hi))
    ky0, ky1 = _as_key32(seed, Component.Y_NOISE)
    kt0, kt1 = _as_key32(seed, Component.THETA_NOISE)
    if path_offset:
        ky0 = np.uint32(ky0 ^ np.uint32(path_offset & 0xFFFFFFFF))
        kt0 = np.uint32(kt0 ^ np.uint32(path_offset & 0xFFFFFFFF))
    sides, taus, thetas, clocks = _kernels.exit_2d(
        n_paths, x0, theta0, L, H, dt, np.int64(max_steps), eps,
        tab.x_lo, 1.0 / tab.h, tab.lam_tab, ky0, ky1, kt0, kt1,
    )
    if np.any(sides == _kernels.SIDE_NONE):
        raise RunawayError("2-d paths failed to exit within the step cap")
    return ExitSample(sides=sides, times=taus, thetas=thetas, clocks=clocks)


def _euler_exit_batch(profile, eps, q0, lo, hi, n_paths, dt, seed, max_steps, block=16384):
    """Vectorized Euler-Maruyama exit sampling with per-block Philox streams."""
    sides = np.full(n_paths, _kernels.SIDE_NONE, np.uint8)
    taus = np.full(n_paths, np.nan)
    sqdt = np.sqrt(dt)
    b_field = profile.drift_b
    for start in range(0, n_paths, block):
        m = min(block, n_paths - start)
        rng = StreamKey(seed, start, Component.Y_NOISE).generator()
        q = np.full(m, float(q0))
        alive = np.arange(m)
        step = 0
        side_blk = np.full(m, _kernels.SIDE_NONE, np.uint8)
        tau_blk = np.full(m, max_steps * dt)
        while alive.size and step < max_steps:
            qa = q[alive]
            lam = np.asarray(profile.lam(qa), dtype=float)
            lam_p = np.asarray(profile.lam_prime(qa), dtype=float)
            denom = lam + eps
            drift = -lam_p / (2.0 * denom**3)
            if b_field is not None:
                drift = drift + np.asarray(b_field(qa), dtype=float) / denom
            qn = qa + drift * dt + sqdt * rng.standard_normal(alive.size) / denom
            hit_lo = qn <= lo
            hit_hi = qn >= hi
            hit = hit_lo | hit_hi
            if hit.any():
                idx = alive[hit]
                lvl = np.where(hit_lo[hit], lo, hi)
                frac = (lvl - qa[hit]) / (qn[hit] - qa[hit])
                tau_blk[idx] = (step + frac) * dt
                side_blk[idx] = np.where(hit_lo[hit], _kernels.SIDE_LOWER, _kernels.SIDE_UPPER).astype(np.uint8)
            q[alive] = qn
            alive = alive[~hit]
            step += 1
        sides[start:start + m] = side_blk
        taus[start:start + m] = tau_blk
    return sides, taus


# ---------------------------------------------------------------------------
# fixed-time marginals
# ---------------------------------------------------------------------------

def marginal_sample_1d(
    profile: FrictionProfile,
    eps: float,
    q0: float,
    T: float,
    n_paths: int,
    dt: float = 1e-3,
    seed: int = 0,
) -> np.ndarray:
    """Positions q_T of the stopped 1-d process (natural-scale scheme)."""
    if profile.has_drift:
        raise ValueError("natural_scale requires a driftless profile")
    ev = ScaleEvaluator(profile, eps)
    x0 = float(ev.u(q0))
    n_steps = int(round(T / dt))
    k0, k1 = _as_key32(seed, Component.Y_NOISE)
    x = _kernels.marginal_1d(n_paths, x0, ev.x_min, ev.x_max, dt, np.int64(n_steps), k0, k1)
    q = ev.u_inv_array(x)
    q[x <= ev.x_min] = profile.q_min
    q[x >= ev.x_max] = profile.q_max
    return q


def marginal_sample_2d(
    profile: FrictionProfile,
    eps: float,
    theta0: float,
    y0: float,
    T: float,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    table: Optional[NaturalTable] = None,
):
    """(theta_T, y_T, clock_T) of the stopped cylinder process."""
    if profile.has_drift:
        raise ValueError("the cylinder model requires a driftless profile")
    if dt is None:
        dt = natural_dt(eps)
    tab = table if table is not None else natural_table(profile, eps)
    ev = ScaleEvaluator(profile, eps)
    x0 = float(ev.u(y0))
    n_steps = int(round(T / dt))
    ky0, ky1 = _as_key32(seed, Component.Y_NOISE)
    kt0, kt1 = _as_key32(seed, Component.THETA_NOISE)
    xs, thetas, clocks, sides = _kernels.marginal_2d(
        n_paths, x0, theta0, ev.x_min, ev.x_max, dt, np.int64(n_steps), eps,
        tab.x_lo, 1.0 / tab.h, tab.lam_tab, ky0, ky1, kt0, kt1,
    )
    y = ev.u_inv_array(xs)
    y[xs <= ev.x_min] = profile.q_min
    y[xs >= ev.x_max] = profile.q_max
    return thetas, y, clocks


# ---------------------------------------------------------------------------
# stopping-time sequences
# ---------------------------------------------------------------------------

def _hit_index(x_prev: np.ndarray, x_next: np.ndarray, levels: Sequence[float]):
    """First step index whose segment touches any level; (index, level) or None."""
    best = None
    for lvl in levels:
        crossed = (x_prev - lvl) * (x_next - lvl) <= 0.0
        crossed &= ~((x_prev == lvl) & (x_next == lvl))
        crossed &= x_prev != lvl
        if crossed.any():
            k = int(np.argmax(crossed))
            if best is None or k < best[0]:
                best = (k, lvl)
            elif k == best[0]:
                # same step: take the level nearer the segment start
                if abs(lvl - x_prev[k]) < abs(best[1] - x_prev[k]):
                    best = (k, lvl)
    return best


class _BlockWalk:
    """Natural-scale Wiener walk served in blocks, with level-event scanning."""

    def __init__(self, x0: float, dt: float, rng: np.random.Generator, block: int = 1 << 15):
        self.dt = dt
        self.sqdt = np.sqrt(dt)
        self.rng = rng
        self.block = block
        self.x = float(x0)
        self.step = 0  # global step count consumed
        self._buf = np.empty(0)
        self._pos = 0

    def _refill(self):
        self._buf = self.x + np.cumsum(self.rng.standard_normal(self.block)) * self.sqdt
        self._pos = 0

    def advance_to_event(self, levels: Sequence[float], max_steps: int):
        """Run until the segment path touches one of ``levels``.

        Returns (time, level) with time linearly interpolated, or None when
        max_steps is exhausted.
        """
        while self.step < max_steps:
            if self._pos >= len(self._buf):
                self._refill()
            chunk = self._buf[self._pos:]
            x_prev = np.concatenate([[self.x], chunk[:-1]])
            hit = _hit_index(x_prev, chunk, levels)
            if hit is None:
                self.step += chunk.size
                self.x = float(chunk[-1])
                self._pos = len(self._buf)
                continue
            k, lvl = hit
            frac = (lvl - x_prev[k]) / (chunk[k] - x_prev[k]) if chunk[k] != x_prev[k] else 1.0
            t = (self.step + k + frac) * self.dt
            # restart at the level; keep chunk[k] so the rest of the
            # crossing segment is rescanned against the next target set
            self.step += k
            self.x = float(lvl)
            self._pos += k
            return t, lvl
        return None


def crossing_sequence(
    profile: FrictionProfile,
    eps: float,
    start: float,
    delta: float,
    delta_prime: float,
    T_max: float,
    dt: Optional[float] = None,
    seed: int = 0,
    path: int = 0,
) -> CrossingCounters:
    """Alternating hit times of the collar pair C(delta') and the exterior G(delta).

    tau_n are the collar hits, sigma_n the exterior entries; the run stops at
    absorption (domain ends) or T_max (then ``truncated`` is set).
    """
    if not (0 < delta_prime < delta):
        raise ValueError("need 0 < delta_prime < delta")
    ev = ScaleEvaluator(profile, eps)
    x_t = [float(ev.u(-1.0 - delta_prime)), float(ev.u(1.0 + delta_prime))]
    x_g = [float(ev.u(-1.0 - delta)), float(ev.u(1.0 + delta))]
    x_abs = [ev.x_min, ev.x_max]
    if dt is None:
        dt = _auto_dt(x_t + x_g, float(ev.u(start)))
    rng = StreamKey(seed, path, Component.Y_NOISE).generator()
    walk = _BlockWalk(float(ev.u(start)), dt, rng)
    max_steps = min(int(T_max / dt), MAX_STEPS_CAP)
    out = CrossingCounters()
    in_exterior = walk.x <= x_g[0] or walk.x >= x_g[1]
    phase_targets = x_t if in_exterior else x_g
    if in_exterior:
        out.sigmas.append(0.0)  # sigma_0 = 0 when starting in G(delta)
    while True:
        event = walk.advance_to_event(phase_targets + x_abs, max_steps)
        if event is None:
            out.truncated = True
            break
        t, lvl = event
        if lvl in x_abs:
            out.absorbed = "lower" if lvl == x_abs[0] else "upper"
            break
        if phase_targets is x_t:
            out.taus.append(t)
            phase_targets = x_g
        else:
            out.sigmas.append(t)
            phase_targets = x_t
    return out


def alpha_beta_count(
    profile: FrictionProfile,
    eps: float,
    start: float,
    delta: float,
    delta2: float,
    dt: Optional[float] = None,
    seed: int = 0,
    path: int = 0,
    max_steps: int = MAX_STEPS_CAP,
) -> CrossingCounters:
    """Band-edge/re-entry alternation of one path until it reaches G(delta).

    alpha_k are hits of the band edges (friction zero set boundary), beta_k
    hits of the depth-delta2 re-entry pair; ``n_eps`` counts the alphas, with
    the convention n_eps = 0 when the path reaches G(delta) untouched.
    """
    if delta2 <= 0 or delta2 >= 2.0:
        raise ValueError("need 0 < delta2 < 2")
    ev = ScaleEvaluator(profile, eps)
    x_c = [float(ev.u(-1.0)), float(ev.u(1.0))]
    x_b = sorted([float(ev.u(1.0 - delta2)), float(ev.u(-1.0 + delta2))])
    x_g = [float(ev.u(-1.0 - delta)), float(ev.u(1.0 + delta))]
    x0 = float(ev.u(start))
    if dt is None:
        dt = _auto_dt(x_c + x_b + x_g, x0)
    out = CrossingCounters()
    if x0 <= x_g[0] or x0 >= x_g[1]:
        return out  # sigma_0 = 0; alpha_1 = infinity
    rng = StreamKey(seed, path, Component.Y_NOISE).generator()
    walk = _BlockWalk(x0, dt, rng)
    seeking_alpha = True
    while True:
        targets = x_c if seeking_alpha else x_b
        event = walk.advance_to_event(targets + x_g, max_steps)
        if event is None:
            out.truncated = True
            break
        t, lvl = event
        if lvl in x_g:
            break
        if seeking_alpha:
            out.alphas.append(t)
        else:
            out.betas.append(t)
        seeking_alpha = not seeking_alpha
    out.n_eps = len(out.alphas)
    return out


def alpha_beta_sample(
    profile: FrictionProfile,
    eps: float,
    y0: float,
    delta: float,
    delta2: float,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    max_steps: int = MAX_STEPS_CAP,
):
    """Batch version of :func:`alpha_beta_count` counting events only.

    Returns (alpha1 flags, beta1 flags, n_eps counts) as arrays.
    """
    if delta2 <= 0 or delta2 >= 2.0:
        raise ValueError("need 0 < delta2 < 2")
    ev = ScaleEvaluator(profile, eps)
    x_c = sorted([float(ev.u(-1.0)), float(ev.u(1.0))])
    x_b = sorted([float(ev.u(1.0 - delta2)), float(ev.u(-1.0 + delta2))])
    x_g = [float(ev.u(-1.0 - delta)), float(ev.u(1.0 + delta))]
    x0 = float(ev.u(y0))
    if dt is None:
        dt = _auto_dt(x_c + x_b + x_g, x0)
    if x0 <= x_g[0] or x0 >= x_g[1]:
        z = np.zeros(n_paths, np.uint8)
        return z, z.copy(), np.zeros(n_paths, np.int64)
    k0, k1 = _as_key32(seed, Component.Y_NOISE)
    a1, b1, counts = _kernels.alpha_beta(
        n_paths, x0, x_c[0], x_c[1], x_b[0], x_b[1], x_g[0], x_g[1],
        dt, np.int64(max_steps), k0, k1,
    )
    return a1, b1, counts


def tau_sigma_counts(
    profile: FrictionProfile,
    eps: float,
    start: float,
    delta: float,
    delta_prime: float,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    max_steps: int = MAX_STEPS_CAP,
):
    """Batch count of collar/exterior alternations until absorption.

    Returns (n_tau, n_sigma, absorbed side) arrays; side 2 means censored.
    """
    if not (0 < delta_prime < delta):
        raise ValueError("need 0 < delta_prime < delta")
    ev = ScaleEvaluator(profile, eps)
    x_t = sorted([float(ev.u(-1.0 - delta_prime)), float(ev.u(1.0 + delta_prime))])
    x_g = sorted([float(ev.u(-1.0 - delta)), float(ev.u(1.0 + delta))])
    if dt is None:
        dt = _auto_dt(x_t + x_g, float(ev.u(start)))
    k0, k1 = _as_key32(seed, Component.Y_NOISE)
    return _kernels.tau_sigma(
        n_paths, float(ev.u(start)), x_t[0], x_t[1], x_g[0], x_g[1],
        ev.x_min, ev.x_max, dt, np.int64(max_steps), k0, k1,
    )
