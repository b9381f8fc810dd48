"""Direct samplers for the limiting glued Markov processes.

The 1-d limit on [a, b] is the generalized diffusion with generator
D_v~ D_u~ whose one-sided u~-derivatives agree at the glued point; in the
driftless model case (v~ = 2 u~) its natural-scale image is a standard
Wiener process, so paths are sampled as X_t = BM started at u~(y0), stopped
at u~(a), u~(b), and mapped back through the strictly increasing inverse.
The glued point is invisible in natural scale, which realizes the equal
one-sided derivative condition.

The cone process adds the angular component: Gaussian increments of
variance dt / lam~^2(y) away from the vertex, and a fresh uniform angle at
every vertex visit.  The uniform redraw models the integral gluing
condition through angular uniformization: the angular clock
int dt / lam~^2 diverges on approach to the vertex when int 1/lam does, so
any remembered angle is lost there.  Steps whose angular variance exceeds
a wrap threshold are drawn uniformly outright (a wrapped normal with that
variance is uniform beyond double precision).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .glue import VERTEX, ConePoint
from .rng import Component, StreamKey
from .scale import ProjectedScale

__all__ = [
    "LimitPath1D",
    "LimitPathCone",
    "simulate_limit_1d",
    "simulate_limit_cone",
    "limit_marginal_1d",
    "cone_exit_angles",
]

_TWO_PI = 2.0 * np.pi
_UNIFORM_VAR = 200.0  # wrapped-normal variance beyond which the angle is uniform


@dataclass
class LimitPath1D:
    times: np.ndarray
    ys: np.ndarray
    stopped: bool = False
    boundary: Optional[str] = None


@dataclass
class LimitPathCone:
    """Cone path; angles are undefined (NaN) while sitting at the vertex."""

    times: np.ndarray
    thetas: np.ndarray  # wrapped to [0, 2pi)
    ys: np.ndarray
    vertex_times: np.ndarray
    angular_increments: np.ndarray  # per-step applied increment, NaN at redraws
    angular_vars: np.ndarray        # per-step variance dt/lam~^2, inf at redraws
    stopped: bool = False
    boundary: Optional[str] = None

    def point(self, k: int) -> ConePoint:
        y = float(self.ys[k])
        return VERTEX if y == 0.0 else ConePoint(float(self.thetas[k]), y)


def _radial_walk(ps: ProjectedScale, y0: float, T: float, dt: float, rng) -> tuple:
    x0 = float(ps.u_tilde(y0))
    lo = float(ps.u_tilde(ps.a))
    hi = float(ps.u_tilde(ps.b))
    n = int(np.ceil(T / dt))
    x = np.empty(n + 1)
    x[0] = x0
    x[1:] = x0 + np.cumsum(rng.standard_normal(n)) * np.sqrt(dt)
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
    return times, x, stopped, boundary


def simulate_limit_1d(
    ps: ProjectedScale,
    y0: float,
    T: float,
    dt: float = 1e-3,
    seed: int = 0,
    path: int = 0,
) -> LimitPath1D:
    """Sample the glued 1-d limit diffusion, stopped at a and b."""
    if ps.profile.has_drift:
        raise ValueError("the limit sampler requires the driftless model case")
    if not (ps.a <= y0 <= ps.b):
        raise ValueError(f"y0 must lie in [{ps.a}, {ps.b}]")
    rng = StreamKey(seed, path, Component.Y_NOISE).generator()
    times, x, stopped, boundary = _radial_walk(ps, y0, T, dt, rng)
    ys = ps.u_tilde_inv_array(x)
    if stopped:
        ys[-1] = ps.a if boundary == "lower" else ps.b
    return LimitPath1D(times=times, ys=ys, stopped=stopped, boundary=boundary)


def simulate_limit_cone(
    ps: ProjectedScale,
    p0: ConePoint,
    T: float,
    dt: float = 1e-3,
    seed: int = 0,
    path: int = 0,
) -> LimitPathCone:
    """Sample the cone limit process: 1-d radial law plus mixing angle."""
    if ps.profile.has_drift:
        raise ValueError("the limit sampler requires the driftless model case")
    rng_r = StreamKey(seed, path, Component.Y_NOISE).generator()
    rng_a = StreamKey(seed, path, Component.THETA_NOISE).generator()
    times, x, stopped, boundary = _radial_walk(ps, 0.0 if p0.is_vertex else p0.y, T, dt, rng_r)
    ys = ps.u_tilde_inv_array(x)
    if stopped:
        ys[-1] = ps.a if boundary == "lower" else ps.b
    n = len(x) - 1
    dts = np.diff(times)
    lam_t = np.asarray(ps.lam_tilde(ys[:-1]), dtype=float)
    with np.errstate(divide="ignore"):
        var = np.where(lam_t > 0.0, dts / lam_t**2, np.inf)
    redraw = (x[:-1] * x[1:] <= 0.0) | (var > _UNIFORM_VAR)
    z = rng_a.standard_normal(n)
    uni = rng_a.uniform(0.0, _TWO_PI, size=n)
    thetas = np.empty(n + 1)
    thetas[0] = rng_a.uniform(0.0, _TWO_PI) if p0.is_vertex else p0.theta
    incs = np.empty(n)
    for k in range(n):
        if redraw[k]:
            thetas[k + 1] = uni[k]
            incs[k] = np.nan
        else:
            incs[k] = np.sqrt(var[k]) * z[k]
            thetas[k + 1] = thetas[k] + incs[k]
    vertex_times = times[1:][(x[:-1] * x[1:] <= 0.0)]
    return LimitPathCone(
        times=times, thetas=thetas % _TWO_PI, ys=ys, vertex_times=vertex_times,
        angular_increments=incs, angular_vars=np.where(redraw, np.inf, var),
        stopped=stopped, boundary=boundary,
    )


def limit_marginal_1d(
    ps: ProjectedScale,
    y0: float,
    T: float,
    n_paths: int,
    dt: float = 1e-3,
    seed: int = 0,
    block: int = 16384,
) -> np.ndarray:
    """Positions y~_T of the stopped 1-d limit process, vectorized."""
    if ps.profile.has_drift:
        raise ValueError("the limit sampler requires the driftless model case")
    lo = float(ps.u_tilde(ps.a))
    hi = float(ps.u_tilde(ps.b))
    x0 = float(ps.u_tilde(y0))
    n_steps = int(round(T / dt))
    sqdt = np.sqrt(dt)
    out = np.empty(n_paths)
    for start in range(0, n_paths, block):
        m = min(block, n_paths - start)
        rng = StreamKey(seed, start, Component.Y_NOISE).generator()
        x = np.full(m, x0)
        frozen = np.zeros(m, dtype=bool)
        for _ in range(n_steps):
            live = ~frozen
            if not live.any():
                break
            x[live] += sqdt * rng.standard_normal(int(live.sum()))
            hit_lo = live & (x <= lo)
            hit_hi = live & (x >= hi)
            x[hit_lo] = lo
            x[hit_hi] = hi
            frozen |= hit_lo | hit_hi
        out[start:start + m] = ps.u_tilde_inv_array(x)
    return out


def limit_marginal_cone(
    ps: ProjectedScale,
    p0: ConePoint,
    T: float,
    n_paths: int,
    dt: float = 1e-3,
    seed: int = 0,
    block: int = 16384,
):
    """(theta_T, y_T) of the stopped cone limit process, vectorized."""
    if ps.profile.has_drift:
        raise ValueError("the limit sampler requires the driftless model case")
    lo = float(ps.u_tilde(ps.a))
    hi = float(ps.u_tilde(ps.b))
    x0 = float(ps.u_tilde(0.0 if p0.is_vertex else p0.y))
    n_steps = int(round(T / dt))
    sqdt = np.sqrt(dt)
    thetas = np.empty(n_paths)
    ys = np.empty(n_paths)
    for start in range(0, n_paths, block):
        m = min(block, n_paths - start)
        rng_r = StreamKey(seed, start, Component.Y_NOISE).generator()
        rng_a = StreamKey(seed, start, Component.THETA_NOISE).generator()
        x = np.full(m, x0)
        th = (rng_a.uniform(0.0, _TWO_PI, size=m) if p0.is_vertex
              else np.full(m, p0.theta))
        frozen = np.zeros(m, dtype=bool)
        for _ in range(n_steps):
            live = ~frozen
            if not live.any():
                break
            nl = int(live.sum())
            xl = x[live]
            zr = rng_r.standard_normal(nl)
            za = rng_a.standard_normal(nl)
            uu = rng_a.uniform(0.0, _TWO_PI, size=nl)
            y_pre = ps.u_tilde_inv_array(xl)
            lam_t = np.asarray(ps.lam_tilde(y_pre), dtype=float)
            with np.errstate(divide="ignore"):
                var = np.where(lam_t > 0.0, dt / lam_t**2, np.inf)
            xn = xl + sqdt * zr
            redraw = (xl * xn <= 0.0) | (var > _UNIFORM_VAR)
            th[live] = np.where(redraw, uu,
                                th[live] + np.sqrt(np.where(redraw, 0.0, var)) * za)
            x[live] = xn
            hit_lo = live & (x <= lo)
            hit_hi = live & (x >= hi)
            x[hit_lo] = lo
            x[hit_hi] = hi
            frozen |= hit_lo | hit_hi
        thetas[start:start + m] = th % _TWO_PI
        ys[start:start + m] = ps.u_tilde_inv_array(x)
    return thetas, ys


def cone_exit_angles(
    ps: ProjectedScale,
    delta: float,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    y0: float = 0.0,
    theta0: Optional[float] = None,
    block: int = 16384,
):
    """Exit angles and sides of the cone process leaving {|y~| <= delta}.

    Started at the vertex (the default) the exit angle is uniform: the angle
    is redrawn at the final vertex visit and the remaining increments are
    independent of it.  Returns (thetas, sides) with side 1 for y~ = +delta.
    """
    if ps.profile.has_drift:
        raise ValueError("the limit sampler requires the driftless model case")
    if not (0.0 < delta <= min(ps.b, -ps.a)):
        raise ValueError("delta outside the projected domain")
    hi = float(ps.u_tilde(delta))
    lo = float(ps.u_tilde(-delta))
    x0 = float(ps.u_tilde(y0))
    if dt is None:
        dt = (min(hi, -lo) / 64.0) ** 2
    sqdt = np.sqrt(dt)
    thetas = np.empty(n_paths)
    sides = np.empty(n_paths, dtype=np.uint8)
    for start in range(0, n_paths, block):
        m = min(block, n_paths - start)
        rng_r = StreamKey(seed, start, Component.Y_NOISE).generator()
        rng_a = StreamKey(seed, start, Component.THETA_NOISE).generator()
        x = np.full(m, x0)
        th = (np.full(m, float(theta0)) if theta0 is not None
              else rng_a.uniform(0.0, _TWO_PI, size=m))
        done = np.zeros(m, dtype=bool)
        side = np.zeros(m, dtype=np.uint8)
        while not done.all():
            live = ~done
            nl = int(live.sum())
            xl = x[live]
            zr = rng_r.standard_normal(nl)
            za = rng_a.standard_normal(nl)
            uu = rng_a.uniform(0.0, _TWO_PI, size=nl)
            xn = xl + sqdt * zr
            y_pre = ps.u_tilde_inv_array(xl)
            lam_t = np.asarray(ps.lam_tilde(y_pre), dtype=float)
            with np.errstate(divide="ignore"):
                var = np.where(lam_t > 0.0, dt / lam_t**2, np.inf)
            redraw = (xl * xn <= 0.0) | (var > _UNIFORM_VAR)
            th_live = th[live]
            th_live = np.where(redraw, uu, th_live + np.sqrt(np.where(redraw, 0.0, var)) * za)
            th[live] = th_live
            x[live] = xn
            exit_hi = live.copy()
            exit_hi[live] = xn >= hi
            exit_lo = live.copy()
            exit_lo[live] = xn <= lo
            side[exit_hi] = 1
            side[exit_lo] = 0
            done |= exit_hi | exit_lo
        thetas[start:start + m] = th % _TWO_PI
        sides[start:start + m] = side
    return thetas, sides
