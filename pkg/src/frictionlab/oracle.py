"""Exact and semi-analytic quantities the Monte Carlo must reproduce.

For a regular 1-d diffusion in natural scale, exit probabilities are ratios
of scale increments, expected exit times integrate the displayed Green
kernel against the speed measure, and Laplace transforms of exit times solve
the generalized two-point boundary-value problem D_v D_u M = lam * M with
M = 1 at the ends.  On the projected cone, the angular Fourier modes of the
resolvent equation

    (lam + n^2 / lam~^2(y)) g - D_v~ D_u~ g = G

are solved on a natural-scale grid where D_v~ D_u~ is a weighted second
difference; for n != 0 the equation is singular at the glued point, and the
solution is assembled from the increasing/decreasing homogeneous solutions
and their constant Wronskian, then corrected to match the outer boundary
data.  The module also evaluates the closed-form mixing bounds for the
band re-entry counts and the (eps, delta, delta', delta'', M) schedule under
which the angular exit law uniformizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded

from .scale import ProjectedScale, ScaleEvaluator

__all__ = [
    "DegenerateIntervalError",
    "AccuracyError",
    "InconsistentDataError",
    "ScheduleError",
    "BVPSolution",
    "MixingBounds",
    "Schedule",
    "exit_probability",
    "expected_exit_time",
    "laplace_exit_time",
    "resolvent_mode_solve",
    "mixing_bounds",
    "schedule",
]


class DegenerateIntervalError(ValueError):
    """The scale function does not separate the interval ends."""


class AccuracyError(RuntimeError):
    """A discretized solve failed its self-consistency tolerance."""


class InconsistentDataError(ValueError):
    """Mode data incompatible with the gluing condition (needs G(0) = 0)."""


class ScheduleError(ValueError):
    """The asymptotic schedule is unsatisfiable at the requested eps."""


# ---------------------------------------------------------------------------
# first-passage functionals of the 1-d process
# ---------------------------------------------------------------------------

def exit_probability(s: ScaleEvaluator, q: float, lo: float, hi: float) -> float:
    """P(exit at hi before lo), the scale-increment ratio; exact for eps > 0."""
    if not (lo <= q <= hi):
        raise ValueError("need lo <= q <= hi")
    u_lo, u_hi, u_q = (float(s.u(v)) for v in (lo, hi, q))
    denom = u_hi - u_lo
    if denom <= 0.0:
        raise DegenerateIntervalError("scale increment over [lo, hi] vanishes")
    return (u_q - u_lo) / denom


def expected_exit_time(s: ScaleEvaluator, q: float, lo: float, hi: float,
                       rtol: float = 1e-8) -> float:
    """E[first exit time from (lo, hi)] by Green-kernel quadrature.

    The kernel is the product form in the scale coordinate,
    ``(u(q_<) - u(lo)) (u(hi) - u(q_>)) / (u(hi) - u(lo))``, integrated
    against dv.
    """
    if s.eps <= 0.0:
        raise ValueError("expected exit time requires eps > 0")
    if not (lo <= q <= hi):
        raise ValueError("need lo <= q <= hi")
    if q == lo or q == hi:
        return 0.0
    u_lo, u_hi, u_q = (float(s.u(v)) for v in (lo, hi, q))
    denom = u_hi - u_lo
    if denom <= 0.0:
        raise DegenerateIntervalError("scale increment over [lo, hi] vanishes")
    # v'(r) = u'(r) * (dv/du); for driftless profiles this is 2 (lam + eps).
    def integrand(r):
        u_r = float(s.u(r))
        if r <= q:
            g = (u_r - u_lo) * (u_hi - u_q) / denom
        else:
            g = (u_q - u_lo) * (u_hi - u_r) / denom
        vp = float(s.u_prime(r)) * float(s.speed_weight(r))
        return g * vp

    pts = sorted({p for p in (q, -1.0, 1.0) if lo < p < hi})
    val, _err = quad(integrand, lo, hi, points=pts, epsrel=rtol, epsabs=0.0, limit=400)
    return float(val)


def laplace_exit_time(s: ScaleEvaluator, lam: float, q: float, lo: float, hi: float,
                      n_cells: int = 4096, tol: float = 1e-6) -> float:
    """E[exp(-lam * exit time)] via the generalized two-point BVP.

    Solves D_v D_u M = lam M with M(lo) = M(hi) = 1 on a uniform grid in the
    natural-scale coordinate, where the operator is M''(x) / w(x) with
    w = dv/du.  A coarse/fine comparison guards the discretization error.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if s.eps <= 0.0:
        raise ValueError("laplace_exit_time requires eps > 0")
    if not (lo <= q <= hi):
        raise ValueError("need lo <= q <= hi")
    if q == lo or q == hi:
        return 1.0
    coarse = _laplace_solve(s, lam, q, lo, hi, max(n_cells // 2, 16))
    fine = _laplace_solve(s, lam, q, lo, hi, n_cells)
    if abs(fine - coarse) > tol:
        raise AccuracyError(
            f"Laplace BVP not converged: |M_fine - M_coarse| = {abs(fine - coarse):.2e} > {tol:g}; "
            f"increase n_cells (currently {n_cells})"
        )
    return fine


def _laplace_solve(s: ScaleEvaluator, lam: float, q: float, lo: float, hi: float,
                   n_cells: int) -> float:
    u_lo, u_hi = float(s.u(lo)), float(s.u(hi))
    if u_hi - u_lo <= 0.0:
        raise DegenerateIntervalError("scale increment over [lo, hi] vanishes")
    x = np.linspace(u_lo, u_hi, n_cells + 1)
    h = x[1] - x[0]
    q_nodes = s.u_inv_array(x[1:-1])
    w = np.asarray(s.speed_weight(q_nodes), dtype=float)
    n = n_cells - 1
    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0 / h**2
    ab[1, :] = 2.0 / h**2 + lam * w
    ab[2, :-1] = -1.0 / h**2
    rhs = np.zeros(n)
    rhs[0] += 1.0 / h**2
    rhs[-1] += 1.0 / h**2
    m_int = solve_banded((1, 1), ab, rhs)
    m = np.concatenate([[1.0], m_int, [1.0]])
    return float(np.interp(float(s.u(q)), x, m))


# ---------------------------------------------------------------------------
# cone resolvent modes
# ---------------------------------------------------------------------------

@dataclass
class BVPSolution:
    """Solution of one angular mode of the cone resolvent equation."""

    grid: np.ndarray          # projected positions y in [a, b]
    values: np.ndarray        # g(y)
    residual_norm: float      # max norm of the discrete-equation residual
    x_grid: np.ndarray = field(repr=False, default=None)
    mode: int = 0
    lam: float = 0.0
    # homogeneous solutions and Wronskian samples per half (n != 0 only)
    xi1_pos: Optional[np.ndarray] = field(repr=False, default=None)
    xi2_pos: Optional[np.ndarray] = field(repr=False, default=None)
    wronskian_pos: Optional[np.ndarray] = field(repr=False, default=None)
    xi1_neg: Optional[np.ndarray] = field(repr=False, default=None)
    xi2_neg: Optional[np.ndarray] = field(repr=False, default=None)
    wronskian_neg: Optional[np.ndarray] = field(repr=False, default=None)


def _half_line_solve(ps: ProjectedScale, n: int, lam: float, G: Callable, x_end: float,
                     n_cells: int):
    """Assemble the mode solution on (0, x_end] from homogeneous solutions.

    Discrete operator: (lam + V_i) g_i - (g_{i+1} - 2 g_i + g_{i-1})/(2 h^2).
    xi1 vanishes at the glued point and increases outward; xi2 vanishes at
    the outer end and blows up toward the glued point.  The particular
    solution uses the exact discrete Green identity built from the constant
    Casoratian, then a multiple of xi1 matches the outer boundary value
    g(end) = G(end)/lam.
    """
    # grid from 0 to x_end (x_end positive or negative); node 0 is the vertex
    x = np.linspace(0.0, x_end, n_cells + 1)
    h = abs(x[1] - x[0])
    y = ps.u_tilde_inv_array(x[1:])
    V = np.empty(n_cells + 1)
    V[0] = np.inf
    V[1:] = (n * n) / np.asarray(ps.lam_tilde(y), dtype=float) ** 2
    g_rhs = np.empty(n_cells + 1)
    g_rhs[0] = 0.0
    g_rhs[1:] = np.asarray([float(G(v)) for v in y])

    b_coef = 2.0 + 2.0 * h * h * (lam + V)  # recurrence multiplier at interior nodes

    xi1 = np.empty(n_cells + 1)
    xi1[0] = 0.0
    xi1[1] = h
    for i in range(1, n_cells):
        xi1[i + 1] = b_coef[i] * xi1[i] - xi1[i - 1]

    xi2 = np.empty(n_cells + 1)
    xi2[n_cells] = 0.0
    xi2[n_cells - 1] = h
    for i in range(n_cells - 1, 1, -1):
        xi2[i - 1] = b_coef[i] * xi2[i] - xi2[i + 1]
    xi2[0] = np.inf  # singular at the glued point

    # Casoratian C_i = xi1_{i+1} xi2_i - xi1_i xi2_{i+1}; constant in i.
    cas = xi1[2] * xi2[1] - xi1[1] * xi2[2]
    wron = (xi1[2:] * xi2[1:-1] - xi1[1:-1] * xi2[2:]) / h

    # discrete Green solve: g~_i = (2 h^2 / C) [xi2_i sum_{j<=i} xi1_j G_j
    #                                           + xi1_i sum_{j>i} xi2_j G_j]
    w_lo = np.concatenate([[0.0], np.cumsum(xi1[1:-1] * g_rhs[1:-1])])  # over j = 1..i
    w_hi_rev = np.cumsum((xi2[1:-1] * g_rhs[1:-1])[::-1])[::-1]         # over j = i..N-1
    g_t = np.zeros(n_cells + 1)
    idx = np.arange(1, n_cells)
    tail = np.concatenate([w_hi_rev[1:], [0.0]])  # sum over j > i
    g_t[idx] = (2.0 * h * h / cas) * (xi2[idx] * w_lo[idx] + xi1[idx] * tail[idx - 1])
    # outer boundary: g(end) = G(end)/lam via the xi1 correction
    c1 = (g_rhs[n_cells] / lam - g_t[n_cells]) / xi1[n_cells]
    g = g_t + c1 * xi1
    g[0] = 0.0
    g[n_cells] = g_rhs[n_cells] / lam

    # residual of the discrete equation on interior nodes
    res = (lam + V[1:-1]) * g[1:-1] - (g[2:] - 2.0 * g[1:-1] + g[:-2]) / (2.0 * h * h) - g_rhs[1:-1]
    y_full = np.concatenate([[0.0], y])
    return x, y_full, g, float(np.max(np.abs(res))), xi1, xi2, wron


def resolvent_mode_solve(ps: ProjectedScale, n: int, lam: float, G: Callable,
                         n_cells: int = 4096) -> BVPSolution:
    """Solve one angular Fourier mode of the cone resolvent equation.

    Parameters
    ----------
    ps : ProjectedScale
        Glued scale of a driftless profile.
    n : int
        Angular mode number; ``n != 0`` requires ``G(0) = 0``.
    lam : float
        Resolvent parameter, positive.
    G : callable
        Continuous data on [a, b].

    Returns
    -------
    BVPSolution with the glued-point value 0 for n != 0 (continuity through
    the gluing for n = 0), outer values G/lam, and the homogeneous pair plus
    Wronskian samples for the singular halves.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if ps.profile.has_drift:
        raise ValueError("the cone model requires a driftless profile")
    x_a = float(ps.u_tilde(ps.a))
    x_b = float(ps.u_tilde(ps.b))
    if n == 0:
        x = np.linspace(x_a, x_b, n_cells + 1)
        h = x[1] - x[0]
        y = ps.u_tilde_inv_array(x)
        g_rhs = np.asarray([float(G(v)) for v in y])
        m = n_cells - 1
        ab = np.zeros((3, m))
        ab[0, 1:] = -1.0 / (2 * h * h)
        ab[1, :] = 1.0 / (h * h) + lam
        ab[2, :-1] = -1.0 / (2 * h * h)
        rhs = g_rhs[1:-1].copy()
        g_a = g_rhs[0] / lam
        g_b = g_rhs[-1] / lam
        rhs[0] += g_a / (2 * h * h)
        rhs[-1] += g_b / (2 * h * h)
        sol = solve_banded((1, 1), ab, rhs)
        g = np.concatenate([[g_a], sol, [g_b]])
        res = lam * g[1:-1] - (g[2:] - 2 * g[1:-1] + g[:-2]) / (2 * h * h) - g_rhs[1:-1]
        return BVPSolution(grid=y, values=g, residual_norm=float(np.max(np.abs(res))),
                           x_grid=x, mode=n, lam=lam)

    if abs(float(G(0.0))) > 1e-12:
        raise InconsistentDataError("modes with n != 0 require G(0) = 0")
    n_pos = max(int(round(n_cells * x_b / (x_b - x_a))), 8)
    n_neg = max(n_cells - n_pos, 8)
    xp, yp, gp, res_p, xi1p, xi2p, wp = _half_line_solve(ps, n, lam, G, x_b, n_pos)
    xm, ym, gm, res_m, xi1m, xi2m, wm = _half_line_solve(ps, n, lam, G, x_a, n_neg)
    # stitch: negative half runs 0 -> x_a; flip to a -> 0 ordering
    grid = np.concatenate([ym[::-1], yp[1:]])
    vals = np.concatenate([gm[::-1], gp[1:]])
    xs = np.concatenate([xm[::-1], xp[1:]])
    return BVPSolution(
        grid=grid, values=vals, residual_norm=max(res_p, res_m), x_grid=xs,
        mode=n, lam=lam,
        xi1_pos=xi1p, xi2_pos=xi2p, wronskian_pos=wp,
        xi1_neg=xi1m, xi2_neg=xi2m, wronskian_neg=wm,
    )


# ---------------------------------------------------------------------------
# mixing bounds and the asymptotic schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixingBounds:
    """Closed-form lower bounds for the band re-entry statistics.

    ``p_alpha`` bounds P(the walk touches the band edge before leaving
    through G(delta)); ``p_beta`` bounds the conditional re-entry to depth
    delta''; ``p_count`` bounds P(at least M cycles).  ``omega`` is the
    uniformization error budget built from them and ``rho`` adds the
    explicit collar term plus the exponential clock term with configurable
    constants.
    """

    p_alpha: float
    p_beta: float
    p_count: float
    omega: float
    rho: float


def mixing_bounds(ps: ProjectedScale, eps: float, delta: float, delta_prime: float,
                  delta2: float, M: int, c1: float = 1.0, A: float = 1.0,
                  kappa: float = 1.0, c2: float = 1.0) -> MixingBounds:
    """Evaluate the displayed mixing bounds at finite parameters.

    The constants (c1, A, kappa, c2) entering ``rho`` are experiment inputs
    with default 1; only scale ratios and omega are fully explicit.
    """
    if not (0 < delta_prime < delta):
        raise ValueError("need 0 < delta_prime < delta")
    if delta2 <= 0:
        raise ValueError("need delta2 > 0")
    if M < 1:
        raise ValueError("need M >= 1")
    ut_d = float(ps.u_tilde(delta))
    ut_md = float(ps.u_tilde(-delta))
    ut_dp = float(ps.u_tilde(delta_prime))
    ut_mdp = float(ps.u_tilde(-delta_prime))

    ratio_alpha = max(
        (ut_dp + eps * delta_prime) / (ut_d + eps * delta),
        (-ut_mdp + eps * delta_prime) / (-ut_md + eps * delta),
    )
    p_alpha = min(max(1.0 - ratio_alpha, 0.0), 1.0)
    ratio_beta = max(
        (eps * delta2) / (ut_d + eps * (delta + delta2)),
        (eps * delta2) / (-ut_md + eps * (delta + delta2)),
    )
    p_beta = min(max(1.0 - ratio_beta, 0.0), 1.0)
    p_count = p_beta ** (M - 1)
    omega = 2.0 * ((1.0 - p_count) + 2.0 * ratio_alpha)
    rho = (
        c1 * math.exp(-A * delta2**5 * kappa * M)
        + 2.0 * omega
        + (ut_dp + c2 * eps) / (ut_d - ut_md)
    )
    return MixingBounds(p_alpha=p_alpha, p_beta=p_beta, p_count=p_count,
                        omega=max(omega, 0.0), rho=max(rho, 0.0))


@dataclass(frozen=True)
class Schedule:
    """Joint (eps, M, delta, delta', delta'') schedule for the mixing regime."""

    eps: float
    M: int
    delta: float
    delta_prime: float
    delta2: float
    lhs_324: float
    rhs_324: float
    lhs_325: float
    rhs_325: float

    @property
    def ok_324(self) -> bool:
        return self.lhs_324 >= self.rhs_324

    @property
    def ok_325(self) -> bool:
        return self.lhs_325 <= self.rhs_325

    @property
    def asymptotic_ok(self) -> bool:
        return self.ok_324 and self.ok_325 and self.delta2 < self.delta


def schedule(ps: ProjectedScale, eps: float, enforce: bool = True) -> Schedule:
    """Parameter ladder M = round(ln(1/eps)), delta = 1/ln(ln(1/eps)), delta' = delta^2.

    delta'' is chosen so that the cycle count beats the clock requirement:
    delta''^5 = ln(1/Dm^2) / (Dm * ln(1/eps)) with Dm = u~(delta) - u~(-delta).
    The two numeric constraints (cycle count large enough, re-entry failure
    small enough) are evaluated; with ``enforce`` a violation raises.
    """
    if not (0.0 < eps < math.exp(-1.0)):
        raise ScheduleError(f"need 0 < eps < e^-1, got {eps}")
    log_inv = math.log(1.0 / eps)
    M = int(round(log_inv))
    loglog = math.log(log_inv)
    if loglog <= 1.0:
        raise ScheduleError(
            f"ladder degenerate at eps={eps}: delta = 1/ln(ln(1/eps)) = {1.0 / loglog:.3f} >= 1"
        )
    delta = 1.0 / loglog
    if delta > min(ps.b, -ps.a):
        raise ScheduleError(f"delta={delta:.3f} exceeds the projected domain [{ps.a}, {ps.b}]")
    delta_prime = delta * delta
    d_ut = float(ps.u_tilde(delta)) - float(ps.u_tilde(-delta))
    if not (0.0 < d_ut < 1.0):
        raise ScheduleError(f"scale increment over [-delta, delta] is {d_ut:.3g}")
    delta2 = ((1.0 / d_ut) * math.log(1.0 / d_ut**2) / log_inv) ** 0.2
    if delta2 >= 2.0:
        raise ScheduleError(f"delta''={delta2:.3f} leaves the friction band (needs < 2)")
    lhs_324 = delta2**5 * M
    rhs_324 = math.log(1.0 / d_ut**2)
    lhs_325 = M * eps * delta2 / min(float(ps.u_tilde(delta)), -float(ps.u_tilde(-delta)))
    rhs_325 = d_ut**2
    sched = Schedule(eps=eps, M=M, delta=delta, delta_prime=delta_prime, delta2=delta2,
                     lhs_324=lhs_324, rhs_324=rhs_324, lhs_325=lhs_325, rhs_325=rhs_325)
    if enforce and not (sched.ok_324 and sched.ok_325):
        raise ScheduleError(
            "schedule constraints violated at eps="
            f"{eps}: count requirement {lhs_324:.4g} >= {rhs_324:.4g} is {sched.ok_324}; "
            f"re-entry requirement {lhs_325:.4g} <= {rhs_325:.4g} is {sched.ok_325}"
        )
    return sched
