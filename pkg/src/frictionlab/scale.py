"""Scale-type functions of the regularized process and their projected versions.

For friction ``lam``, drift ``b`` and regularization ``eps`` the two monotone
functions

    u_eps(q) = int_0^q (lam+eps) exp(-2 int_0^x b (lam+eps)) dx
    v_eps(q) = 2 int_0^q (lam+eps) exp(+2 int_0^x b (lam+eps)) dx

turn the process into a generalized diffusion with operator D_{v} D_{u}; in
the driftless case ``u_eps(q) = u_0(q) + eps q`` and ``v_eps = 2 u_eps``,
where ``u_0 = int_0^q lam``.  Mapping through the projection that collapses
the flat band gives the glued-scale functions ``u~, v~, lam~`` on ``[a, b]``.

Driftless built-in profiles are evaluated through their closed-form friction
integral; everything else falls back to high-accuracy quadrature (piecewise
``solve_ivp`` with dense output, split at the band edges where ``lam`` has
kinks).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .profiles import FrictionProfile

__all__ = ["ScaleEvaluator", "ProjectedScale", "NaturalTable", "natural_table"]

_QUAD_RTOL = 1e-12
_QUAD_ATOL = 1e-14


class _OdePieces:
    """Dense piecewise solution of the cumulative scale integrals."""

    def __init__(self, profile: FrictionProfile, eps: float):
        self._pieces = []  # (q_lo, q_hi, OdeSolution)
        b = profile.drift_b

        def rhs(q, y):
            lam_eps = float(profile.lam(q)) + eps
            bq = float(b(q)) if b is not None else 0.0
            B = y[0]
            return [
                bq * lam_eps,
                lam_eps * np.exp(-2.0 * B),
                2.0 * lam_eps * np.exp(2.0 * B),
            ]

        breaks_up = [x for x in (profile.flat_hi, profile.q_max) if x > 0.0]
        breaks_dn = [x for x in (profile.flat_lo, profile.q_min) if x < 0.0]
        for targets in (sorted(set(breaks_up)), sorted(set(breaks_dn), reverse=True)):
            y0 = np.zeros(3)
            start = 0.0
            for stop in targets:
                sol = solve_ivp(
                    rhs, (start, stop), y0, method="DOP853", dense_output=True,
                    rtol=_QUAD_RTOL, atol=_QUAD_ATOL,
                )
                if not sol.success:
                    raise RuntimeError(f"scale quadrature failed on [{start}, {stop}]: {sol.message}")
                self._pieces.append((min(start, stop), max(start, stop), sol.sol))
                y0 = sol.y[:, -1]
                start = stop

    def eval(self, q: np.ndarray) -> np.ndarray:
        """Return rows (B, u, v) at each q (q = 0 gives zeros)."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.zeros((3, q.size))
        for lo, hi, sol in self._pieces:
            mask = (q >= lo - 1e-14) & (q <= hi + 1e-14) & (q != 0.0)
            if mask.any():
                out[:, mask] = sol(np.clip(q[mask], lo, hi))
        return out


class ScaleEvaluator:
    """Evaluator for ``u_eps``, ``v_eps`` and the monotone inverse of ``u_eps``.

    Immutable after construction; safe for concurrent reads.

    Parameters
    ----------
    profile : FrictionProfile
    eps : float
        Regularization level, ``eps >= 0``.  Inversion requires ``eps > 0``
        (for ``eps = 0`` the scale is flat across the band).
    """

    def __init__(self, profile: FrictionProfile, eps: float):
        if eps < 0:
            raise ValueError("eps must be nonnegative")
        self.profile = profile
        self.eps = float(eps)
        self._closed_form = profile.lam_integral is not None and profile.drift_b is None
        self._pieces: Optional[_OdePieces] = None
        if not self._closed_form:
            self._pieces = _OdePieces(profile, self.eps)

    # -- forward evaluation -------------------------------------------------

    def u(self, q):
        """u_eps(q); accepts scalars or arrays, domain-checked."""
        self.profile.check_domain(q)
        return self._u_unchecked(np.asarray(q, dtype=float))

    def _u_unchecked(self, q):
        if self._closed_form:
            return self.profile.lam_integral(q) + self.eps * q
        return self._pieces.eval(q)[1].reshape(np.shape(q))

    def v(self, q):
        """v_eps(q)."""
        self.profile.check_domain(q)
        q = np.asarray(q, dtype=float)
        if self._closed_form:
            return 2.0 * (self.profile.lam_integral(q) + self.eps * q)
        return self._pieces.eval(q)[2].reshape(np.shape(q))

    def u_prime(self, q):
        """d u_eps / dq."""
        q = np.asarray(q, dtype=float)
        lam_eps = np.asarray(self.profile.lam(q), dtype=float) + self.eps
        if self._closed_form:
            return lam_eps
        B = self._pieces.eval(q)[0].reshape(np.shape(q))
        return lam_eps * np.exp(-2.0 * B)

    def speed_weight(self, q):
        """dv/du = v'(q)/u'(q); equals 2 for driftless profiles."""
        q = np.asarray(q, dtype=float)
        if self._closed_form:
            return np.full(np.shape(q), 2.0)
        B = self._pieces.eval(q)[0].reshape(np.shape(q))
        return 2.0 * np.exp(4.0 * B)

    # -- inversion -----------------------------------------------------------

    @property
    def x_min(self) -> float:
        return float(self._u_unchecked(np.float64(self.profile.q_min)))

    @property
    def x_max(self) -> float:
        return float(self._u_unchecked(np.float64(self.profile.q_max)))

    def u_inv(self, x: float) -> float:
        """Monotone inverse of u_eps, bracketed root finding to ~1e-14.

        Requires ``eps > 0`` so that the scale is strictly increasing.
        """
        if self.eps <= 0.0:
            raise ValueError("inversion requires eps > 0")
        lo, hi = self.x_min, self.x_max
        if x < lo - 1e-12 or x > hi + 1e-12:
            raise ValueError(f"x={x} outside scale range [{lo}, {hi}]")
        x = min(max(x, lo), hi)
        f = lambda q: float(self._u_unchecked(np.float64(q))) - x
        return brentq(f, self.profile.q_min, self.profile.q_max, xtol=1e-14, rtol=8.9e-16)

    def u_inv_array(self, x: np.ndarray, n_iter: int = 64) -> np.ndarray:
        """Vectorized inverse by bisection (same tolerance class as u_inv)."""
        if self.eps <= 0.0:
            raise ValueError("inversion requires eps > 0")
        x = np.asarray(x, dtype=float)
        lo = np.full(x.shape, self.profile.q_min)
        hi = np.full(x.shape, self.profile.q_max)
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self._u_unchecked(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


class ProjectedScale:
    """Glued-scale functions ``u~, v~, lam~`` on the projected domain ``[a, b]``."""

    def __init__(self, profile: FrictionProfile):
        self.profile = profile
        self.underlying = ScaleEvaluator(profile, 0.0)
        self.a = profile.a
        self.b = profile.b

    def _unproject(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < self.a - 1e-12) or np.any(y > self.b + 1e-12):
            raise ValueError(f"projected position outside [{self.a}, {self.b}]")
        return y + np.sign(y)

    def u_tilde(self, y):
        return self.underlying._u_unchecked(self._unproject(y))

    def v_tilde(self, y):
        y = self._unproject(y)
        self.profile.check_domain(y)
        return self.underlying.v(y)

    def lam_tilde(self, y):
        return np.asarray(self.profile.lam(self._unproject(y)), dtype=float)

    def u_tilde_inv(self, x: float) -> float:
        """Inverse of the (strictly increasing) glued scale on [a, b]."""
        lo = float(self.u_tilde(self.a))
        hi = float(self.u_tilde(self.b))
        if x < lo - 1e-12 or x > hi + 1e-12:
            raise ValueError(f"x={x} outside glued scale range [{lo}, {hi}]")
        x = min(max(x, lo), hi)
        if self.profile.glued_scale_inv is not None and self.profile.drift_b is None:
            return float(self.profile.glued_scale_inv(x))
        f = lambda y: float(self.u_tilde(np.float64(y))) - x
        return brentq(f, self.a, self.b, xtol=1e-14, rtol=8.9e-16)

    def u_tilde_inv_array(self, x: np.ndarray, n_iter: int = 64) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.profile.glued_scale_inv is not None and self.profile.drift_b is None:
            lo = float(self.u_tilde(self.a))
            hi = float(self.u_tilde(self.b))
            return np.asarray(self.profile.glued_scale_inv(np.clip(x, lo, hi)), dtype=float)
        lo = np.full(x.shape, self.a)
        hi = np.full(x.shape, self.b)
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self.u_tilde(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class NaturalTable:
    """Uniform grid in the natural-scale coordinate for the jit kernels.

    ``lam_tab[i]`` is the friction at ``q(x_lo + i h)``;
    ``q_tab`` stores the corresponding positions for state snapping.
    """

    x_lo: float
    h: float
    lam_tab: np.ndarray
    q_tab: np.ndarray
    eps: float

    @property
    def x_hi(self) -> float:
        return self.x_lo + self.h * (len(self.lam_tab) - 1)


def natural_table(profile: FrictionProfile, eps: float, n: int = 65537) -> NaturalTable:
    """Tabulate friction against the natural-scale coordinate ``x = u_eps(q)``.

    The grid must resolve the boundary layer where ``lam ~ eps``; 2**16+1
    nodes keep the interpolation error of ``lam`` well below ``eps`` for the
    desk-scale eps values used in the experiments.
    """
    if profile.drift_b is not None:
        raise ValueError("natural-scale tables require a driftless profile")
    ev = ScaleEvaluator(profile, eps)
    x = np.linspace(ev.x_min, ev.x_max, n)
    q = ev.u_inv_array(x)
    q[0], q[-1] = profile.q_min, profile.q_max
    lam = np.asarray(profile.lam(q), dtype=float)
    return NaturalTable(x_lo=float(x[0]), h=float(x[1] - x[0]), lam_tab=lam, q_tab=q, eps=float(eps))
