"""Friction profiles with a zero-friction band and the regularized SDE coefficients.

A profile carries a friction field ``lam`` that vanishes on the band
``[-1, 1]`` and is strictly positive on the rest of the truncated domain
``[a - 1, b + 1]``, together with its derivative and an optional drift.
The regularized dynamics at level ``eps > 0`` is

    dq = [ b(q)/(lam(q)+eps) - lam'(q) / (2 (lam(q)+eps)^3) ] dt
         + 1/(lam(q)+eps) dW,

whose drift and noise fields are exposed through :func:`coefficients`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "FrictionProfile",
    "Coefficients",
    "ValidationCheck",
    "ValidationReport",
    "InvalidProfileError",
    "coefficients",
    "validate_profile",
    "quadratic_profile",
    "quartic_profile",
    "asymmetric_profile",
    "make_profile",
    "PROFILES",
]

# Kernel ids for the numba fast paths; -1 means "no closed-form kernel".
KERNEL_NONE = -1
KERNEL_QUADRATIC = 0
KERNEL_QUARTIC = 1
KERNEL_ASYMMETRIC = 2


class InvalidProfileError(ValueError):
    """A friction profile violates a structural requirement (e.g. non-finite values)."""


@dataclass(frozen=True)
class FrictionProfile:
    """Position-dependent friction on the truncated domain ``[a-1, b+1]``.

    Parameters
    ----------
    lam : callable
        Friction field ``q -> lam(q) >= 0``; must vanish exactly on
        ``[flat_lo, flat_hi]`` and accept numpy arrays.
    lam_prime : callable
        Analytic derivative of ``lam`` (no symbolic differentiation is done).
    a, b : float
        Projected domain ends, ``a < 0 < b``; physical domain is ``[a-1, b+1]``.
    drift_b : callable, optional
        Drift field ``b(q)`` (1-d runs only; the cylinder model requires
        ``drift_b is None``).
    lam_integral : callable, optional
        Closed form of ``int_0^q lam``; when available the scale functions
        for driftless runs are evaluated exactly instead of by quadrature.
    glued_scale_inv : callable, optional
        Closed-form inverse of the glued scale u~ on [a, b] (monotone
        bisection is used when absent).
    divergence_flag : bool
        Whether ``int 1/lam`` diverges at the edges of the flat band (the
        hypothesis the cylinder model needs).
    """

    lam: Callable[[np.ndarray], np.ndarray]
    lam_prime: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    drift_b: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lam_integral: Optional[Callable[[np.ndarray], np.ndarray]] = None
    glued_scale_inv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    divergence_flag: bool = False
    flat_lo: float = -1.0
    flat_hi: float = 1.0
    name: str = "custom"
    kernel_id: int = KERNEL_NONE
    kernel_param: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a < 0.0 < self.b):
            raise InvalidProfileError(f"need a < 0 < b, got a={self.a}, b={self.b}")
        if (self.flat_lo, self.flat_hi) != (-1.0, 1.0):
            raise InvalidProfileError("the flat band is fixed to [-1, 1] in this model")

    @property
    def q_min(self) -> float:
        return self.a - 1.0

    @property
    def q_max(self) -> float:
        return self.b + 1.0

    @property
    def has_drift(self) -> bool:
        return self.drift_b is not None

    def check_domain(self, q) -> None:
        q = np.asarray(q, dtype=float)
        if np.any(q < self.q_min - 1e-12) or np.any(q > self.q_max + 1e-12):
            raise ValueError(
                f"position outside physical domain [{self.q_min}, {self.q_max}]"
            )


@dataclass(frozen=True)
class Coefficients:
    """Drift and noise of the regularized SDE at a single point."""

    drift: float
    noise: float


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    profile_name: str
    grid_n: int
    checks: Sequence[ValidationCheck]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def coefficients(p: FrictionProfile, eps: float, q: float) -> Coefficients:
    """Evaluate the regularized SDE coefficients at position ``q``.

    drift = b(q)/(lam+eps) - lam'(q) / (2 (lam+eps)^3),  noise = 1/(lam+eps).
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    p.check_domain(q)
    lam = float(p.lam(q))
    lam_p = float(p.lam_prime(q))
    denom = lam + eps
    drift = -lam_p / (2.0 * denom**3)
    if p.drift_b is not None:
        drift += float(p.drift_b(q)) / denom
    return Coefficients(drift=drift, noise=1.0 / denom)


def validate_profile(p: FrictionProfile, grid_n: int = 10_000) -> ValidationReport:
    """Check the structural hypotheses of a profile on a sample grid.

    Verifies nonnegativity, exact vanishing on the flat band, strict
    positivity outside it, and continuity of ``lam'`` across the band edges
    (including a finite-difference cross-check of the supplied derivative).

    Raises
    ------
    InvalidProfileError
        If ``lam`` evaluates to a non-finite value anywhere on the grid.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    q = np.linspace(p.q_min, p.q_max, grid_n)
    lam = np.asarray(p.lam(q), dtype=float)
    if not np.all(np.isfinite(lam)):
        raise InvalidProfileError("lam evaluates to a non-finite value")

    checks = []

    ok = bool(np.all(lam >= -1e-15))
    checks.append(ValidationCheck("nonnegativity", ok, f"min lam = {lam.min():.3e}"))

    flat = (q >= p.flat_lo) & (q <= p.flat_hi)
    ok = bool(np.all(np.abs(lam[flat]) <= 1e-15)) if flat.any() else True
    checks.append(
        ValidationCheck(
            "flat-band zero", ok, f"max |lam| on band = {np.abs(lam[flat]).max():.3e}"
        )
    )

    # Strict positivity away from the band edges (a collar avoids grading
    # the continuous approach to zero as a failure).
    collar = 0.05 * min(1.0, -p.a, p.b)
    outside = (q < p.flat_lo - collar) | (q > p.flat_hi + collar)
    ok = bool(np.all(lam[outside] > 0.0)) if outside.any() else False
    checks.append(
        ValidationCheck(
            "positivity outside band",
            ok,
            f"min lam outside = {lam[outside].min():.3e}" if outside.any() else "no exterior points",
        )
    )

    # lam' continuity with the flat stretch: the analytic derivative must
    # vanish at +-1 and match central differences on the sample grid.
    h = 1e-6
    tol = 1e-3
    edge_ok = True
    worst_edge = 0.0
    for edge, side in ((p.flat_hi, +1.0), (p.flat_lo, -1.0)):
        q_out = edge + side * h
        fd = side * (float(p.lam(q_out)) - float(p.lam(edge))) / h
        worst_edge = max(worst_edge, abs(fd), abs(float(p.lam_prime(edge))))
        if abs(fd) > tol or abs(float(p.lam_prime(edge))) > tol:
            edge_ok = False
    interior = q[(q > p.q_min + h) & (q < p.q_max - h)]
    fd = (np.asarray(p.lam(interior + h)) - np.asarray(p.lam(interior - h))) / (2 * h)
    mismatch = float(np.max(np.abs(fd - np.asarray(p.lam_prime(interior), dtype=float))))
    deriv_ok = edge_ok and mismatch <= tol
    checks.append(
        ValidationCheck(
            "lam' continuity",
            deriv_ok,
            f"edge slope = {worst_edge:.3e}, max fd mismatch = {mismatch:.3e}",
        )
    )

    return ValidationReport(profile_name=p.name, grid_n=grid_n, checks=tuple(checks))


def _excess(q: np.ndarray) -> np.ndarray:
    """(|q| - 1)_+ elementwise."""
    return np.maximum(np.abs(q) - 1.0, 0.0)


def quadratic_profile(a: float = -2.0, b: float = 2.0) -> FrictionProfile:
    """lam(q) = ((|q|-1)_+)^2; int 1/lam diverges at the band edges."""

    def lam(q):
        return _excess(np.asarray(q, dtype=float)) ** 2

    def lam_prime(q):
        q = np.asarray(q, dtype=float)
        return 2.0 * _excess(q) * np.sign(q)

    def lam_integral(q):
        q = np.asarray(q, dtype=float)
        return np.sign(q) * _excess(q) ** 3 / 3.0

    def glued_inv(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.cbrt(3.0 * np.abs(x))

    return FrictionProfile(
        lam=lam, lam_prime=lam_prime, a=a, b=b, lam_integral=lam_integral,
        glued_scale_inv=glued_inv,
        divergence_flag=True, name="quadratic", kernel_id=KERNEL_QUADRATIC,
    )


def quartic_profile(a: float = -2.0, b: float = 2.0) -> FrictionProfile:
    """lam(q) = ((|q|-1)_+)^4."""

    def lam(q):
        return _excess(np.asarray(q, dtype=float)) ** 4

    def lam_prime(q):
        q = np.asarray(q, dtype=float)
        return 4.0 * _excess(q) ** 3 * np.sign(q)

    def lam_integral(q):
        q = np.asarray(q, dtype=float)
        return np.sign(q) * _excess(q) ** 5 / 5.0

    def glued_inv(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * (5.0 * np.abs(x)) ** 0.2

    return FrictionProfile(
        lam=lam, lam_prime=lam_prime, a=a, b=b, lam_integral=lam_integral,
        glued_scale_inv=glued_inv,
        divergence_flag=True, name="quartic", kernel_id=KERNEL_QUARTIC,
    )


def asymmetric_profile(a: float = -2.0, b: float = 2.0, bottom_factor: float = 4.0) -> FrictionProfile:
    """Quadratic band profile with the bottom branch scaled by ``bottom_factor``."""
    if bottom_factor <= 0:
        raise InvalidProfileError("bottom_factor must be positive")
    c = float(bottom_factor)

    def scale_of(q):
        return np.where(np.asarray(q, dtype=float) < 0, c, 1.0)

    def lam(q):
        q = np.asarray(q, dtype=float)
        return scale_of(q) * _excess(q) ** 2

    def lam_prime(q):
        q = np.asarray(q, dtype=float)
        return scale_of(q) * 2.0 * _excess(q) * np.sign(q)

    def lam_integral(q):
        q = np.asarray(q, dtype=float)
        return scale_of(q) * np.sign(q) * _excess(q) ** 3 / 3.0

    def glued_inv(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.cbrt(3.0 * np.abs(x) / scale_of(x))

    return FrictionProfile(
        lam=lam, lam_prime=lam_prime, a=a, b=b, lam_integral=lam_integral,
        glued_scale_inv=glued_inv,
        divergence_flag=True, name="asymmetric", kernel_id=KERNEL_ASYMMETRIC,
        kernel_param=c,
    )


PROFILES: dict[str, Callable[..., FrictionProfile]] = {
    "quadratic": quadratic_profile,
    "quartic": quartic_profile,
    "asymmetric": asymmetric_profile,
}


def make_profile(name: str, **params) -> FrictionProfile:
    """Build a named built-in profile (``quadratic``, ``quartic``, ``asymmetric``)."""
    try:
        factory = PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; available: {sorted(PROFILES)}") from None
    return factory(**params)


def with_constant_drift(p: FrictionProfile, value: float) -> FrictionProfile:
    """Return a copy of ``p`` with drift ``b(q) = value`` (1-d runs only)."""

    def drift(q):
        return np.full_like(np.asarray(q, dtype=float), float(value))

    return FrictionProfile(
        lam=p.lam, lam_prime=p.lam_prime, a=p.a, b=p.b, drift_b=drift,
        lam_integral=p.lam_integral, divergence_flag=p.divergence_flag,
        name=f"{p.name}+drift", kernel_id=KERNEL_NONE,
    )
