"""Projections onto the glued state spaces and the cone metric.

The 1-d projection collapses the flat band ``[-1, 1]`` to the single point
``0`` of ``[a, b]``.  The 2-d projection collapses the cylinder band
``S^1 x [-1, 1]`` to the cone vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["project_1d", "project_2d", "ConePoint", "VERTEX", "cone_distance"]

TWO_PI = 2.0 * math.pi
_EQ_TOL = 1e-12


def project_1d(q, a: Optional[float] = None, b: Optional[float] = None):
    """Collapse [-1, 1] to 0: q+1 below the band, q-1 above, 0 inside.

    Accepts scalars or arrays.  When ``a``/``b`` are given, positions are
    checked against the physical domain ``[a-1, b+1]``.
    """
    arr = np.asarray(q, dtype=float)
    if a is not None and np.any(arr < a - 1.0 - 1e-12):
        raise ValueError("position below physical domain")
    if b is not None and np.any(arr > b + 1.0 + 1e-12):
        raise ValueError("position above physical domain")
    out = np.where(arr > 1.0, arr - 1.0, np.where(arr < -1.0, arr + 1.0, 0.0))
    return float(out) if np.isscalar(q) else out


@dataclass(frozen=True, eq=False)
class ConePoint:
    """Point of the cone: vertex when ``y == 0``, else (theta mod 2pi, y).

    Equality identifies points within cone distance 1e-12, so every
    representation (theta, 0) equals the vertex.
    """

    theta: float
    y: float

    def __post_init__(self):
        th = self.theta % TWO_PI if self.y != 0.0 else 0.0
        object.__setattr__(self, "theta", float(th))
        object.__setattr__(self, "y", float(self.y))

    @property
    def is_vertex(self) -> bool:
        return self.y == 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConePoint):
            return NotImplemented
        return cone_distance(self, other) <= _EQ_TOL

    def __repr__(self) -> str:
        return "ConePoint(vertex)" if self.is_vertex else f"ConePoint(theta={self.theta:.6g}, y={self.y:.6g})"


VERTEX = ConePoint(0.0, 0.0)


def project_2d(theta: float, y: float, a: Optional[float] = None, b: Optional[float] = None) -> ConePoint:
    """Project a cylinder point onto the cone: band rows to the vertex."""
    if a is not None and y < a - 1.0 - 1e-12:
        raise ValueError("position below physical domain")
    if b is not None and y > b + 1.0 + 1e-12:
        raise ValueError("position above physical domain")
    if -1.0 <= y <= 1.0:
        return VERTEX
    return ConePoint(theta, y - 1.0 if y > 1.0 else y + 1.0)


def _embed(p: ConePoint) -> tuple[float, float]:
    r = abs(p.y)
    return r * math.cos(p.theta), r * math.sin(p.theta)


def cone_distance(p1: ConePoint, p2: ConePoint) -> float:
    """Cone metric: chordal distance on each nappe, through the vertex across.

    Points with equal-sign radial parts are compared by the Euclidean
    distance of their polar embeddings (radius |y|); opposite signs add the
    two vertex distances.  ``d(p, vertex) = |y|``.
    """
    if p1.y * p2.y < 0.0:
        return abs(p1.y) + abs(p2.y)
    x1, y1 = _embed(p1)
    x2, y2 = _embed(p2)
    return math.hypot(x1 - x2, y1 - y2)
