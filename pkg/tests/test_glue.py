import math

import numpy as np
import pytest

import frictionlab as fl
from frictionlab.glue import VERTEX, ConePoint, cone_distance


def test_project_1d_values():
    assert fl.project_1d(0.3) == 0.0
    assert fl.project_1d(1.7) == pytest.approx(0.7)
    assert fl.project_1d(-2.5) == pytest.approx(-1.5)
    assert fl.project_1d(1.0) == 0.0 and fl.project_1d(-1.0) == 0.0


def test_project_1d_domain_guard():
    with pytest.raises(ValueError):
        fl.project_1d(3.5, a=-2.0, b=2.0)
    with pytest.raises(ValueError):
        fl.project_1d(-3.5, a=-2.0, b=2.0)


def test_project_2d_values():
    assert fl.project_2d(1.0, 0.5) == VERTEX
    assert fl.project_2d(1.0, 1.5) == ConePoint(1.0, 0.5)
    for theta in (0.0, 2.0, 5.0):
        assert fl.project_2d(theta, -1.0) == VERTEX
    assert fl.project_2d(0.5, -2.2) == ConePoint(0.5, -1.2)


def test_cone_point_normalization_and_equality():
    p = ConePoint(2 * math.pi + 0.25, 0.7)
    assert p.theta == pytest.approx(0.25)
    assert ConePoint(3.0, 0.0) == VERTEX
    assert ConePoint(0.1, 0.5) != ConePoint(0.1, -0.5)


def test_cone_distance_examples():
    for theta in (0.0, 1.0, 4.0):
        assert cone_distance(ConePoint(theta, 0.8), VERTEX) == pytest.approx(0.8)
        assert cone_distance(ConePoint(theta, -0.8), VERTEX) == pytest.approx(0.8)
    assert cone_distance(ConePoint(0.0, 1.0), ConePoint(math.pi, 1.0)) == pytest.approx(2.0)
    assert cone_distance(ConePoint(0.0, 0.5), ConePoint(0.0, -0.5)) == pytest.approx(1.0)


def test_triangle_inequality_random():
    rng = np.random.default_rng(8)
    for _ in range(10_000):
        pts = [ConePoint(t, y) for t, y in zip(rng.uniform(0, 2 * math.pi, 3),
                                               rng.uniform(-2.0, 2.0, 3))]
        d01 = cone_distance(pts[0], pts[1])
        d12 = cone_distance(pts[1], pts[2])
        d02 = cone_distance(pts[0], pts[2])
        assert d02 <= d01 + d12 + 1e-12


def test_projection_lipschitz():
    rng = np.random.default_rng(9)
    q1 = rng.uniform(-3.0, 3.0, 5_000)
    q2 = rng.uniform(-3.0, 3.0, 5_000)
    lhs = np.abs(fl.project_1d(q1) - fl.project_1d(q2))
    assert np.all(lhs <= np.abs(q1 - q2) + 1e-12)
