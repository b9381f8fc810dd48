import math

import numpy as np
import pytest

import frictionlab as fl
from frictionlab.oracle import (
    AccuracyError,
    DegenerateIntervalError,
    InconsistentDataError,
    ScheduleError,
    laplace_exit_time,
    resolvent_mode_solve,
)


# -- exit probability --------------------------------------------------------

def test_exit_probability_symmetric(ev01):
    assert fl.exit_probability(ev01, 0.0, -1.2, 1.2) == pytest.approx(0.5, abs=1e-14)


def test_exit_probability_value(ev01):
    expect = (0.05 + 8.0 / 3.0 + 0.3) / (2 * (8.0 / 3.0 + 0.3))
    assert fl.exit_probability(ev01, 0.5, -3.0, 3.0) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.508427, abs=5e-7)


def test_exit_probability_asymmetric_limit(asymmetric):
    ev0 = fl.ScaleEvaluator(asymmetric, 0.0)
    for d in (0.1, 0.3):
        p = fl.exit_probability(ev0, 0.0, -1.0 - d, 1.0 + d)
        assert p == pytest.approx(0.8, rel=1e-12)


def test_exit_probability_monotone_and_ends(ev01):
    qs = np.linspace(-1.2, 1.2, 9)
    ps = [fl.exit_probability(ev01, q, -1.2, 1.2) for q in qs]
    assert all(a < b for a, b in zip(ps, ps[1:]))
    assert ps[0] == 0.0 and ps[-1] == 1.0


def test_exit_probability_degenerate(quadratic):
    ev0 = fl.ScaleEvaluator(quadratic, 0.0)
    with pytest.raises(DegenerateIntervalError):
        fl.exit_probability(ev0, 0.0, -0.5, 0.5)


# -- expected exit time ------------------------------------------------------

def test_expected_exit_time_flat(quadratic):
    for eps in (0.1, 0.02):
        ev = fl.ScaleEvaluator(quadratic, eps)
        assert fl.expected_exit_time(ev, 0.0, -1.0, 1.0) == pytest.approx(eps**2, rel=1e-7)


def test_expected_exit_time_at_boundary(ev01):
    assert fl.expected_exit_time(ev01, -3.0, -3.0, 3.0) == 0.0


def test_expected_exit_time_matches_scale_product(ev01):
    # independent closed form for the driftless case: (u(q)-u(lo)) (u(hi)-u(q))
    rng = np.random.default_rng(50)
    for _ in range(25):
        lo, hi = np.sort(rng.uniform(-3.0, 3.0, 2))
        if hi - lo < 0.3:
            continue
        q = rng.uniform(lo, hi)
        u_lo, u_hi, u_q = (float(ev01.u(v)) for v in (lo, hi, q))
        expect = (u_q - u_lo) * (u_hi - u_q)
        assert fl.expected_exit_time(ev01, q, lo, hi) == pytest.approx(expect, rel=1e-6)


def test_expected_exit_time_product_bound(ev01):
    rng = np.random.default_rng(51)
    for _ in range(100):
        lo, hi = np.sort(rng.uniform(-3.0, 3.0, 2))
        if hi - lo < 0.2:
            continue
        q = rng.uniform(lo, hi)
        val = fl.expected_exit_time(ev01, q, lo, hi)
        bound = (float(ev01.u(hi)) - float(ev01.u(lo))) * (float(ev01.v(hi)) - float(ev01.v(lo)))
        assert val <= bound + 1e-12


def test_expected_exit_time_drift_case_cross_route(quadratic):
    # with drift the product form no longer applies; check the Green
    # quadrature against the small-lambda limit of the Laplace BVP
    p = fl.with_constant_drift(quadratic, 0.7)
    ev = fl.ScaleEvaluator(p, 0.2)
    green = fl.expected_exit_time(ev, 0.3, -1.5, 1.5)
    lam = 1e-6
    bvp = (1.0 - fl.laplace_exit_time(ev, lam, 0.3, -1.5, 1.5)) / lam
    assert green == pytest.approx(bvp, rel=2e-4)


def test_green_kernel_symmetry(ev01):
    rng = np.random.default_rng(52)
    lo, hi = -2.0, 2.5
    u_lo, u_hi = float(ev01.u(lo)), float(ev01.u(hi))

    def green(q, r):
        uq, ur = float(ev01.u(q)), float(ev01.u(r))
        lo_, hi_ = min(uq, ur), max(uq, ur)
        return (lo_ - u_lo) * (u_hi - hi_) / (u_hi - u_lo)

    for _ in range(50):
        q, r = rng.uniform(lo, hi, 2)
        assert green(q, r) == pytest.approx(green(r, q), rel=1e-12)


# -- Laplace transform -------------------------------------------------------

def test_laplace_flat_closed_form(quadratic):
    for eps, lam in ((0.1, 1.0), (0.05, 2.0), (0.2, 0.5)):
        ev = fl.ScaleEvaluator(quadratic, eps)
        got = laplace_exit_time(ev, lam, 0.0, -1.0, 1.0)
        assert got == pytest.approx(1.0 / math.cosh(eps * math.sqrt(2 * lam)), abs=5e-11)


def test_laplace_flat_value_at_tenth(quadratic):
    ev = fl.ScaleEvaluator(quadratic, 0.1)
    # frozen from the closed form 1/cosh(0.1 sqrt(2))
    assert laplace_exit_time(ev, 1.0, 0.0, -1.0, 1.0) == pytest.approx(0.9900826610073943, abs=1e-9)


def test_laplace_cosh_ratio_full_domain(ev01):
    # driftless: M(q) = cosh(sqrt(2 lam) u(q)) / cosh(sqrt(2 lam) u(hi)) on
    # symmetric intervals; an independent closed form for the BVP route
    for lam in (0.5, 1.0, 2.0):
        c = float(ev01.u(3.0))
        for q in (0.0, 0.5, 1.3):
            expect = math.cosh(math.sqrt(2 * lam) * float(ev01.u(q))) / math.cosh(math.sqrt(2 * lam) * c)
            got = laplace_exit_time(ev01, lam, q, -3.0, 3.0)
            assert got == pytest.approx(expect, rel=1e-5, abs=5e-8)


def test_laplace_limits_and_monotonicity(ev01):
    assert laplace_exit_time(ev01, 1e-9, 0.0, -1.5, 1.5) == pytest.approx(1.0, abs=1e-6)
    vals = [laplace_exit_time(ev01, lam, 0.0, -1.5, 1.5) for lam in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(1.0 >= a > b > 0.0 for a, b in zip(vals, vals[1:]))
    assert laplace_exit_time(ev01, 1.0, -1.5, -1.5, 1.5) == 1.0


def test_laplace_accuracy_guard(ev01):
    with pytest.raises(AccuracyError):
        laplace_exit_time(ev01, 2.0, 0.0, -3.0, 3.0, n_cells=8)


# -- resolvent modes ---------------------------------------------------------

def test_resolvent_constant_mode(ps_quadratic):
    sol = resolvent_mode_solve(ps_quadratic, 0, 1.0, lambda y: 1.0)
    assert np.max(np.abs(sol.values - 1.0)) < 1e-11
    assert sol.residual_norm < 1e-6


def test_resolvent_zero_data(ps_quadratic):
    sol = resolvent_mode_solve(ps_quadratic, 1, 1.0, lambda y: 0.0)
    assert np.max(np.abs(sol.values)) == 0.0


def test_resolvent_residual_and_bounds(ps_quadratic):
    sol = resolvent_mode_solve(ps_quadratic, 1, 1.0, lambda y: y)
    assert sol.residual_norm <= 1e-6
    assert np.max(np.abs(sol.values)) <= 2.0 + 1e-9  # <= ||G||/lam = 2
    # glued point value and outer boundary data
    mid = np.argmin(np.abs(sol.grid))
    assert sol.values[mid] == 0.0
    assert sol.values[-1] == pytest.approx(sol.grid[-1] / 1.0, rel=1e-12)
    assert sol.values[0] == pytest.approx(sol.grid[0] / 1.0, rel=1e-12)


def test_resolvent_wronskian_constancy(ps_quadratic):
    for n in (1, 2, 5):
        sol = resolvent_mode_solve(ps_quadratic, n, 1.0, lambda y: y)
        for w in (sol.wronskian_pos, sol.wronskian_neg):
            spread = (w.max() - w.min()) / abs(np.median(w))
            assert spread < 1e-6, f"mode {n}: wronskian spread {spread}"


def test_resolvent_maximum_principle_random_data(ps_quadratic):
    rng = np.random.default_rng(53)
    for _ in range(20):
        lam = float(rng.uniform(0.3, 3.0))
        n = int(rng.integers(0, 3))
        c = rng.standard_normal(3)

        def G(y, c=c):
            # every term vanishes at 0, so the data suits any mode
            return c[0] * np.sin(2.1 * y) + c[1] * y + c[2] * y**2

        sol = resolvent_mode_solve(ps_quadratic, n, lam, G, n_cells=1024)
        g_max = float(np.max(np.abs(sol.values)))
        G_max = float(np.max(np.abs([G(y) for y in sol.grid])))
        assert g_max <= G_max / lam + 1e-9


def test_resolvent_requires_compatible_data(ps_quadratic):
    with pytest.raises(InconsistentDataError):
        resolvent_mode_solve(ps_quadratic, 1, 1.0, lambda y: 1.0)


def test_resolvent_grid_refinement_stability(ps_quadratic):
    a = resolvent_mode_solve(ps_quadratic, 1, 1.0, lambda y: y, n_cells=2048)
    b = resolvent_mode_solve(ps_quadratic, 1, 1.0, lambda y: y, n_cells=4096)
    vb = np.interp(a.grid, b.grid, b.values)
    assert np.max(np.abs(vb - a.values)) < 5e-4


# -- mixing bounds and schedule ---------------------------------------------

def test_mixing_bounds_example(ps_quadratic):
    mb = fl.mixing_bounds(ps_quadratic, 0.01, 0.2, 0.02, 0.1, 5)
    expect = 1.0 - (0.02**3 / 3 + 0.01 * 0.02) / (0.2**3 / 3 + 0.01 * 0.2)
    assert mb.p_alpha == pytest.approx(expect, rel=1e-12)
    assert mb.p_alpha == pytest.approx(0.95657, abs=5e-6)


def test_mixing_bounds_eps_zero_beta(ps_quadratic):
    mb = fl.mixing_bounds(ps_quadratic, 0.0, 0.2, 0.02, 0.1, 5)
    assert mb.p_beta == 1.0 and mb.p_count == 1.0


def test_omega_small_eps_limit(ps_quadratic):
    mb = fl.mixing_bounds(ps_quadratic, 1e-12, 0.1, 0.01, 0.05, 8)
    assert mb.omega == pytest.approx(4 * (0.01 / 0.1) ** 3, rel=1e-6)
    assert mb.omega == pytest.approx(0.004, rel=1e-6)


def test_mixing_bounds_monotonicity(ps_quadratic):
    mb1 = fl.mixing_bounds(ps_quadratic, 0.01, 0.2, 0.02, 0.1, 5)
    mb2 = fl.mixing_bounds(ps_quadratic, 0.01, 0.2, 0.005, 0.1, 5)
    assert mb2.p_alpha > mb1.p_alpha
    om1 = fl.mixing_bounds(ps_quadratic, 0.01, 0.2, 0.02, 0.1, 5).omega
    om2 = fl.mixing_bounds(ps_quadratic, 0.001, 0.2, 0.02, 0.1, 5).omega
    assert om2 < om1


def test_schedule_values(ps_quadratic):
    s = fl.schedule(ps_quadratic, 1e-6)
    assert s.M == 14
    assert s.ok_324 and s.ok_325
    assert s.delta == pytest.approx(1.0 / math.log(math.log(1e6)), rel=1e-12)
    assert s.delta_prime == pytest.approx(s.delta**2, rel=1e-12)


def test_schedule_errors(ps_quadratic):
    with pytest.raises(ScheduleError):
        fl.schedule(ps_quadratic, 1.0)
    with pytest.raises(ScheduleError):
        fl.schedule(ps_quadratic, 0.3)  # degenerate ladder
    with pytest.raises(ScheduleError):
        fl.schedule(ps_quadratic, 1e-2)  # re-entry constraint fails at desk eps
    s = fl.schedule(ps_quadratic, 1e-2, enforce=False)
    assert s.M == 5 and not s.ok_325 and s.ok_324
