import numpy as np
import pytest

import frictionlab as fl
from frictionlab.profiles import FrictionProfile, InvalidProfileError


def test_builtin_profiles_pass_validation(quadratic, quartic, asymmetric):
    for p in (quadratic, quartic, asymmetric):
        rep = fl.validate_profile(p, 10_000)
        assert rep.all_passed, [c for c in rep.checks if not c.passed]


def test_zero_profile_fails_positivity():
    p = FrictionProfile(lam=lambda q: np.zeros_like(np.asarray(q, dtype=float)),
                        lam_prime=lambda q: np.zeros_like(np.asarray(q, dtype=float)),
                        a=-2.0, b=2.0)
    rep = fl.validate_profile(p, 2_000)
    failed = {c.name for c in rep.checks if not c.passed}
    assert "positivity outside band" in failed


def test_kinked_profile_fails_derivative_continuity():
    # lam = (|q| - 1)_+ has slope 1 just outside the band edges
    def lam(q):
        q = np.asarray(q, dtype=float)
        return np.maximum(np.abs(q) - 1.0, 0.0)

    def lam_prime(q):
        q = np.asarray(q, dtype=float)
        return np.where(np.abs(q) > 1.0, np.sign(q), 0.0)

    rep = fl.validate_profile(FrictionProfile(lam=lam, lam_prime=lam_prime, a=-2.0, b=2.0), 2_000)
    failed = {c.name for c in rep.checks if not c.passed}
    assert "lam' continuity" in failed


def test_nonfinite_profile_raises():
    def lam(q):
        q = np.asarray(q, dtype=float)
        return np.where(q > 2.5, np.inf, 0.0)

    p = FrictionProfile(lam=lam, lam_prime=lambda q: np.zeros_like(np.asarray(q, float)),
                        a=-2.0, b=2.0)
    with pytest.raises(InvalidProfileError):
        fl.validate_profile(p, 500)


def test_validate_grid_size_guard(quadratic):
    with pytest.raises(ValueError):
        fl.validate_profile(quadratic, 1)


def test_coefficients_flat_region(quadratic):
    c = fl.coefficients(quadratic, 0.1, 0.0)
    assert c.drift == 0.0
    assert c.noise == pytest.approx(10.0)


def test_coefficients_outside_band(quadratic):
    c = fl.coefficients(quadratic, 0.1, 1.5)
    assert c.drift == pytest.approx(-1.0 / (2 * 0.35**3), rel=1e-12)
    assert c.noise == pytest.approx(1.0 / 0.35, rel=1e-12)


def test_coefficients_with_constant_drift(quadratic):
    p = fl.with_constant_drift(quadratic, 1.0)
    c = fl.coefficients(p, 0.1, 0.0)
    assert c.drift == pytest.approx(10.0)
    assert c.noise == pytest.approx(10.0)


def test_coefficients_domain_and_eps_guards(quadratic):
    with pytest.raises(ValueError):
        fl.coefficients(quadratic, 0.0, 0.0)
    with pytest.raises(ValueError):
        fl.coefficients(quadratic, 0.1, 5.0)


def test_noise_inverts_friction_everywhere(quadratic, quartic, asymmetric):
    rng = np.random.default_rng(1)
    for p in (quadratic, quartic, asymmetric):
        for q in rng.uniform(p.q_min, p.q_max, 200):
            c = fl.coefficients(p, 0.07, q)
            assert c.noise * (float(p.lam(q)) + 0.07) == pytest.approx(1.0, rel=1e-14)


def test_drift_is_ito_correction_when_driftless(quadratic, quartic):
    rng = np.random.default_rng(2)
    for p in (quadratic, quartic):
        for q in rng.uniform(p.q_min, p.q_max, 200):
            c = fl.coefficients(p, 0.05, q)
            assert c.drift == pytest.approx(-0.5 * c.noise**3 * float(p.lam_prime(q)), abs=1e-10)


def test_symmetric_profile_parity(quadratic):
    rng = np.random.default_rng(3)
    for q in rng.uniform(0.0, 3.0, 100):
        cp = fl.coefficients(quadratic, 0.1, q)
        cm = fl.coefficients(quadratic, 0.1, -q)
        assert cm.drift == pytest.approx(-cp.drift, abs=1e-12)
        assert cm.noise == pytest.approx(cp.noise, rel=1e-14)


def test_make_profile_registry():
    p = fl.make_profile("asymmetric", bottom_factor=2.0)
    assert p.kernel_param == 2.0
    with pytest.raises(KeyError):
        fl.make_profile("nope")


def test_divergence_flag_set_for_builtins(quadratic, quartic, asymmetric):
    assert quadratic.divergence_flag and quartic.divergence_flag and asymmetric.divergence_flag
