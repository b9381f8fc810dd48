import warnings

import pytest

import frictionlab as fl

warnings.filterwarnings("ignore", message=".*TBB.*")


@pytest.fixture(scope="session")
def quadratic():
    return fl.quadratic_profile()


@pytest.fixture(scope="session")
def quartic():
    return fl.quartic_profile()


@pytest.fixture(scope="session")
def asymmetric():
    return fl.asymmetric_profile()


@pytest.fixture(scope="session")
def ev01(quadratic):
    """Quadratic-profile scale evaluator at eps = 0.1."""
    return fl.ScaleEvaluator(quadratic, 0.1)


@pytest.fixture(scope="session")
def ps_quadratic(quadratic):
    return fl.ProjectedScale(quadratic)
