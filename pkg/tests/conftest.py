import numpy as np
import pytest
from hypothesis import settings

from rcm.uncertainty import ClassMoments, Dataset, Direct, Ellipsoid

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def instance_a():
    X = np.array([[1.0, 0.0], [2.0, 1.0], [-1.0, 0.0], [-2.0, 1.0]])
    return Dataset(X, [1, 1, -1, -1])


@pytest.fixture
def overlap_1d():
    return Dataset(np.array([[3.0], [-1.0], [-3.0], [1.0]]), [1, 1, -1, -1])


@pytest.fixture
def ball():
    # difference set: ball of radius 1 around (0.5, 0)
    return Direct(Ellipsoid(np.array([0.5, 0.0]), np.eye(2), 1.0))


def symmetric_moments(var, gap=1.0):
    return (ClassMoments.from_cov([gap, 0.0], var * np.eye(2)),
            ClassMoments.from_cov([-gap, 0.0], var * np.eye(2)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
