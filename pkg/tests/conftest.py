import numpy as np
import pytest

from georank.core import RttMatrix, SiteCatalog


def random_matrix(rng, size, low=1.0, high=300.0):
    upper = np.triu(rng.uniform(low, high, size=(size, size)), 1)
    return RttMatrix(upper + upper.T)


def uniform_matrix(size, d):
    return RttMatrix(np.full((size, size), float(d)) - np.eye(size) * d)


def metric_matrix(rng, size):
    """RTTs proportional to Euclidean distance, so the triangle inequality holds."""
    pts = rng.uniform(0, 100, size=(size, 2))
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    return RttMatrix(dist + 1.0 - np.eye(size))


def catalog(size):
    return SiteCatalog(f"s{i}" for i in range(size))


@pytest.fixture
def rng():
    return np.random.default_rng(20190415)


_acceptance = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    prev = _acceptance.get(number, (title, True))
    _acceptance[number] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, passed = _acceptance[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
