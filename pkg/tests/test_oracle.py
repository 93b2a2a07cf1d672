import numpy as np
import pytest

from georank.core import ClientSet, Deployment, ProtocolParams, RttMatrix
from georank.oracle import ACCEPT, PROPOSE, REQUEST, RESPONSE, WRITE, run, simulate

from conftest import random_matrix, uniform_matrix


@pytest.mark.parametrize("d", [1.0, 10.0, 100.0])
def test_symmetric_case(d):
    x = Deployment.leader_based(0, [1, 2, 3])
    assert simulate(x, ClientSet.of(0), uniform_matrix(4, d), ProtocolParams()) == 2 * d


def test_zero_delays():
    x = Deployment.leader_based(0, [1, 2, 3])
    m = RttMatrix(np.zeros((4, 4)), checked=False)
    assert simulate(x, ClientSet.of(2), m, ProtocolParams()) == 0


@pytest.mark.parametrize("n,f", [(4, 1), (7, 2)])
def test_event_counts(rng, n, f):
    m = random_matrix(rng, n + 3)
    x = Deployment.leader_based(n, range(n - 1))
    clients = ClientSet(((0, 10), (n + 1, 3), (n + 2, 5)))
    _, log = run(x, clients, m, ProtocolParams(n=n, f=f))
    kinds = [e.kind for e in log]
    assert kinds.count(REQUEST) == 1
    assert kinds.count(PROPOSE) == n
    assert kinds.count(WRITE) == n * n
    assert kinds.count(ACCEPT) == n * n
    assert kinds.count(RESPONSE) == n * 3
    assert len(log) == 1 + n + 2 * n * n + 3 * n
    times = [e.time for e in log]
    assert times == sorted(times) and times[0] >= 0


def test_deterministic(rng):
    m = random_matrix(rng, 6)
    x = Deployment.leader_based(2, [0, 4, 5])
    clients = ClientSet(((1, 2), (3, 1)))
    assert run(x, clients, m, ProtocolParams()) == run(x, clients, m, ProtocolParams())
