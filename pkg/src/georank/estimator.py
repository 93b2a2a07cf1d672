"""Latency estimates for Mod-SMaRt deployments from one-way link delays.

Two estimators are provided:

* ``estimate_detailed`` traces Request -> Propose -> Write -> Accept ->
  Response, taking quorum order statistics at every step.
* ``estimate_simple`` is the coarse baseline: request leg, plus the sum of
  delays over every replica pair, plus the mean response leg.

Both work on batches of deployments at once (``detailed_latencies`` and
``simple_latencies``); the single-deployment functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DETAILED,
    PAPER_LITERAL,
    SIMPLE,
    ClientSet,
    Deployment,
    ProtocolParams,
    RttMatrix,
    UsageError,
)


class UnsupportedVariantError(UsageError):
    pass


@dataclass(frozen=True)
class PhaseTimings:
    s_req: float
    s_pro: tuple[float, ...]
    s_wrt: tuple[float, ...]
    s_acc: tuple[float, ...]
    s_res_per_client: dict[int, float]
    latency: float

    def to_json(self, catalog=None) -> dict:
        out = asdict(self)
        if catalog is not None:
            out["s_res_per_client"] = {
                catalog.name_of(c): t for c, t in self.s_res_per_client.items()
            }
        else:
            out["s_res_per_client"] = {str(c): t for c, t in self.s_res_per_client.items()}
        return out


def kth_smallest(values: Iterable[float], k: int) -> float:
    """k-th order statistic (1-based), duplicates counted with multiplicity."""
    xs = sorted(values)
    if not 1 <= k <= len(xs):
        raise UsageError(f"k={k} outside 1..{len(xs)}")
    return xs[k - 1]


def _replica_array(deployments: Sequence[Deployment]) -> np.ndarray:
    if not deployments:
        return np.zeros((0, 0), dtype=np.intp)
    if any(d.is_leaderless for d in deployments):
        raise UnsupportedVariantError("leaderless deployments have no latency model")
    n = deployments[0].n
    if any(d.n != n for d in deployments):
        raise UsageError("all deployments in a batch must have the same n")
    return np.array([d.replicas for d in deployments], dtype=np.intp)


def _client_arrays(clients: ClientSet) -> tuple[np.ndarray, np.ndarray, float]:
    sites = np.array(clients.sites, dtype=np.intp)
    weights = np.array([c for _, c in clients.entries], dtype=np.float64)
    return sites, weights, float(clients.total)


def _request_time(delays, leaders, sites, weights, total):
    # (B,) client-weighted mean of client -> leader delay
    return (delays[np.ix_(leaders, sites)] * weights).sum(axis=1) / total


def _detailed(delays, R, clients, params, *, keep_trace=False):
    q = params.quorum
    sites, weights, total = _client_arrays(clients)
    s_req = _request_time(delays, R[:, 0], sites, weights, total)
    # among[b, j, i] = delay(r_j, r_i) within deployment b
    among = delays[R[:, :, None], R[:, None, :]]
    s_pro = s_req[:, None] + among[:, 0, :]
    s_wrt = np.sort(s_pro[:, :, None] + among, axis=1)[:, q - 1, :]
    if params.accept_timing == PAPER_LITERAL:
        s_acc = s_wrt + np.sort(among, axis=1)[:, q - 1, :]
    else:
        s_acc = np.sort(s_wrt[:, :, None] + among, axis=1)[:, q - 1, :]
    # to_client[b, i, c] = delay(r_i, client c)
    to_client = delays[R[:, :, None], sites[None, None, :]]
    per_client = np.sort(s_acc[:, :, None] + to_client, axis=1)[:, params.f, :]
    latency = (per_client * weights).sum(axis=1) / total
    if keep_trace:
        return latency, (s_req, s_pro, s_wrt, s_acc, per_client)
    return latency


def detailed_latencies(
    deployments: Sequence[Deployment], clients: ClientSet, m: RttMatrix, p: ProtocolParams
) -> np.ndarray:
    R = _replica_array(deployments)
    if R.size == 0:
        return np.zeros(0)
    return _detailed(m.delays(), R, clients, p)


def simple_latencies(
    deployments: Sequence[Deployment], clients: ClientSet, m: RttMatrix
) -> np.ndarray:
    R = _replica_array(deployments)
    if R.size == 0:
        return np.zeros(0)
    return _simple(m.delays(), R, clients)


def _simple(delays, R, clients):
    n = R.shape[1]
    sites, weights, total = _client_arrays(clients)
    s_req = _request_time(delays, R[:, 0], sites, weights, total)
    iu, ju = np.triu_indices(n, 1)
    s_con = delays[R[:, iu], R[:, ju]].sum(axis=1)
    to_client = delays[R[:, :, None], sites[None, None, :]]
    s_res = (to_client * weights).sum(axis=(1, 2)) / (n * total)
    return s_req + s_con + s_res


def estimate_detailed(
    x: Deployment, clients: ClientSet, m: RttMatrix, p: ProtocolParams
) -> tuple[float, PhaseTimings]:
    """Estimated client latency of one deployment, with its phase trace."""
    R = _replica_array([x])
    latency, (s_req, s_pro, s_wrt, s_acc, per_client) = _detailed(
        m.delays(), R, clients, p, keep_trace=True
    )
    trace = PhaseTimings(
        s_req=float(s_req[0]),
        s_pro=tuple(float(v) for v in s_pro[0]),
        s_wrt=tuple(float(v) for v in s_wrt[0]),
        s_acc=tuple(float(v) for v in s_acc[0]),
        s_res_per_client={c: float(t) for c, t in zip(clients.sites, per_client[0])},
        latency=float(latency[0]),
    )
    return trace.latency, trace


def estimate_simple(x: Deployment, clients: ClientSet, m: RttMatrix) -> float:
    return float(simple_latencies([x], clients, m)[0])


def estimate(x: Deployment, clients: ClientSet, m: RttMatrix, p: ProtocolParams) -> float:
    if p.variant == SIMPLE:
        return estimate_simple(x, clients, m)
    if p.variant == DETAILED:
        return estimate_detailed(x, clients, m, p)[0]
    raise UnsupportedVariantError(f"unknown estimator variant {p.variant!r}")


def latencies(
    deployments: Sequence[Deployment], clients: ClientSet, m: RttMatrix, p: ProtocolParams
) -> np.ndarray:
    """Batch form of :func:`estimate` for deployments sharing the same n."""
    if p.variant == SIMPLE:
        return simple_latencies(deployments, clients, m)
    if p.variant == DETAILED:
        return detailed_latencies(deployments, clients, m, p)
    raise UnsupportedVariantError(f"unknown estimator variant {p.variant!r}")
