"""Event-queue replay of the fault-free Mod-SMaRt message pattern.

This is a cross-check for the closed-form estimator, not part of ranking.
It deliberately works message by message with a priority queue so that
agreement with the order-statistic formulas means something.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from .core import ClientSet, Deployment, ProtocolParams, RttMatrix, link_delay
from .estimator import UnsupportedVariantError

REQUEST = "request-arrive"
PROPOSE = "propose-arrive"
WRITE = "write-arrive"
ACCEPT = "accept-arrive"
RESPONSE = "response-arrive"


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    src: int
    dst: int


def run(x: Deployment, clients: ClientSet, m: RttMatrix, p: ProtocolParams):
    """Simulate one request; return (latency, processed events in time order)."""
    if x.is_leaderless:
        raise UnsupportedVariantError("the oracle only models leader-based deployments")
    replicas = x.replicas
    leader = x.leader
    q = p.quorum
    total = clients.total

    queue: list = []
    seq = itertools.count()

    def send(t, kind, src, dst):
        heapq.heappush(queue, (t + link_delay(m, src, dst), next(seq), kind, src, dst))

    # Requests reach every replica, but only the leader acts on one in the
    # fault-free case; its arrival is the client-averaged request time.
    arrival = sum(count * link_delay(m, c, leader) for c, count in clients.entries) / total
    heapq.heappush(queue, (arrival, next(seq), REQUEST, leader, leader))

    writes = dict.fromkeys(replicas, 0)
    accepts = dict.fromkeys(replicas, 0)
    responses = dict.fromkeys(clients.sites, 0)
    done: dict[int, float] = {}
    log = []

    while queue:
        t, _, kind, src, dst = heapq.heappop(queue)
        log.append(SimEvent(t, kind, src, dst))
        if kind == REQUEST:
            for r in replicas:
                send(t, PROPOSE, leader, r)
        elif kind == PROPOSE:
            for r in replicas:
                send(t, WRITE, dst, r)
        elif kind == WRITE:
            writes[dst] += 1
            if writes[dst] == q:
                for r in replicas:
                    send(t, ACCEPT, dst, r)
        elif kind == ACCEPT:
            accepts[dst] += 1
            if accepts[dst] == q:
                for c in responses:
                    send(t, RESPONSE, dst, c)
        elif kind == RESPONSE:
            # clients can share a site with a replica; responses are keyed by client site
            responses[dst] += 1
            if responses[dst] == p.f + 1:
                done[dst] = t

    latency = sum(count * done[c] for c, count in clients.entries) / total
    return latency, log


def simulate(x: Deployment, clients: ClientSet, m: RttMatrix, p: ProtocolParams) -> float:
    return run(x, clients, m, p)[0]
