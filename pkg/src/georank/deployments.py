"""Candidate deployment space: counting, streaming, and random access by index.

Order is fixed: ascending leader id, then follower combinations in
lexicographic order. Leaderless spaces list plain combinations of n sites.
Any index range of the stream can be produced independently, which is what
lets the ranker split the work across processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from .core import Deployment, SiteCatalog, UsageError

LEADER_BASED = "leader-based"
LEADERLESS = "leaderless"


@dataclass(frozen=True)
class DeploymentSpace:
    catalog: SiteCatalog
    allowed: tuple[int, ...]
    n: int
    mode: str = LEADER_BASED

    def __post_init__(self):
        allowed = tuple(sorted(set(int(s) for s in self.allowed)))
        object.__setattr__(self, "allowed", allowed)
        problems = []
        if self.mode not in (LEADER_BASED, LEADERLESS):
            problems.append(f"unknown mode {self.mode!r}")
        if self.n < 1:
            problems.append(f"n={self.n} must be >= 1")
        if len(allowed) < self.n:
            problems.append(f"only {len(allowed)} candidate sites for n={self.n} replicas")
        bad = [s for s in allowed if not 0 <= s < len(self.catalog)]
        if bad:
            problems.append(f"candidate sites {bad} are not in the catalog")
        if problems:
            raise UsageError("; ".join(problems))

    @classmethod
    def full(cls, catalog: SiteCatalog, n: int, mode: str = LEADER_BASED) -> "DeploymentSpace":
        return cls(catalog, tuple(range(len(catalog))), n, mode)

    @property
    def leaderless(self) -> bool:
        return self.mode == LEADERLESS

    def _per_leader(self) -> int:
        return comb(len(self.allowed) - 1, self.n - 1)


def count(space: DeploymentSpace) -> int:
    """|SC| * C(|SC|-1, n-1) for leader-based spaces, C(|SC|, n) for leaderless."""
    m = len(space.allowed)
    if space.leaderless:
        return comb(m, space.n)
    return m * comb(m - 1, space.n - 1)


def _unrank_combination(m: int, k: int, rank: int) -> list[int]:
    """Positions (into a pool of m) of the ``rank``-th k-combination in lex order."""
    out = []
    c = 0
    for i in range(k):
        while True:
            block = comb(m - 1 - c, k - 1 - i)
            if rank < block:
                break
            rank -= block
            c += 1
        out.append(c)
        c += 1
    return out


def _rank_combination(m: int, positions: list[int]) -> int:
    k = len(positions)
    rank = 0
    prev = -1
    for i, p in enumerate(positions):
        for c in range(prev + 1, p):
            rank += comb(m - 1 - c, k - 1 - i)
        prev = p
    return rank


def _next_combination(pos: list[int], m: int) -> bool:
    """Advance ``pos`` in place to its lexicographic successor; False when exhausted."""
    k = len(pos)
    i = k - 1
    while i >= 0 and pos[i] == m - k + i:
        i -= 1
    if i < 0:
        return False
    pos[i] += 1
    for j in range(i + 1, k):
        pos[j] = pos[j - 1] + 1
    return True


def deployment_at(space: DeploymentSpace, index: int) -> Deployment:
    """The ``index``-th deployment of the canonical stream."""
    total = count(space)
    if not 0 <= index < total:
        raise UsageError(f"index {index} outside [0, {total})")
    pool = space.allowed
    if space.leaderless:
        pos = _unrank_combination(len(pool), space.n, index)
        return Deployment.leaderless(pool[p] for p in pos)
    li, rest = divmod(index, space._per_leader())
    others = pool[:li] + pool[li + 1 :]
    pos = _unrank_combination(len(others), space.n - 1, rest)
    return Deployment.leader_based(pool[li], (others[p] for p in pos))


def index_of(space: DeploymentSpace, d: Deployment) -> int:
    """Inverse of :func:`deployment_at`."""
    pool = space.allowed
    where = {s: i for i, s in enumerate(pool)}
    try:
        if space.leaderless:
            return _rank_combination(len(pool), [where[s] for s in d.followers])
        li = where[d.leader]
        others = pool[:li] + pool[li + 1 :]
        owhere = {s: i for i, s in enumerate(others)}
        rest = _rank_combination(len(others), [owhere[s] for s in d.followers])
    except KeyError:
        raise UsageError(f"{d} is not in this deployment space") from None
    return li * space._per_leader() + rest


def enumerate_deployments(
    space: DeploymentSpace, start: int = 0, stop: int | None = None
) -> Iterator[Deployment]:
    """Stream deployments ``start <= index < stop`` in canonical order."""
    total = count(space)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    pool = space.allowed
    m = len(pool)
    remaining = stop - start

    if space.leaderless:
        pos = _unrank_combination(m, space.n, start)
        while remaining:
            yield Deployment(None, tuple(pool[p] for p in pos))
            remaining -= 1
            _next_combination(pos, m)
        return

    li, rest = divmod(start, space._per_leader())
    k = space.n - 1
    while remaining:
        leader = pool[li]
        others = pool[:li] + pool[li + 1 :]
        pos = _unrank_combination(m - 1, k, rest)
        while remaining:
            yield Deployment(leader, tuple(others[p] for p in pos))
            remaining -= 1
            if not _next_combination(pos, m - 1):
                break
        li += 1
        rest = 0


def chunks(space: DeploymentSpace, size: int) -> list[tuple[int, int]]:
    """Split the stream into consecutive ``[start, stop)`` index ranges."""
    total = count(space)
    return [(s, min(s + size, total)) for s in range(0, total, max(1, size))]
