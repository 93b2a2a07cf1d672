"""Domain types shared by every stage of the planner.

All types are immutable once built, so a single instance can be handed to
any number of worker processes or threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BFT = "bft"
CFT = "cft"

DETAILED = "mod-smart-detailed"
SIMPLE = "mod-smart-simple"
VARIANTS = (DETAILED, SIMPLE)

SENDER_BASED = "sender-based"
PAPER_LITERAL = "paper-literal"
ACCEPT_TIMINGS = (SENDER_BASED, PAPER_LITERAL)


class UsageError(ValueError):
    """Raised when a function is called outside its domain (bad index, bad k)."""


class ValidationError(ValueError):
    """Carries every problem found in a set of inputs, not just the first."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Site:
    id: int
    name: str


class SiteCatalog:
    """Ordered, name-addressable list of sites; position equals id."""

    def __init__(self, names: Iterable[str]):
        names = [str(n) for n in names]
        problems = []
        seen = set()
        for i, name in enumerate(names):
            if not name.strip():
                problems.append(f"site {i} has an empty name")
            elif name in seen:
                problems.append(f"duplicate site name {name!r}")
            seen.add(name)
        if problems:
            raise ValidationError(problems)
        self._sites = tuple(Site(i, n) for i, n in enumerate(names))
        self._by_name = {s.name: s.id for s in self._sites}

    @property
    def sites(self) -> tuple[Site, ...]:
        return self._sites

    @property
    def names(self) -> list[str]:
        return [s.name for s in self._sites]

    def __len__(self) -> int:
        return len(self._sites)

    def __iter__(self):
        return iter(self._sites)

    def __getitem__(self, i: int) -> Site:
        return self._sites[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, SiteCatalog) and self.names == other.names

    def __repr__(self) -> str:
        return f"SiteCatalog({self.names!r})"

    def id_of(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise UsageError(f"unknown site {name!r}") from None

    def name_of(self, site_id: int) -> str:
        return self._sites[site_id].name


def matrix_problems(values: np.ndarray) -> list[str]:
    """List every way ``values`` fails to be a valid RTT matrix."""
    problems = []
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        return [f"matrix must be square, got shape {values.shape}"]
    size = values.shape[0]
    for a in range(size):
        if values[a, a] != 0:
            problems.append(f"diagonal entry ({a},{a}) is {values[a, a]!r}, expected 0")
        for b in range(size):
            if a == b:
                continue
            v = values[a, b]
            if not math.isfinite(v) or v <= 0:
                problems.append(f"entry ({a},{b}) is {v!r}, expected finite and > 0")
            if b > a and values[b, a] != v:
                problems.append(
                    f"asymmetric entries ({a},{b})={v!r} and ({b},{a})={values[b, a]!r}"
                )
    return problems


class RttMatrix:
    """Square matrix of mean round-trip times in milliseconds.

    Construction rejects anything that is not symmetric with a zero diagonal
    and positive finite off-diagonal entries. ``checked=False`` skips that,
    which is only meant for degenerate test fixtures (e.g. an all-zero matrix).
    """

    def __init__(self, values, *, checked: bool = True):
        arr = np.array(values, dtype=np.float64)
        if checked:
            problems = matrix_problems(arr)
            if problems:
                raise ValidationError(problems)
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def size(self) -> int:
        return self._values.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, RttMatrix) and np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"RttMatrix(size={self.size})"

    def delays(self) -> np.ndarray:
        """One-way delay matrix, i.e. every RTT halved."""
        return self._values / 2.0

    def scaled(self, factor: float) -> "RttMatrix":
        return RttMatrix(self._values * factor, checked=False)


def link_delay(m: RttMatrix, a: int, b: int) -> float:
    """One-way message delay between two sites: half their RTT."""
    size = m.size
    if not (0 <= a < size and 0 <= b < size):
        raise UsageError(f"site index out of range for {size}-site matrix: ({a}, {b})")
    if a == b:
        return 0.0
    return float(m.values[a, b]) / 2.0


@dataclass(frozen=True)
class Deployment:
    """Replica placement: a leader site plus a sorted tuple of follower sites.

    Leaderless deployments keep ``leader=None`` and put every replica site in
    ``followers``. Use :meth:`leader_based` / :meth:`leaderless` to build
    canonical instances from unsorted input.
    """

    leader: int | None
    followers: tuple[int, ...]

    def __post_init__(self):
        sites = self.replicas
        if len(set(sites)) != len(sites):
            raise UsageError(f"deployment repeats a site: {sites}")
        if list(self.followers) != sorted(self.followers):
            raise UsageError("followers must be sorted; use Deployment.leader_based()")

    @classmethod
    def leader_based(cls, leader: int, followers: Iterable[int]) -> "Deployment":
        return cls(int(leader), tuple(sorted(int(f) for f in followers)))

    @classmethod
    def leaderless(cls, sites: Iterable[int]) -> "Deployment":
        return cls(None, tuple(sorted(int(s) for s in sites)))

    @property
    def is_leaderless(self) -> bool:
        return self.leader is None

    @property
    def replicas(self) -> tuple[int, ...]:
        """Replica sites with the leader first (r_0 is the leader)."""
        if self.leader is None:
            return self.followers
        return (self.leader,) + self.followers

    @property
    def n(self) -> int:
        return len(self.replicas)

    def sort_key(self) -> tuple:
        return (-1 if self.leader is None else self.leader, self.followers)

    def key(self, catalog: SiteCatalog) -> str:
        """Canonical text identity, ``leader|f1,f2,f3`` using site names."""
        followers = ",".join(catalog.name_of(s) for s in self.followers)
        if self.leader is None:
            return followers
        return f"{catalog.name_of(self.leader)}|{followers}"


@dataclass(frozen=True)
class ClientSet:
    """Client sites with multiplicities, e.g. 10 clients in one region, 3 in another."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((int(s), int(c)) for s, c in self.entries))

    @classmethod
    def of(cls, *sites: int) -> "ClientSet":
        """One client at each given site."""
        return cls(tuple((s, 1) for s in sites))

    @classmethod
    def parse(cls, text: str, catalog: SiteCatalog) -> "ClientSet":
        """Parse ``"Ireland:10,Sydney:3"``; a bare name means one client."""
        entries = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, count = item.rpartition(":")
            if not name:
                name, count = count, "1"
            try:
                n = int(count)
            except ValueError:
                raise UsageError(f"bad client count in {item!r}") from None
            entries.append((catalog.id_of(name.strip()), n))
        return cls(tuple(entries))

    @property
    def sites(self) -> list[int]:
        return [s for s, _ in self.entries]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def problems(self, size: int | None = None) -> list[str]:
        out = []
        if not self.entries:
            out.append("client set is empty")
        ids = [s for s, _ in self.entries]
        if len(set(ids)) != len(ids):
            out.append(f"client site ids repeat: {ids}")
        for s, c in self.entries:
            if c < 1:
                out.append(f"client count at site {s} is {c}, expected >= 1")
            if size is not None and not 0 <= s < size:
                out.append(f"client site {s} is not in the {size}-site catalog")
        return out


@dataclass(frozen=True)
class ProtocolParams:
    n: int = 4
    f: int = 1
    variant: str = DETAILED
    accept_timing: str = SENDER_BASED
    fault_model: str = BFT

    @property
    def quorum(self) -> int:
        """Write/Accept quorum, ceil((n+1)/2)."""
        return (self.n + 2) // 2

    def problems(self) -> list[str]:
        out = []
        if self.f < 1:
            out.append(f"f={self.f}, expected f >= 1")
        if self.fault_model == BFT:
            if self.n < 3 * self.f + 1:
                out.append(f"n={self.n} violates n >= 3f+1 (f={self.f}) for BFT")
        elif self.fault_model == CFT:
            if self.n < 2 * self.f + 1:
                out.append(f"n={self.n} violates n >= 2f+1 (f={self.f}) for CFT")
        else:
            out.append(f"unknown fault model {self.fault_model!r}")
        if self.f + 1 > self.n:
            out.append(f"response quorum f+1={self.f + 1} exceeds n={self.n}")
        if self.variant not in VARIANTS:
            out.append(f"unknown estimator variant {self.variant!r}")
        if self.accept_timing not in ACCEPT_TIMINGS:
            out.append(f"unknown accept timing {self.accept_timing!r}")
        return out


def validate_inputs(
    catalog: SiteCatalog,
    m: RttMatrix,
    clients: ClientSet,
    params: ProtocolParams,
) -> list[str]:
    """Collect every inconsistency across the inputs; empty list means ok."""
    problems = []
    if m.size != len(catalog):
        problems.append(f"matrix is {m.size}x{m.size} but catalog has {len(catalog)} sites")
    problems += matrix_problems(m.values)
    problems += clients.problems(len(catalog))
    problems += params.problems()
    if params.n > len(catalog):
        problems.append(f"n={params.n} exceeds the {len(catalog)} available sites")
    return problems
