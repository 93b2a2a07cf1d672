"""Building deployment rankings and comparing them against a reference.

Ranking CSV::

    rank,leader,followers,latency_ms
    1,Ireland,Frankfurt;London;Paris,95.2

Reference CSV is either pre-aggregated (``leader,followers,latency_ms``, a
ranking CSV also qualifies) or raw, with 50 ``;``-joined measurements per
deployment in a ``samples_ms`` column.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import (
    ClientSet,
    Deployment,
    ProtocolParams,
    RttMatrix,
    SiteCatalog,
    ValidationError,
)
from .deployments import DeploymentSpace, chunks, count, enumerate_deployments
from .estimator import latencies

RANKING_HEADER = ["rank", "leader", "followers", "latency_ms"]
SCATTER_HEADER = ["deployment", "rank_estimated", "rank_reference"]

RAW_SAMPLES = 50
RAW_TRIM = 5  # dropped from each end of the sorted samples

CHUNK = 2048

# Latencies this close (relative) count as tied. Mathematically equal estimates
# often differ in the last ulp because their terms were summed in another order.
TIE_RTOL = 1e-10


@dataclass(frozen=True)
class RankingEntry:
    deployment: Deployment
    latency: float
    rank: int


@dataclass(frozen=True)
class Ranking:
    catalog: SiteCatalog
    entries: tuple[RankingEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def deployments(self) -> list[Deployment]:
        return [e.deployment for e in self.entries]

    @property
    def latencies(self) -> np.ndarray:
        return np.array([e.latency for e in self.entries])

    def best(self) -> RankingEntry:
        return self.entries[0]

    def to_csv(self, stream: TextIO | None = None) -> str:
        out = stream if stream is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(RANKING_HEADER)
        for e in self.entries:
            d = e.deployment
            leader = "" if d.leader is None else self.catalog.name_of(d.leader)
            followers = ";".join(self.catalog.name_of(s) for s in d.followers)
            w.writerow([e.rank, leader, followers, repr(float(e.latency))])
        return out.getvalue() if stream is None else ""


@dataclass(frozen=True)
class RankingComparison:
    rmse: float
    cc: float
    # Pearson on raw latencies rather than ranks; reported for completeness
    cc_latency: float
    pairs: tuple[tuple[str, int, int], ...]

    def scatter_csv(self, stream: TextIO | None = None) -> str:
        out = stream if stream is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SCATTER_HEADER)
        w.writerows(self.pairs)
        return out.getvalue() if stream is None else ""


def build_ranking(
    catalog: SiteCatalog, deployments: Sequence[Deployment], values: Iterable[float]
) -> Ranking:
    """Sort ascending by latency; ties go to the canonically smaller deployment."""
    values = np.asarray(list(values), dtype=np.float64)
    if len(values) != len(deployments):
        raise ValueError("one latency per deployment required")
    if len(set(deployments)) != len(deployments):
        raise ValidationError(["ranking contains duplicate deployments"])
    canon = sorted(range(len(deployments)), key=lambda i: deployments[i].sort_key())
    position = np.empty(len(canon), dtype=np.intp)
    position[canon] = np.arange(len(canon))
    order = np.argsort(values, kind="stable")
    v = values[order]
    gap = np.diff(v) > TIE_RTOL * np.maximum(np.abs(v[1:]), np.abs(v[:-1]))
    group = np.concatenate([[0], np.cumsum(gap)])
    order = order[np.lexsort((position[order], group))]
    entries = tuple(
        RankingEntry(deployments[i], float(values[i]), k)
        for k, i in enumerate(order, start=1)
    )
    return Ranking(catalog, entries)


def _evaluate_chunk(args):
    space, start, stop, clients, m, p = args
    ds = list(enumerate_deployments(space, start, stop))
    return ds, latencies(ds, clients, m, p)


def evaluate(
    space: DeploymentSpace,
    clients: ClientSet,
    m: RttMatrix,
    p: ProtocolParams,
    *,
    workers: int = 1,
    chunk_size: int = CHUNK,
) -> tuple[list[Deployment], np.ndarray]:
    """Estimate every deployment in the space, returned in canonical order."""
    jobs = [(space, a, b, clients, m, p) for a, b in chunks(space, chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, jobs))
    else:
        parts = [_evaluate_chunk(j) for j in jobs]
    deployments = [d for ds, _ in parts for d in ds]
    values = np.concatenate([v for _, v in parts]) if parts else np.zeros(0)
    assert len(deployments) == count(space)
    return deployments, values


def rank(
    space: DeploymentSpace,
    clients: ClientSet,
    m: RttMatrix,
    p: ProtocolParams,
    *,
    workers: int = 1,
    chunk_size: int = CHUNK,
) -> Ranking:
    """Rank every deployment of ``space`` with the estimator picked by ``p.variant``."""
    ds, values = evaluate(space, clients, m, p, workers=workers, chunk_size=chunk_size)
    return build_ranking(space.catalog, ds, values)


def _identity(catalog: SiteCatalog, d: Deployment):
    leader = None if d.leader is None else catalog.name_of(d.leader)
    return leader, frozenset(catalog.name_of(s) for s in d.followers)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) == 0:
        return math.nan
    if np.array_equal(x, y):
        return 1.0
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan
    return float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))


def compare(estimated: Ranking, reference: Ranking) -> RankingComparison:
    """RMSE against the y = x diagonal and Pearson CC over matched rank pairs."""
    ref = {_identity(reference.catalog, e.deployment): e for e in reference}
    est = {_identity(estimated.catalog, e.deployment): e for e in estimated}
    only_est = [k for k in est if k not in ref]
    only_ref = [k for k in ref if k not in est]
    if only_est or only_ref:
        shown = [_fmt(k) + " (estimated only)" for k in only_est]
        shown += [_fmt(k) + " (reference only)" for k in only_ref]
        raise ValidationError(
            [f"rankings cover different deployments ({len(shown)} differ): " + ", ".join(shown[:10])]
        )
    pairs = []
    e_rank, r_rank, e_lat, r_lat = [], [], [], []
    for e in estimated:
        r = ref[_identity(estimated.catalog, e.deployment)]
        pairs.append((e.deployment.key(estimated.catalog), e.rank, r.rank))
        e_rank.append(e.rank)
        r_rank.append(r.rank)
        e_lat.append(e.latency)
        r_lat.append(r.latency)
    e_rank, r_rank = np.array(e_rank, dtype=np.float64), np.array(r_rank, dtype=np.float64)
    rmse = float(np.sqrt(np.mean((e_rank - r_rank) ** 2))) if len(pairs) else 0.0
    return RankingComparison(
        rmse=rmse,
        cc=_pearson(e_rank, r_rank),
        cc_latency=_pearson(np.array(e_lat), np.array(r_lat)),
        pairs=tuple(pairs),
    )


def _fmt(identity) -> str:
    leader, followers = identity
    body = ",".join(sorted(followers))
    return body if leader is None else f"{leader}|{body}"


def trimmed_latency(samples: Sequence[float]) -> float:
    """Mean of 50 measurements after dropping the five highest and five lowest."""
    if len(samples) != RAW_SAMPLES:
        raise ValidationError([f"expected {RAW_SAMPLES} samples, got {len(samples)}"])
    kept = sorted(samples)[RAW_TRIM : RAW_SAMPLES - RAW_TRIM]
    return math.fsum(kept) / len(kept)


def _split_names(text: str) -> list[str]:
    return [s.strip() for s in text.split(";") if s.strip()]


def load_reference(stream: TextIO, catalog: SiteCatalog | None = None) -> Ranking:
    """Read measured latencies (aggregated or raw) and rank them.

    Without a catalog, one is built from the site names in the file, sorted
    alphabetically; ties then break in that catalog's order.
    """
    reader = csv.DictReader(stream)
    fields = [f.strip() for f in (reader.fieldnames or [])]
    reader.fieldnames = fields
    if "leader" not in fields or "followers" not in fields:
        raise ValidationError(["reference header needs 'leader' and 'followers' columns"])
    if "latency_ms" in fields:
        raw = False
    elif "samples_ms" in fields:
        raw = True
    else:
        raise ValidationError(["reference header needs 'latency_ms' or 'samples_ms'"])

    rows = []
    problems = []
    for row in reader:
        line = reader.line_num
        leader = (row["leader"] or "").strip()
        followers = _split_names(row["followers"] or "")
        try:
            if raw:
                samples = [float(v) for v in _split_names(row["samples_ms"] or "")]
                value = trimmed_latency(samples)
            else:
                value = float(row["latency_ms"])
        except ValidationError as exc:
            problems.append(f"line {line}: {exc}")
            continue
        except (TypeError, ValueError):
            problems.append(f"line {line}: non-numeric latency")
            continue
        rows.append((line, leader, followers, value))
    if problems:
        raise ValidationError(problems)

    if catalog is None:
        names = {n for _, l, fs, _ in rows for n in ([l] if l else []) + fs}
        catalog = SiteCatalog(sorted(names))

    deployments, values, seen = [], [], {}
    for line, leader, followers, value in rows:
        try:
            ids = [catalog.id_of(n) for n in followers]
            d = (
                Deployment.leader_based(catalog.id_of(leader), ids)
                if leader
                else Deployment.leaderless(ids)
            )
        except ValueError as exc:
            problems.append(f"line {line}: {exc}")
            continue
        if d in seen:
            problems.append(f"line {line}: duplicate deployment {d.key(catalog)} (first on line {seen[d]})")
            continue
        seen[d] = line
        deployments.append(d)
        values.append(value)
    if problems:
        raise ValidationError(problems)
    return build_ranking(catalog, deployments, values)


load_ranking = load_reference
