"""Reading RTT samples, averaging them into a matrix, and matrix CSV I/O.

Sample CSV::

    src,dst,timestamp,rtt_ms
    Ireland,Singapore,1555343280,179.9

Matrix CSV::

    site,Ireland,Singapore
    Ireland,0,180.3
    Singapore,180.3,0
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .core import RttMatrix, SiteCatalog, ValidationError

SAMPLE_HEADER = ["src", "dst", "timestamp", "rtt_ms"]

# load_matrix tolerance for direction mismatch, relative to the larger entry
SYMMETRY_RTOL = 1e-9


@dataclass(frozen=True)
class RttSample:
    src: str
    dst: str
    timestamp: float | None
    rtt: float


def parse_samples(stream: TextIO) -> list[RttSample]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip() for h in header] != SAMPLE_HEADER:
        raise ValidationError([f"line 1: expected header {','.join(SAMPLE_HEADER)}, got {header}"])
    samples = []
    problems = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            problems.append(f"line {line}: expected 4 fields, got {len(row)}")
            continue
        src, dst, ts, rtt = (c.strip() for c in row)
        if not src or not dst:
            problems.append(f"line {line}: empty site name")
            continue
        if src == dst:
            problems.append(f"line {line}: src and dst are both {src!r}")
            continue
        try:
            value = float(rtt)
            stamp = float(ts) if ts else None
        except ValueError:
            problems.append(f"line {line}: non-numeric field in {row}")
            continue
        if not math.isfinite(value) or value <= 0:
            problems.append(f"line {line}: rtt {rtt!r} must be finite and > 0")
            continue
        samples.append(RttSample(src, dst, stamp, value))
    if problems:
        raise ValidationError(problems)
    return samples


def _trimmed_mean(values: list[float], fraction: float) -> float:
    xs = sorted(values)
    cut = int(len(xs) * fraction)
    if cut and len(xs) > 2 * cut:
        xs = xs[cut : len(xs) - cut]
    return math.fsum(xs) / len(xs)


def aggregate(
    samples: Iterable[RttSample],
    catalog: SiteCatalog,
    *,
    trim: float = 0.0,
) -> RttMatrix:
    """Average samples per unordered site pair into a symmetric matrix.

    Both directions of a pair are pooled before averaging. ``trim`` drops that
    fraction of the lowest and highest samples per pair (0.1 drops 10% each
    side); the default is a plain mean.
    """
    pooled: dict[tuple[int, int], list[float]] = defaultdict(list)
    problems = []
    unknown = set()
    for s in samples:
        try:
            a, b = catalog.id_of(s.src), catalog.id_of(s.dst)
        except ValueError:
            unknown.update(x for x in (s.src, s.dst) if x not in catalog.names)
            continue
        pooled[(min(a, b), max(a, b))].append(s.rtt)
    if unknown:
        problems.append(f"samples name sites missing from the catalog: {sorted(unknown)}")

    size = len(catalog)
    values = np.zeros((size, size))
    missing = []
    for a in range(size):
        for b in range(a + 1, size):
            rtts = pooled.get((a, b))
            if not rtts:
                missing.append(f"({catalog.name_of(a)},{catalog.name_of(b)})")
                continue
            # fsum is exactly rounded, so the mean does not depend on sample order
            mean = _trimmed_mean(rtts, trim) if trim else math.fsum(rtts) / len(rtts)
            values[a, b] = values[b, a] = mean
    if missing:
        problems.append("no samples for site pairs: " + " ".join(missing))
    if problems:
        raise ValidationError(problems)
    return RttMatrix(values)


def catalog_from_samples(samples: Iterable[RttSample]) -> SiteCatalog:
    """Catalog of every site named in the samples, in first-seen order."""
    names: dict[str, None] = {}
    for s in samples:
        names.setdefault(s.src)
        names.setdefault(s.dst)
    return SiteCatalog(names)


def load_matrix(stream: TextIO) -> tuple[SiteCatalog, RttMatrix]:
    rows = [r for r in csv.reader(stream) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError(["matrix file is empty"])
    header = [c.strip() for c in rows[0]]
    if not header or header[0] != "site":
        raise ValidationError(["matrix header must start with 'site'"])
    names = header[1:]
    body = rows[1:]
    problems = []
    if len(body) != len(names):
        problems.append(f"matrix has {len(names)} columns but {len(body)} rows")
    row_names = [r[0].strip() for r in body]
    if row_names != names:
        problems.append("row site names do not match header column names")
    for i, r in enumerate(body, start=2):
        if len(r) != len(names) + 1:
            problems.append(f"line {i}: expected {len(names) + 1} fields, got {len(r)}")
    if problems:
        raise ValidationError(problems)

    catalog = SiteCatalog(names)  # raises on duplicate names
    try:
        values = np.array([[float(c) for c in r[1:]] for r in body], dtype=np.float64)
    except ValueError as exc:
        raise ValidationError([f"non-numeric matrix entry: {exc}"]) from None
    size = len(names)
    for a in range(size):
        for b in range(a + 1, size):
            x, y = values[a, b], values[b, a]
            if x != y:
                if abs(x - y) > SYMMETRY_RTOL * max(abs(x), abs(y)):
                    problems.append(
                        f"asymmetric entries ({names[a]},{names[b]})={x!r} "
                        f"and ({names[b]},{names[a]})={y!r}"
                    )
                else:
                    values[a, b] = values[b, a] = (x + y) / 2
    if problems:
        raise ValidationError(problems)
    return catalog, RttMatrix(values)


def store_matrix(catalog: SiteCatalog, m: RttMatrix, stream: TextIO | None = None) -> str:
    """Write the matrix as CSV; values use repr so reloading is bit-exact."""
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["site"] + catalog.names)
    for site in catalog:
        writer.writerow([site.name] + [repr(float(v)) for v in m.values[site.id]])
    return out.getvalue() if stream is None else ""
