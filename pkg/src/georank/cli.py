"""Command-line entry point: ingest, enumerate, estimate, rank, compare.

Exit codes: 0 success, 1 input/validation error (details as JSON on stderr),
2 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from . import oracle
from .core import (
    BFT,
    CFT,
    DETAILED,
    SENDER_BASED,
    ACCEPT_TIMINGS,
    SIMPLE,
    ClientSet,
    Deployment,
    ProtocolParams,
    SiteCatalog,
    ValidationError,
    validate_inputs,
)
from .deployments import LEADER_BASED, LEADERLESS, DeploymentSpace, count, enumerate_deployments
from .estimator import estimate_detailed, estimate_simple
from .ranking import build_ranking, compare, evaluate, load_reference
from .rtt import aggregate, catalog_from_samples, load_matrix, parse_samples, store_matrix

log = logging.getLogger("georank")

ESTIMATORS = {"detailed": DETAILED, "simple": SIMPLE}


class InputError(Exception):
    def __init__(self, problems):
        self.problems = [problems] if isinstance(problems, str) else list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class RunConfig:
    matrix: str | None = None
    sites: list[str] | None = None
    clients: str | None = None
    n: int = 4
    f: int = 1
    estimator: str = "detailed"
    accept_timing: str = SENDER_BASED
    fault_model: str = BFT
    output: str | None = None
    workers: int = 1

    @classmethod
    def from_sources(cls, path: str | None, overrides: dict) -> "RunConfig":
        """JSON file values first, then any flag the user actually passed."""
        data = {}
        if path:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read config {path}: {exc}") from None
            known = {f.name for f in fields(cls)}
            unknown = sorted(set(data) - known)
            if unknown:
                raise InputError(f"unknown config keys: {unknown}")
            # a relative matrix path in the file is relative to the file itself
            if data.get("matrix") and not Path(data["matrix"]).is_absolute():
                data["matrix"] = str(Path(path).parent / data["matrix"])
        data.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls(**data)
        if isinstance(cfg.sites, str):
            cfg.sites = [s.strip() for s in cfg.sites.split(",") if s.strip()]
        return cfg

    def problems(self) -> list[str]:
        out = []
        if not self.matrix:
            out.append("no matrix given")
        if not self.clients:
            out.append("no clients given")
        if self.estimator not in ESTIMATORS:
            out.append(f"unknown estimator {self.estimator!r}")
        if self.workers < 1:
            out.append(f"workers={self.workers}, expected >= 1")
        return out

    def params(self) -> ProtocolParams:
        return ProtocolParams(
            n=self.n,
            f=self.f,
            variant=ESTIMATORS.get(self.estimator, self.estimator),
            accept_timing=self.accept_timing,
            fault_model=self.fault_model,
        )


def _read_matrix(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return load_matrix(fh)


def _names(text: str | None) -> list[str]:
    return [s.strip() for s in (text or "").split(",") if s.strip()]


def _space(catalog: SiteCatalog, sites, n: int, mode=LEADER_BASED) -> DeploymentSpace:
    allowed = [catalog.id_of(s) for s in sites] if sites else range(len(catalog))
    try:
        return DeploymentSpace(catalog, tuple(allowed), n, mode)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _fmt_ms(v: float) -> str:
    return f"{v:.3f}"


def cmd_ingest(args) -> int:
    with open(args.samples, newline="", encoding="utf-8") as fh:
        samples = parse_samples(fh)
    if args.sites:
        catalog = SiteCatalog(_names(args.sites))
    else:
        catalog = catalog_from_samples(samples)
    m = aggregate(samples, catalog, trim=args.trim)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        store_matrix(catalog, m, fh)
    print(f"wrote {len(catalog)}x{len(catalog)} matrix from {len(samples)} samples to {args.out}")
    return 0


def cmd_enumerate(args) -> int:
    if args.matrix:
        catalog, _ = _read_matrix(args.matrix)
    elif args.num_sites:
        catalog = SiteCatalog(str(i) for i in range(args.num_sites))
    else:
        raise InputError("need --matrix or --num-sites")
    mode = LEADERLESS if args.leaderless else LEADER_BASED
    space = _space(catalog, _names(args.sites), args.n, mode)
    if args.count:
        print(count(space))
        return 0
    for d in enumerate_deployments(space):
        print(d.key(catalog))
    return 0


def cmd_estimate(args) -> int:
    catalog, m = _read_matrix(args.matrix)
    followers = [catalog.id_of(s) for s in _names(args.followers)]
    x = Deployment.leader_based(catalog.id_of(args.leader), followers)
    clients = ClientSet.parse(args.clients, catalog)
    p = ProtocolParams(
        n=x.n,
        f=args.f,
        variant=ESTIMATORS[args.estimator],
        accept_timing=args.accept_timing,
        fault_model=CFT if args.cft else BFT,
    )
    problems = validate_inputs(catalog, m, clients, p)
    if problems:
        raise InputError(problems)
    if args.estimator == "simple":
        latency = estimate_simple(x, clients, m)
        out = {"deployment": x.key(catalog), "latency": latency}
    else:
        latency, trace = estimate_detailed(x, clients, m, p)
        out = {"deployment": x.key(catalog), **trace.to_json(catalog)}
    if args.oracle:
        out["oracle_latency"] = oracle.simulate(x, clients, m, p)
    if args.verbose:
        print(json.dumps(out, indent=2))
    else:
        print(_fmt_ms(latency))
    return 0


def cmd_rank(args) -> int:
    overrides = {
        "matrix": args.matrix,
        "sites": args.sites,
        "clients": args.clients,
        "n": args.n,
        "f": args.f,
        "estimator": args.estimator,
        "accept_timing": args.accept_timing,
        "fault_model": CFT if args.cft else None,
        "output": args.output,
        "workers": args.workers,
    }
    try:
        cfg = RunConfig.from_sources(args.config, overrides)
    except TypeError as exc:
        raise InputError(f"bad config: {exc}") from None
    problems = cfg.problems()
    if problems:
        raise InputError(problems)
    catalog, m = _read_matrix(cfg.matrix)
    clients = ClientSet.parse(cfg.clients, catalog)
    p = cfg.params()
    problems = validate_inputs(catalog, m, clients, p)
    space = None
    try:
        space = _space(catalog, cfg.sites, p.n)
    except InputError as exc:
        problems += exc.problems
    if problems:
        raise InputError(problems)

    t0 = time.perf_counter()
    ds, values = evaluate(space, clients, m, p, workers=cfg.workers)
    t1 = time.perf_counter()
    ranking = build_ranking(catalog, ds, values)
    if cfg.output:
        with open(cfg.output, "w", newline="", encoding="utf-8") as fh:
            ranking.to_csv(fh)
    else:
        sys.stdout.write(ranking.to_csv())
    t2 = time.perf_counter()

    best = ranking.best()
    summary = sys.stdout if cfg.output else sys.stderr
    total = len(ranking)
    print(f"|DC| = {total}", file=summary)
    print(
        f"evaluation {t1 - t0:.3f} s ({(t1 - t0) / total * 1e3:.4f} ms/deployment), "
        f"sort+output {t2 - t1:.3f} s",
        file=summary,
    )
    print(f"best: {best.deployment.key(catalog)} {_fmt_ms(best.latency)} ms", file=summary)
    return 0


def cmd_compare(args) -> int:
    catalog = _read_matrix(args.matrix)[0] if args.matrix else None
    with open(args.estimated, newline="", encoding="utf-8") as fh:
        est = load_reference(fh, catalog)
    with open(args.reference, newline="", encoding="utf-8") as fh:
        ref = load_reference(fh, est.catalog)
    result = compare(est, ref)
    print(f"N = {len(result.pairs)}")
    print(f"RMSE = {result.rmse:.6f}")
    print(f"CC = {result.cc:.6f}")
    if args.verbose:
        print(f"CC (latency) = {result.cc_latency:.6f}")
    if args.scatter:
        with open(args.scatter, "w", newline="", encoding="utf-8") as fh:
            result.scatter_csv(fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="georank", description="Rank geo-replicated SMR deployments by estimated latency."
    )
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="average RTT samples into a matrix CSV")
    p.add_argument("samples")
    p.add_argument("out")
    p.add_argument("--sites", help="comma-separated catalog order (default: first seen)")
    p.add_argument("--trim", type=float, default=0.0, help="fraction trimmed from each end")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("enumerate", help="list or count candidate deployments")
    p.add_argument("--matrix")
    p.add_argument("--num-sites", type=int)
    p.add_argument("--sites")
    p.add_argument("-n", type=int, default=4)
    p.add_argument("--leaderless", action="store_true")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("estimate", help="estimate one deployment's latency")
    p.add_argument("--matrix", required=True)
    p.add_argument("--leader", required=True)
    p.add_argument("--followers", required=True)
    p.add_argument("--clients", required=True)
    p.add_argument("-f", type=int, default=1)
    p.add_argument("--estimator", choices=sorted(ESTIMATORS), default="detailed")
    p.add_argument("--accept-timing", choices=ACCEPT_TIMINGS, default=SENDER_BASED)
    p.add_argument("--cft", action="store_true")
    p.add_argument("--oracle", action="store_true", help="also run the event simulation")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("rank", help="rank every deployment")
    p.add_argument("--config", help="JSON run config; flags override it")
    p.add_argument("--matrix")
    p.add_argument("--sites", help="comma-separated candidate sites (default: all)")
    p.add_argument("--clients", help='e.g. "Ireland:10,Sydney:3,NVirginia:5"')
    p.add_argument("-n", type=int)
    p.add_argument("-f", type=int)
    p.add_argument("--estimator", choices=sorted(ESTIMATORS))
    p.add_argument("--accept-timing", choices=ACCEPT_TIMINGS)
    p.add_argument("--cft", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("-j", "--workers", type=int)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("compare", help="compare an estimated ranking with a reference")
    p.add_argument("estimated")
    p.add_argument("reference")
    p.add_argument("--matrix", help="matrix CSV whose catalog fixes tie-break order")
    p.add_argument("--scatter", help="write rank pairs CSV here")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_compare)
    return parser


def _fail(problems) -> int:
    json.dump({"errors": list(problems)}, sys.stderr)
    sys.stderr.write("\n")
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, ValidationError) as exc:
        return _fail(exc.problems)
    except (ValueError, OSError) as exc:
        return _fail([str(exc)])
    except Exception:
        log.exception("internal error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
