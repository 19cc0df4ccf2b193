"""Command-line front end: compute reports, verify the catalog, list groups.

Exit codes: 0 for ordinary outcomes (including EssentialZero and
HsopNotFound), 1 for usage or input errors, 2 when the mathematics
disagrees with the expected theorems or an internal invariant (the
signal worth grepping for).

Every flag has an environment-variable override with the ESSCOH_ prefix
(e.g. ESSCOH_MAXDEG, ESSCOH_CACHE_DIR).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import grouptheory as gt
from .errors import EngineError, EngineIntegrityError
from .pipeline import ResolutionRegistry, essential_report
from .resolution import default_maxdeg

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def _env(name: str, fallback=None):
    return os.environ.get(f"ESSCOH_{name}", fallback)


def _env_int(name: str, fallback=None):
    raw = _env(name)
    return int(raw) if raw is not None else fallback


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esscoh",
        description="Exact mod-2 cohomology engine: essential ideals of "
                    "small 2-groups and their freeness verdicts.")
    sub = parser.add_subparsers(dest="command", required=True)

    com = sub.add_parser("compute", help="run the pipeline for one group")
    com.add_argument("--group", default=_env("GROUP"),
                     help="catalog name or path to a group JSON file")
    com.add_argument("--maxdeg", type=int, default=_env_int("MAXDEG"),
                     help="degree bound (default: per-order cap)")
    com.add_argument("--out", default=_env("OUT"),
                     help="write the JSON report here")
    com.add_argument("--cache-dir", default=_env("CACHE_DIR"))
    com.add_argument("--format", choices=("json", "text"),
                     default=_env("FORMAT", "json"))
    com.add_argument("--no-checks", action="store_true",
                     help="skip the per-report property checks")

    ver = sub.add_parser("verify", help="run every invariant suite over the catalog")
    ver.add_argument("--group", default=_env("GROUP"),
                     help="comma-separated catalog names (default: all)")
    ver.add_argument("--maxdeg", type=int, default=_env_int("MAXDEG"),
                     help="degree bound override for every group")
    ver.add_argument("--max-order", type=int, default=_env_int("MAX_ORDER"),
                     help="restrict the catalog to groups of at most this order")
    ver.add_argument("--jobs", type=int, default=_env_int("JOBS", 1))
    ver.add_argument("--seed", type=int, default=_env_int("SEED", 0))
    ver.add_argument("--pairs", type=int, default=_env_int("PAIRS", 100),
                     help="random pairs per randomized property")
    ver.add_argument("--cache-dir", default=_env("CACHE_DIR"))
    ver.add_argument("--verbose", "-v", action="store_true")

    cat = sub.add_parser("catalog", help="list the built-in groups")
    cat.add_argument("--format", choices=("json", "text"),
                     default=_env("FORMAT", "text"))
    cat.add_argument("--order", type=int, default=None,
                     help="only groups of this order")
    return parser


def _load_group(spec: str) -> gt.GroupTable:
    if spec in gt.catalog():
        return gt.catalog_group(spec)
    path = Path(spec)
    if not path.exists():
        raise EngineError(
            f"group {spec!r} is neither a catalog name nor a readable file")
    return gt.load_group_file(path)


def report_bytes(report) -> bytes:
    text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    return text.encode("utf-8")


def cmd_compute(args) -> int:
    if not args.group:
        print("compute: --group is required", file=sys.stderr)
        return EXIT_ERROR
    try:
        group = _load_group(args.group)
    except EngineError as exc:
        print(f"compute: {exc}", file=sys.stderr)
        return EXIT_ERROR
    registry = ResolutionRegistry(cache_dir=args.cache_dir)
    maxdeg = args.maxdeg if args.maxdeg is not None else default_maxdeg(group.order)
    try:
        report = essential_report(group, maxdeg=maxdeg, registry=registry,
                                  run_checks=not args.no_checks)
    except EngineError as exc:
        print(f"compute: {exc}", file=sys.stderr)
        return EXIT_ERROR
    blob = report_bytes(report)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(blob)
    if args.format == "text":
        print(report.to_text())
    elif not args.out:
        sys.stdout.write(blob.decode("utf-8"))
    if report.theorem_violation:
        print(f"verify the mathematics: {report.group} reports "
              f"{report.verdict}({report.verdict_degree}) with the theorem "
              "hypothesis satisfied", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _verify_one(name: str, maxdeg, seed: int, pairs: int, cache_dir):
    """One group's invariant suite (top-level so process pools can run it)."""
    from .pipeline import GroupContext
    from .verify import run_group_checks

    group = gt.catalog_group(name)
    registry = ResolutionRegistry(cache_dir=cache_dir)
    ctx = GroupContext(group, maxdeg=maxdeg, registry=registry)
    results = run_group_checks(ctx, seed=seed, pairs=pairs)
    return [(r.group, r.name, r.ok, r.detail) for r in results]


def cmd_verify(args) -> int:
    names = list(gt.catalog())
    if args.group:
        wanted = [n.strip() for n in args.group.split(",") if n.strip()]
        unknown = [n for n in wanted if n not in names]
        if unknown:
            print(f"verify: unknown catalog groups {unknown}", file=sys.stderr)
            return EXIT_ERROR
        names = wanted
    if args.max_order:
        names = [n for n in names if gt.catalog_group(n).order <= args.max_order]
    failures = []
    total = 0
    try:
        if args.jobs and args.jobs > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = [pool.submit(_verify_one, n, args.maxdeg, args.seed,
                                       args.pairs, args.cache_dir)
                           for n in names]
                batches = [f.result() for f in futures]
        else:
            batches = [_verify_one(n, args.maxdeg, args.seed, args.pairs,
                                   args.cache_dir) for n in names]
    except EngineIntegrityError as exc:
        print(f"verify: FAIL {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except EngineError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for batch in batches:
        for group, check, ok, detail in batch:
            total += 1
            if args.verbose:
                status = "ok" if ok else "FAIL"
                print(f"{group:10s} {check:36s} {status}")
            if not ok:
                failures.append((group, check, detail))
    for group, check, detail in failures:
        print(f"FAIL {group} {check} {detail}", file=sys.stderr)
    summary = f"verify: {total - len(failures)}/{total} checks passed " \
              f"({len(names)} groups)"
    print(summary)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_catalog(args) -> int:
    rows = []
    for name, group in gt.catalog().items():
        if args.order and group.order != args.order:
            continue
        omega = gt.omega1_centre(group)
        rows.append({
            "name": name,
            "order": group.order,
            "centre_rank": gt.elementary_rank(omega),
            "hypothesis_excluded": gt.has_rank2_direct_factor(group),
            "default_maxdeg": default_maxdeg(group.order),
        })
    if args.format == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        print(f"{'name':10s} {'order':>5s} {'d':>2s} {'excluded':>8s} {'maxdeg':>6s}")
        for r in rows:
            print(f"{r['name']:10s} {r['order']:5d} {r['centre_rank']:2d} "
                  f"{str(r['hypothesis_excluded']):>8s} {r['default_maxdeg']:6d}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compute":
        return cmd_compute(args)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "catalog":
        return cmd_catalog(args)
    parser.error("unknown command")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
