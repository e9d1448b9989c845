"""``eqbound`` command line.

Exit codes: 0 success, 2 unparsable input, 3 missing ties/groups,
4 a verified bound with negative margin, 5 enumeration cap reached.
"""
from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import scenario as io
from .core import Grouping
from .errors import (
    EqboundError,
    MissingGrouping,
    MissingSocialGraph,
    ParseError,
    ResourceLimit,
)
from .pipeline import (
    SWEEP_HEADER,
    SweepConfig,
    parse_partitions,
    parse_seeds,
    run_bounds,
    run_check,
    run_solve,
    sweep_row,
)
from .spectrum import GeneratorConfig, generate_scenario

EXIT_OK, EXIT_PARSE, EXIT_STRUCTURE, EXIT_VIOLATION, EXIT_LIMIT = 0, 2, 3, 4, 5
KINDS = ("nash", "social", "group")


def _emit(data, out) -> None:
    text = io.dumps(data)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    _emit(run_check(io.load(args.path)), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = io.load(args.path)
    mode = "dynamics" if args.dynamics else "enumerate"
    _emit(run_solve(sc, args.kind, mode, args.start, args.max_rounds, args.order, args.seed), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    sc = io.load(args.path)
    report = run_bounds(sc, args.kind or None, timing=not args.no_timing)
    _emit(report, args.out)
    return EXIT_VIOLATION if report["violations"] else EXIT_OK


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        tie_prob=args.tie_prob,
        equal_powers=not args.unequal_powers,
        partition=tuple(int(v) for v in args.partition.split(",")) if args.partition else None,
    )
    sc = generate_scenario(args.seed, args.users, args.channels, cfg)
    doc = io.spectrum_document(sc)
    Path(args.out).write_text(io.dumps(doc), encoding="utf-8")
    print(io.digest(doc))
    return EXIT_OK


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def _sweep_task(job):
    cfg, seed, sizes = job
    return sweep_row(cfg, seed, Grouping(sizes))


def cmd_sweep(args) -> int:
    cfg = SweepConfig(family=args.family, users=args.users, channels=args.channels, actions=args.actions,
                      identical=args.identical, detection=args.detection, tie_prob=args.tie_prob)
    cfg.validate()
    partitions = parse_partitions(args.partitions, cfg.users)
    jobs = [(cfg, seed, p.sizes) for seed in parse_seeds(args.seeds) for p in partitions]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_task, jobs))  # map preserves submission order
    else:
        rows = [_sweep_task(j) for j in jobs]
    handle = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in SWEEP_HEADER])
    finally:
        if args.out:
            handle.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqbound", description="Equilibrium quality bounds for valid utility games.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="structural verdicts with witnesses")
    c.add_argument("path")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="enumerate equilibria or run best-response dynamics")
    s.add_argument("path")
    s.add_argument("--kind", choices=KINDS, default="nash")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="list every pure equilibrium (default)")
    mode.add_argument("--dynamics", action="store_true", help="best-response dynamics from --start")
    s.add_argument("--start", help="comma-separated action indices, one per user")
    s.add_argument("--max-rounds", type=int, default=100)
    s.add_argument("--order", choices=("round_robin", "random"), default="round_robin")
    s.add_argument("--seed", type=int, default=0, help="shuffle seed for --order random")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bounds", help="optimum, curvature and every applicable bound report")
    b.add_argument("path")
    b.add_argument("--kind", choices=KINDS, action="append",
                   help="repeatable; default is every kind the scenario supports")
    b.add_argument("--no-timing", action="store_true", help="omit wall_time so reports compare byte for byte")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("gen", help="write a seeded spectrum scenario and print its digest")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--users", type=int, required=True)
    g.add_argument("--channels", type=int, required=True)
    g.add_argument("--tie-prob", type=float, default=0.0)
    g.add_argument("--unequal-powers", action="store_true")
    g.add_argument("--partition", help="group sizes, e.g. 2,2")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    w = sub.add_parser("sweep", help="CSV of bound margins over seeds and partitions")
    w.add_argument("--seeds", required=True, help="inclusive range a..b")
    w.add_argument("--family", choices=("spectrum", "coverage"), default="spectrum")
    w.add_argument("--users", type=int, default=4)
    w.add_argument("--channels", type=int, default=3)
    w.add_argument("--actions", type=int, default=3, help="actions per user (coverage)")
    w.add_argument("--identical", action="store_true", help="give every user the same action space")
    w.add_argument("--detection", type=float, default=1.0, help="detection probability (coverage)")
    w.add_argument("--tie-prob", type=float, default=0.0)
    w.add_argument("--partitions", help='e.g. "1,1,1,1;2,2;4"')
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MissingSocialGraph, MissingGrouping) as exc:
        print(f"missing structure: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except EqboundError as exc:
        # bad profiles, incomplete tables, degenerate mixtures, bad generator params
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
