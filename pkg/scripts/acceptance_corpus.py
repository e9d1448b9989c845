"""Run every bound report over the seeded acceptance corpus and tabulate
checked reports, negative margins and minimum margins per statement.

    python scripts/acceptance_corpus.py [--spectrum 200] [--coverage 60] [--csv out.csv]
"""
import argparse
import collections
import csv
import math
import sys
import time

from eqbound.corpus import CorpusConfig, coverage_corpus, spectrum_corpus
from eqbound.pipeline import run_bounds


def tabulate(instances, tol):
    stats = collections.defaultdict(lambda: {"checked": 0, "negative": 0, "min_margin": math.inf})
    for inst in instances:
        report = run_bounds(inst.scenario, timing=False)
        for kind, block in report["analyses"].items():
            for eq in block["equilibria"]:
                for r in eq["reports"]:
                    if r["status"] != "checked":
                        continue
                    s = stats[(kind, r["statement"])]
                    s["checked"] += 1
                    s["negative"] += r["margin"] < -tol
                    s["min_margin"] = min(s["min_margin"], r["margin"])
    return stats


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spectrum", type=int, default=200, help="number of spectrum seeds")
    ap.add_argument("--coverage", type=int, default=60, help="number of coverage seeds")
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--csv", help="also write the table here")
    args = ap.parse_args(argv)

    cfg = CorpusConfig(spectrum_seeds=args.spectrum, coverage_seeds=args.coverage)
    rows = []
    for family, corpus in (("spectrum", spectrum_corpus(cfg)), ("coverage", coverage_corpus(cfg))):
        t0 = time.perf_counter()
        stats = tabulate(corpus, args.tol)
        print(f"{family}: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        for (kind, statement), s in sorted(stats.items()):
            rows.append([family, kind, statement, s["checked"], s["negative"], s["min_margin"]])

    header = ["family", "kind", "statement", "checked", "negative", "min_margin"]
    print(f"{'family':9} {'kind':12} {'stmt':9} {'checked':>7} {'negative':>8} {'min margin':>12}")
    for row in rows:
        print(f"{row[0]:9} {row[1]:12} {row[2]:9} {row[3]:7d} {row[4]:8d} {row[5]:12.4g}")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


if __name__ == "__main__":
    main()
