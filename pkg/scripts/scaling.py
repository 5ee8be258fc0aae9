#!/usr/bin/env python3
"""Round counts per phase over n = 2^lo .. 2^hi, with a log2(n) fit of the totals."""

import argparse
import csv
import statistics
import sys

import numpy as np

from edgecolor.cli import CSV_COLUMNS, bench_rows
from edgecolor.pipeline import PHASES


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--lo", type=int, default=8)
    ap.add_argument("--hi", type=int, default=14)
    ap.add_argument("--seeds", type=int, default=2)
    ap.add_argument("--variants", default="det,rand")
    ap.add_argument("--csv", default=None, help="also write every row here")
    args = ap.parse_args(argv)

    ns = [2 ** k for k in range(args.lo, args.hi + 1)]
    rows = []
    for variant in args.variants.split(","):
        for row in bench_rows(args.d, ns, variant, args.seeds):
            rows.append(row)
            print(f"{variant:>4} n={row['n']:>6} seed={row['seed']} total={row['totalRounds']:>6} "
                  f"hso={row['hso']:>5} check={row['check']}", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(rows)

    for variant in args.variants.split(","):
        mine = [r for r in rows if r["variant"] == variant]
        totals = [max(r["totalRounds"] for r in mine if r["n"] == n) for n in ns]
        a, b = np.polyfit(np.log2(ns), totals, 1)
        print(f"\n{variant}: totals {dict(zip(ns, totals))}")
        print(f"{variant}: fit rounds ~ {a:.2f} * log2(n) + {b:.1f}")
        for ph in PHASES:
            vals = [r[ph] for r in mine]
            print(f"  {ph:<13} median {statistics.median(vals):>7} spread {max(vals) - min(vals)}")


if __name__ == "__main__":
    main()
