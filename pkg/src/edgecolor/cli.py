"""``edgecolor`` command line: gen, run, verify, bench.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .extension import BudgetExceeded
from .graph import MODELS, GeneratorSpec, GraphError, generate, read_edge_list, write_edge_list
from .pipeline import (
    PHASES,
    VARIANTS,
    InfeasibleInstance,
    PipelineConfig,
    PipelineFailure,
    read_coloring,
    run_pipeline,
    summary_line,
    write_coloring,
)
from .sim import RoundBudgetExceeded
from .verify import check_proper_coloring

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

#: bench CSV columns, in order
CSV_COLUMNS = ("n", "delta", "variant", "seed", "totalRounds", *PHASES, "fallbacks", "colorsUsed", "check")


def _model(name: str, girth_min: int | None) -> str:
    if name == "regular":
        return "regular-high-girth" if girth_min else "regular-random"
    return name


def _config(args) -> PipelineConfig:
    return PipelineConfig(variant=args.variant, seed=args.seed, leaf_threshold=args.leaf_threshold,
                          max_rounds=args.max_rounds, fallback=not args.no_fallback, delta0=args.delta0)


def cmd_gen(args) -> int:
    spec = GeneratorSpec(_model(args.model, args.girth_min), n=args.n, d=args.d, girth_min=args.girth_min,
                         seed=args.seed, radius=args.radius)
    g = generate(spec)
    write_edge_list(g, args.out)
    print(json.dumps({"n": g.n, "m": g.m, "delta": g.max_degree(), "out": str(args.out)}))
    return EXIT_OK


def cmd_run(args) -> int:
    g = read_edge_list(args.infile)
    res = run_pipeline(g, _config(args))
    if args.out_coloring:
        write_coloring(res.coloring, args.out_coloring)
    if args.out_trace:
        res.trace.write(args.out_trace)
    rep = check_proper_coloring(g, res.coloring, max(2 * g.max_degree() - 2, 0), total=True)
    print(summary_line(g, res))
    if not rep.passed:
        print(f"verification failed: {rep.counterexample}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_edge_list(args.infile)
    palette = args.palette if args.palette is not None else max(2 * g.max_degree() - 2, 0)
    phi = read_coloring(args.coloring, palette)
    rep = check_proper_coloring(g, phi, palette, total=True)
    print(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_VERIFY


def bench_rows(d: int, n_list, variant: str, seeds: int, seed_base: int = 0, girth_min: int = 6,
               model: str = "regular", delta0: int = 6):
    for n in n_list:
        for i in range(seeds):
            seed = seed_base + i
            g = generate(GeneratorSpec(_model(model, girth_min), n=n, d=d, girth_min=girth_min, seed=seed))
            res = run_pipeline(g, PipelineConfig(variant=variant, seed=seed, delta0=delta0))
            phases = res.trace.by_phase()
            yield {"n": n, "delta": g.max_degree(), "variant": variant, "seed": seed,
                   "totalRounds": res.trace.total, **{p: phases.get(p, 0) for p in PHASES},
                   "fallbacks": len(res.fallbacks), "colorsUsed": len(set(res.coloring.colors.values())),
                   "check": int(res.details.get("check", False))}


def cmd_bench(args) -> int:
    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv != "-" else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in bench_rows(args.d, args.n_list, args.variant, args.seeds, args.seed_base,
                              args.girth_min, args.model, args.delta0):
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-list {text!r}") from exc
    if not vals or min(vals) <= 0:
        raise argparse.ArgumentTypeError("n-list needs positive integers")
    return vals


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edgecolor", description="(2Δ-2)-edge colouring toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance as an edge list")
    g.add_argument("--model", required=True, choices=sorted(MODELS + ("regular",)))
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--girth-min", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--radius", type=int, default=4, help="tree radius for planted-trees")
    g.add_argument("--out", required=True, type=Path)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="colour an edge list")
    r.add_argument("--in", dest="infile", required=True, type=Path)
    r.add_argument("--variant", required=True, choices=VARIANTS)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out-coloring", type=Path)
    r.add_argument("--out-trace", type=Path)
    r.add_argument("--leaf-threshold", type=_positive, default=None)
    r.add_argument("--max-rounds", type=_positive, default=10**9)
    r.add_argument("--delta0", type=int, default=6)
    r.add_argument("--no-fallback", action="store_true")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check a colouring against a graph")
    v.add_argument("--in", dest="infile", required=True, type=Path)
    v.add_argument("--coloring", required=True, type=Path)
    v.add_argument("--palette", type=int, default=None, help="defaults to 2Δ-2")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="round counts over a range of n as CSV")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--n-list", type=_n_list, required=True, help="e.g. 256,512,1024")
    b.add_argument("--variant", required=True, choices=VARIANTS)
    b.add_argument("--seeds", type=_positive, default=1, help="seeds per n")
    b.add_argument("--seed-base", type=int, default=0)
    b.add_argument("--girth-min", type=int, default=6)
    b.add_argument("--model", default="regular", choices=sorted(MODELS + ("regular",)))
    b.add_argument("--delta0", type=int, default=6)
    b.add_argument("--csv", default="-")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.variant == "rand" and args.seed is None:
        parser.error("--seed is required for the rand variant")
    try:
        return args.func(args)
    except (RoundBudgetExceeded, BudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GraphError, InfeasibleInstance, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
