#!/usr/bin/env python3
"""Run all variants on planted-tree instances, where the hypergraph phase has work to do."""

import argparse
import json

from edgecolor.graph import GeneratorSpec, generate, planted_tree_size
from edgecolor.pipeline import VARIANTS, PipelineConfig, run_pipeline


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, nargs="+", default=[3, 4, 8])
    ap.add_argument("--copies", type=int, default=2, help="number of planted trees")
    ap.add_argument("--girth-min", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=1)
    args = ap.parse_args(argv)

    for d in args.d:
        for seed in range(args.seeds):
            spec = GeneratorSpec("planted-trees", n=args.copies * planted_tree_size(d, 4), d=d,
                                 girth_min=args.girth_min, seed=seed)
            g = generate(spec)
            for variant in VARIANTS:
                res = run_pipeline(g, PipelineConfig(variant=variant, seed=seed, delta0=min(6, d)))
                print(json.dumps({"d": d, "n": g.n, "seed": seed, "variant": variant,
                                  "classes": res.classes,
                                  "hypergraph": res.details.get("hypergraph"),
                                  "rearrangement": res.details.get("rearrangement"),
                                  "hso": res.trace.by_phase().get("hso", 0),
                                  "fallbacks": [f["kind"] for f in res.fallbacks]}, sort_keys=True))


if __name__ == "__main__":
    main()
