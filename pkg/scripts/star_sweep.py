#!/usr/bin/env python3
"""Exhaustive check of star extension on the cubic star gadget with palette [4].

Every leaf carries two outside edges that are uncoloured or coloured
(distinct colours per leaf).  Star extension must succeed exactly when
exhaustive search finds an extension.
"""

import argparse
import itertools
from collections import Counter

from edgecolor.extension import NoExtension, PartialEdgeColoring, brute_force_extension_exists, extend_star
from edgecolor.graph import star_gadget


def leaf_options(palette):
    vals = [None] + list(range(1, palette + 1))
    return [(a, b) for a, b in itertools.product(vals, vals) if a is None or b is None or a != b]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show", type=int, default=5, help="print this many non-extendable configurations")
    args = ap.parse_args(argv)

    g = star_gadget(3)
    root = [(0, 1), (0, 2), (0, 3)]
    stats = Counter()
    stuck = []
    for choice in itertools.product(leaf_options(4), repeat=3):
        colors = {}
        for leaf, pair in zip((1, 2, 3), choice):
            for p, c in zip((2 + 2 * leaf, 3 + 2 * leaf), pair):
                if c is not None:
                    colors[(leaf, p)] = c
        phi = PartialEdgeColoring(4, colors)
        exists, _ = brute_force_extension_exists(g, phi, root)
        try:
            extend_star(g, phi, 0)
            got = True
        except NoExtension:
            got = False
        stats["agree" if got == exists else "disagree"] += 1
        stats["extendable" if exists else "stuck"] += 1
        if not exists:
            stuck.append(choice)
    print(dict(stats))
    for choice in stuck[: args.show]:
        print("no extension:", choice)


if __name__ == "__main__":
    main()
