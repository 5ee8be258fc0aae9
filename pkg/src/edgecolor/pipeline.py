"""End-to-end (2Δ-2)-edge colouring: clustering, proposals and orientation, switching and extension."""

from __future__ import annotations

import json
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import networkx as nx

from . import clustering as clu
from .extension import (
    BudgetExceeded,
    NoExtension,
    PartialEdgeColoring,
    PreconditionViolation,
    boundary_colors,
    extend_easy_component,
    extend_tree,
    extend_tree_exact,
    switch_colors,
)
from .graph import Edge, Graph, PowerAdjacency, canon
from .hso import (
    DegreeTooSmall,
    PreconditionDegraded,
    build_aux_hypergraph,
    build_proposals,
    rearrange_matching,
    solve_hso_det,
    solve_hso_rand,
    split_vertices,
)
from .sim import RoundBudgetExceeded, RoundTrace
from .symmetry import (
    PowerOracle,
    ValidityCheckFailed,
    greedy_list_edge_coloring,
    maximal_matching,
    power_ruling_set,
    two_edge_ruling_set,
)
from .verify import check_clustering, check_matching, check_proper_coloring, check_ruling_set, check_sinkless

VARIANTS = ("mis", "det", "rand")
POWER = 8
PHASES = ("ruling-set", "cluster", "greedy", "classify", "edge-targets", "hso", "rearrange", "switch", "extend")


class InfeasibleInstance(ValueError):
    pass


class PipelineFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    variant: str = "det"
    seed: int | None = None
    leaf_threshold: int | None = None
    max_rounds: int = 10**9
    fallback: bool = True
    delta0: int = 6
    retries: int = 3
    inject_ruling_failures: int = 0
    inject_hso_failures: int = 0
    check: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.variant == "rand" and self.seed is None:
            raise ValueError("the rand variant needs an explicit seed")
        if self.max_rounds <= 0 or self.retries < 0:
            raise ValueError("budgets must be positive")


@dataclass
class PipelineResult:
    coloring: PartialEdgeColoring
    trace: RoundTrace
    fallbacks: list[dict] = field(default_factory=list)
    classes: dict[str, int] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def summary(self, g: Graph) -> dict:
        return {
            "n": g.n,
            "m": g.m,
            "delta": g.max_degree(),
            "palette": self.coloring.palette,
            "colorsUsed": len(set(self.coloring.colors.values())),
            "rounds": self.trace.by_phase(),
            "totalRounds": self.trace.total,
            "fallbacks": [f["kind"] for f in self.fallbacks],
            "classes": self.classes,
        }


def _charge(trace: RoundTrace, phase: str, rounds: int, budget: int, overhead: int = 1, **measured) -> None:
    if rounds * overhead > budget:
        raise RoundBudgetExceeded(f"phase {phase} needs {rounds * overhead} rounds > budget {budget}")
    trace.add(phase, rounds, overhead, **measured)


# ---------------------------------------------------------------------------
# small degree


def _components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s] or not g.adj[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(sorted(comp))
    return out


def _backtrack(g: Graph, edges: list[Edge], palette: int, budget: int) -> dict[Edge, int] | None:
    """DSATUR-ordered exhaustive search over the given edges."""
    nbrs = {e: g.edge_neighbors(e) for e in edges}
    col: dict[Edge, int] = {}
    steps = [0]

    def pick():
        best, key = None, None
        for e in edges:
            if e in col:
                continue
            sat = len({col[f] for f in nbrs[e] if f in col})
            k = (-sat, -len(nbrs[e]), e)
            if key is None or k < key:
                best, key = e, k
        return best

    def rec():
        e = pick()
        if e is None:
            return True
        steps[0] += 1
        if steps[0] > budget:
            raise BudgetExceeded("backtracking budget exhausted")
        used = {col[f] for f in nbrs[e] if f in col}
        for c in range(1, palette + 1):
            if c not in used:
                col[e] = c
                if rec():
                    return True
                del col[e]
        return False

    return dict(col) if rec() else None


def _kempe_color(g: Graph, edges: list[Edge], palette: int) -> dict[Edge, int]:
    """Sequential colouring; a blocked edge is freed by swapping a two-coloured alternating path."""
    at: dict[int, dict[int, int]] = defaultdict(dict)  # vertex -> colour -> other endpoint
    col: dict[Edge, int] = {}

    def missing(x):
        return [c for c in range(1, palette + 1) if c not in at[x]]

    def chain(start, a, b):
        path, x, c = [], start, a
        while c in at[x]:
            y = at[x][c]
            path.append(canon(x, y))
            x, c = y, (b if c == a else a)
        return path, x

    def swap(path, a, b):
        for e in path:
            c = col[e]
            del at[e[0]][c], at[e[1]][c]
        for e in path:
            c = b if col[e] == a else a
            col[e] = c
            at[e[0]][c] = e[1]
            at[e[1]][c] = e[0]

    def put(e, c):
        col[e] = c
        at[e[0]][c] = e[1]
        at[e[1]][c] = e[0]

    for e in edges:
        u, v = e
        mu, mv = missing(u), missing(v)
        common = [c for c in mu if c in mv]
        if common:
            put(e, common[0])
            continue
        done = False
        for a in mu:
            for b in mv:
                for x, first, second, other in ((v, a, b, u), (u, b, a, v)):
                    path, end = chain(x, first, second)
                    if end == other:
                        continue
                    swap(path, first, second)
                    put(e, first)
                    done = True
                    break
                if done:
                    break
            if done:
                break
        if not done:
            raise BudgetExceeded(f"no Kempe swap frees edge {e}")
    return col


def small_delta_fallback(g: Graph, exact_limit: int = 24, budget: int = 200_000) -> PartialEdgeColoring:
    """Proper colouring with 2Δ-2 colours, component by component."""
    delta = g.max_degree()
    palette = 2 * delta - 2
    phi = PartialEdgeColoring(max(palette, 0))
    for comp in _components(g):
        edges = g.subgraph_edges(comp)
        if delta <= 2:
            phi.colors.update(_path_cycle(g, comp, edges, palette))
            continue
        if len(edges) <= exact_limit:
            sol = _backtrack(g, edges, palette, budget)
            if sol is None:
                raise InfeasibleInstance(f"component at {comp[0]} is not {palette}-edge-colourable")
        else:
            sol = _kempe_color(g, edges, palette)
        phi.colors.update(sol)
    return phi


def _path_cycle(g: Graph, comp: list[int], edges: list[Edge], palette: int) -> dict[Edge, int]:
    if palette < 2 and edges:
        raise InfeasibleInstance("maximum degree 1 leaves no colours (2Δ-2 = 0)")
    if len(edges) == len(comp) and len(comp) % 2:
        raise InfeasibleInstance(f"odd cycle of length {len(comp)} needs 3 colours")
    sub = PartialEdgeColoring(palette)
    out, _ = extend_easy_component(g, sub, comp, edges, delta=2)
    return out.colors


# ---------------------------------------------------------------------------
# main flow


def _ruling_set(g: Graph, cfg: PipelineConfig, trace: RoundTrace, fallbacks: list, pa: PowerAdjacency | None):
    oracle = PowerOracle(g, POWER, pa)
    attempt = 0
    while True:
        try:
            seed = (cfg.seed or 0) + 1_000_003 * attempt
            rs = power_ruling_set(oracle, cfg.variant, seed=seed,
                                  fail_first=1 if attempt < cfg.inject_ruling_failures else 0)
            if cfg.check:
                rep = check_ruling_set(g, rs.members, POWER + 1, POWER * rs.beta)
                if not rep.passed:
                    raise ValidityCheckFailed(f"ruling set rejected: {rep.counterexample}")
            break
        except ValidityCheckFailed as exc:
            attempt += 1
            fallbacks.append({"kind": "ruling-set-retry", "attempt": attempt, "reason": str(exc)})
            if attempt > cfg.retries:
                raise
    _charge(trace, "ruling-set", rs.rounds // POWER, cfg.max_rounds, POWER,
            members=len(rs.members), beta=rs.beta, attempts=attempt + 1, **rs.measured)
    return rs


def run_pipeline(g: Graph, cfg: PipelineConfig) -> PipelineResult:
    t0 = time.perf_counter()
    delta = g.max_degree()
    trace = RoundTrace()
    fallbacks: list[dict] = []
    if delta < max(cfg.delta0, 3):
        phi = small_delta_fallback(g)
        trace.add("small-delta-fallback", 0, 1, delta=delta)
        fallbacks.append({"kind": "small-delta", "delta": delta})
        res = PipelineResult(phi, trace, fallbacks, {}, {})
        _final_check(g, res, cfg)
        return res

    top = 2 * delta - 2
    # Phase 1 -------------------------------------------------------------
    rs = _ruling_set(g, cfg, trace, fallbacks, None)
    cl = clu.cluster(g, rs.members, alpha=POWER // 2, beta=POWER * rs.beta)
    if cfg.check:
        rep = check_clustering(g, cl)
        if not rep.passed:
            raise PipelineFailure(f"clustering rejected: {rep.counterexample}")
    beta = cl.beta
    _charge(trace, "cluster", beta, cfg.max_rounds, measured_depth=max(cl.depth), clusters=len(cl.members))
    res_g = clu.residual_graph(g, cl)
    if all(len(vs) >= 2 for vs in cl.members.values()) and res_g.max_degree() > delta - 1:
        raise PipelineFailure("residual graph degree exceeds Δ-1")
    colors0, greedy_rounds = greedy_list_edge_coloring(res_g, palette=2 * delta - 3)
    _charge(trace, "greedy", greedy_rounds, cfg.max_rounds)
    phi = PartialEdgeColoring(top, dict(colors0))

    # Phase 2 -------------------------------------------------------------
    tags = clu.classify_clusters(g, cl, delta)
    _charge(trace, "classify", beta, cfg.max_rounds)
    classes = defaultdict(int)
    for t in tags.values():
        classes[t] += 1
    needs = [r for r, t in sorted(tags.items()) if t == clu.NEEDS_ASSIGNMENT]
    details: dict = {"clusters": len(tags), "needs_assignment": len(needs)}
    assigned: dict[int, list[tuple[Edge, int]]] = {}
    leaf_depth: dict[int, int] = {}
    overhead = 2 * beta + 1
    if needs:
        assigned, leaf_depth = _phase2(g, res_g, cl, needs, delta, cfg, trace, fallbacks, details, overhead)
    else:
        for ph, r in (("edge-targets", 0), ("hso", 0), ("rearrange", 0)):
            _charge(trace, ph, r, cfg.max_rounds, overhead if ph == "hso" else 1)

    # Phase 3 -------------------------------------------------------------
    pre = phi.copy()
    switched = []
    ready = []
    for r in needs:
        pair = assigned.get(r, [])
        if len(pair) < 2:
            continue
        k = leaf_depth[r]
        Vk = [v for v in cl.members[r] if cl.depth[v] == k]
        try:
            _, e = switch_colors(g, pre, Vk, (pair[0][0], pair[1][0]), delta, leaves=[pair[0][1], pair[1][1]])
        except PreconditionViolation as exc:
            fallbacks.append({"kind": "switch-precondition", "cluster": r, "reason": str(exc)})
            continue
        if e is not None:
            switched.append(e)
        ready.append(r)
    for e in switched:
        phi.colors[e] = top
    _charge(trace, "switch", 1 if needs else 0, cfg.max_rounds, overhead, switched=len(switched))
    colorful_ok = 0
    for r in sorted(tags):
        vs = cl.members[r]
        tree = cl.tree_edges(r)
        if tags[r] != clu.NEEDS_ASSIGNMENT:
            inner = g.subgraph_edges(vs)
            phi.uncolor(inner)
            phi, _ = extend_easy_component(g, phi, vs, inner, delta)
            continue
        if r in ready:
            try:
                phi, info = extend_tree(g, phi, r, tree, delta)
                colorful_ok += 1
                if info["fallback"]:
                    fallbacks.append({"kind": "tree-dp", "cluster": r})
                continue
            except (PreconditionViolation, NoExtension) as exc:
                fallbacks.append({"kind": "not-colorful", "cluster": r, "reason": str(exc)})
        if not cfg.fallback:
            raise PipelineFailure(f"cluster {r} needs a fallback but fallbacks are disabled")
        phi = _cluster_fallback(g, phi, cl, r, delta, fallbacks)
    details["colorful_clusters"] = colorful_ok
    _charge(trace, "extend", 1, cfg.max_rounds, overhead)
    trace.wall_time["pipeline"] = time.perf_counter() - t0
    result = PipelineResult(phi, trace, fallbacks, dict(classes), details)
    _final_check(g, result, cfg)
    return result


def _phase2(g, res_g, cl, needs, delta, cfg, trace, fallbacks, details, overhead):
    s = cfg.leaf_threshold if cfg.leaf_threshold is not None else clu.default_leaf_threshold(delta)
    leaves: dict[int, list[int]] = {}
    leaf_depth: dict[int, int] = {}
    for r in needs:
        try:
            k, S = clu.select_proposal_leaves(g, cl, r, s)
            leaves[r], leaf_depth[r] = S, k
        except clu.InsufficientLeaves as exc:
            fallbacks.append({"kind": "insufficient-leaves", "cluster": r, "reason": str(exc)})
    if cfg.variant == "mis":
        targets = maximal_matching(res_g)
        hops = 1
        if cfg.check and not check_matching(res_g, targets.edges).passed:
            raise PipelineFailure("maximal matching rejected")
    else:
        targets = two_edge_ruling_set(res_g)
        hops = 2
    _charge(trace, "edge-targets", targets.rounds, cfg.max_rounds, kind=targets.kind, size=len(targets.edges))
    proposers = [v for S in leaves.values() for v in S]
    assigned: dict[int, list] = {}
    if not proposers:
        _charge(trace, "hso", 0, cfg.max_rounds, overhead)
        _charge(trace, "rearrange", 0, cfg.max_rounds)
        return assigned, leaf_depth
    proposals = build_proposals(res_g, proposers, targets.edges, hops)
    h, who = build_aux_hypergraph(proposals, cl.root_of)
    gate = h.gate()
    details["hypergraph"] = {"vertices": len(h.vertices), "edges": len(h.edges), "min_degree": gate["delta"],
                             "max_rank": gate["rank"], "gate_ok": gate["ok"], "rand_gate": gate["rand_gate"],
                             "targets": targets.kind, "rank_bound": 2 * delta}
    if not gate["ok"]:
        fallbacks.append({"kind": "precondition-degraded", "min_degree": gate["delta"], "max_rank": gate["rank"]})
    low = [c for c in h.vertices if h.degree(c) < 2]
    for c in low:
        fallbacks.append({"kind": "degree-too-small", "cluster": c})
    if low:
        keep = {v: p for v, p in proposals.items() if cl.root_of[v] not in set(low)}
        h, who = build_aux_hypergraph(keep, cl.root_of)
    if not h.vertices:
        _charge(trace, "hso", 0, cfg.max_rounds, overhead)
        _charge(trace, "rearrange", 0, cfg.max_rounds)
        return assigned, leaf_depth
    hs, group = split_vertices(h)
    orient = None
    attempt = 0
    try:
        while orient is None:
            try:
                if cfg.variant == "rand":
                    orient = solve_hso_rand(hs, (cfg.seed or 0) + 7919 * attempt, cfg.max_rounds,
                                            fail=attempt < cfg.inject_hso_failures)
                else:
                    orient = solve_hso_det(hs, cfg.max_rounds)
            except ValidityCheckFailed as exc:
                attempt += 1
                fallbacks.append({"kind": "hso-retry", "attempt": attempt, "reason": str(exc)})
                if attempt > cfg.retries:
                    raise
    except PreconditionDegraded as exc:
        fallbacks.append({"kind": "hso-unsolvable", "reason": str(exc)})
        _charge(trace, "hso", 0, cfg.max_rounds, overhead)
        _charge(trace, "rearrange", 0, cfg.max_rounds)
        return assigned, leaf_depth
    if orient.repairs:
        fallbacks.append({"kind": "hso-repair", "count": orient.repairs})
    rep = check_sinkless(hs.edges, orient.winner, required=2, group=group, vertices=h.vertices)
    if not rep.passed:
        raise PipelineFailure(f"orientation rejected: {rep.counterexample}")
    _charge(trace, "hso", 2 * orient.iterations, cfg.max_rounds, overhead,
            iterations=orient.iterations, repairs=orient.repairs, attempts=attempt + 1)
    rearr = rearrange_matching(res_g, targets.edges, orient, proposals, who, group)
    _charge(trace, "rearrange", hops + 1, cfg.max_rounds)
    ok_m = check_matching(res_g, rearr.matching, maximal=False).passed
    owners = {c: len(v) for c, v in rearr.assigned.items()}
    details["rearrangement"] = {"matching_ok": ok_m, "clusters": len(h.vertices),
                                "clusters_with_two": sum(1 for c in h.vertices if owners.get(c, 0) >= 2)}
    assigned = rearr.assigned
    return assigned, leaf_depth


def _cluster_fallback(g: Graph, phi: PartialEdgeColoring, cl, r: int, delta: int, fallbacks: list) -> PartialEdgeColoring:
    """Sequential repair for one cluster: grab a switchable pair, else exact tree DP."""
    tree = cl.tree_edges(r)
    layers = clu.tree_leaves_by_depth(cl, r)
    for k in sorted(layers, key=lambda d: -len(layers[d])):
        Vk = [v for v in cl.members[r] if cl.depth[v] == k]
        if len(boundary_colors(g, phi, Vk)) >= delta:
            try:
                out, _ = extend_tree(g, phi, r, tree, delta)
                fallbacks.append({"kind": "sequential-colorful", "cluster": r})
                return out
            except (PreconditionViolation, NoExtension):
                break
        cand = [(canon(u, w), u) for u in layers[k] for w in g.adj[u]
                if canon(u, w) in phi.colors and canon(u, w) not in set(tree)]
        for i, (e1, u1) in enumerate(cand):
            for e2, u2 in cand[i + 1:]:
                if set(e1) & set(e2):
                    continue
                try:
                    trial, _ = switch_colors(g, phi, Vk, (e1, e2), delta, leaves=[u1, u2])
                    out, _ = extend_tree(g, trial, r, tree, delta)
                except (PreconditionViolation, NoExtension):
                    continue
                fallbacks.append({"kind": "sequential-switch", "cluster": r})
                return out
            break
    try:
        out = extend_tree_exact(g, phi, r, tree)
        fallbacks.append({"kind": "tree-dp", "cluster": r})
        return out
    except NoExtension as exc:
        raise PipelineFailure(f"cluster {r}: no extension found") from exc


def _final_check(g: Graph, res: PipelineResult, cfg: PipelineConfig) -> None:
    rep = check_proper_coloring(g, res.coloring, res.coloring.palette, total=True)
    res.details["check"] = rep.passed
    if not rep.passed:
        raise PipelineFailure(f"final colouring rejected: {rep.counterexample}")


def run_mis_variant(g: Graph, cfg: PipelineConfig | None = None) -> PipelineResult:
    return run_pipeline(g, _with(cfg, "mis"))


def run_det_variant(g: Graph, cfg: PipelineConfig | None = None) -> PipelineResult:
    return run_pipeline(g, _with(cfg, "det"))


def run_rand_variant(g: Graph, cfg: PipelineConfig | None = None) -> PipelineResult:
    return run_pipeline(g, _with(cfg, "rand"))


def _with(cfg: PipelineConfig | None, variant: str) -> PipelineConfig:
    from dataclasses import replace
    if cfg is None:
        return PipelineConfig(variant=variant, seed=0 if variant == "rand" else None)
    return replace(cfg, variant=variant)


# ---------------------------------------------------------------------------
# files


def write_coloring(phi: PartialEdgeColoring, path) -> None:
    lines = [f"{u} {v} {c}" for (u, v), c in sorted(phi.colors.items())]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="ascii")


def read_coloring(path, palette: int | None = None) -> PartialEdgeColoring:
    from .graph import ParseError
    colors = {}
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    for ln in text.splitlines():
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(f"malformed colouring line {ln!r}")
        try:
            u, v, c = map(int, parts)
        except ValueError as exc:
            raise ParseError(f"malformed colouring line {ln!r}") from exc
        colors[canon(u, v)] = c
    return PartialEdgeColoring(palette if palette is not None else max(colors.values(), default=0), colors)


def summary_line(g: Graph, res: PipelineResult) -> str:
    return json.dumps(res.summary(g), sort_keys=True)
