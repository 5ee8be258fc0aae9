"""Independent structural checkers.

Nothing here reuses algorithmic code; checkers only rely on the graph
primitives (adjacency, BFS) and recompute everything from scratch.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict, deque
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping

from .graph import Edge, Graph, bfs_distances, canon


@dataclass
class CheckReport:
    name: str
    passed: bool
    counterexample: Any = None
    counts: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> str:
        d = asdict(self)
        d["counterexample"] = repr(self.counterexample) if self.counterexample is not None else None
        return json.dumps(d, sort_keys=True)


def _colors(phi) -> Mapping[Edge, int]:
    return getattr(phi, "colors", phi)


def check_proper_coloring(g: Graph, phi, palette_bound: int | None = None, total: bool = True) -> CheckReport:
    colors = _colors(phi)
    name = "proper-coloring"
    for e, c in colors.items():
        if not g.has_edge(*e):
            return CheckReport(name, False, ("not-an-edge", e))
        if palette_bound is not None and not 1 <= c <= palette_bound:
            return CheckReport(name, False, ("palette", e, c))
    if total:
        for e in g.edges:
            if e not in colors:
                return CheckReport(name, False, ("uncolored", e))
    for v in range(g.n):
        seen: dict[int, Edge] = {}
        for w in g.adj[v]:
            e = canon(v, w)
            c = colors.get(e)
            if c is None:
                continue
            if c in seen:
                return CheckReport(name, False, ("conflict", seen[c], e, c))
            seen[c] = e
    used = set(colors.values())
    return CheckReport(name, True, counts={"colored": len(colors), "palette_used": len(used)})


def _multi_source(g: Graph, sources: Iterable[int], limit: float = math.inf) -> list[float]:
    dist = [math.inf] * g.n
    q = deque()
    for s in sources:
        if dist[s] != 0:
            dist[s] = 0
            q.append(s)
    while q:
        u = q.popleft()
        if dist[u] >= limit:
            continue
        for w in g.adj[u]:
            if dist[w] == math.inf:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def check_ruling_set(g: Graph, members: Iterable[int], alpha: int, beta: int, W: Iterable[int] | None = None) -> CheckReport:
    name = f"ruling-set({alpha},{beta})"
    S = sorted(set(members))
    for s in S:
        d = bfs_distances(g, s, limit=alpha)
        for t in S:
            if t != s and d[t] < alpha:
                return CheckReport(name, False, ("too-close", s, t, d[t]))
    targets = range(g.n) if W is None else W
    dist = _multi_source(g, S, limit=beta)
    for w in targets:
        if dist[w] > beta:
            return CheckReport(name, False, ("undominated", w))
    return CheckReport(name, True, counts={"members": len(S)})


def check_matching(g: Graph, edges: Iterable[Edge], maximal: bool = True) -> CheckReport:
    name = "maximal-matching" if maximal else "matching"
    covered: dict[int, Edge] = {}
    M = [canon(*e) for e in edges]
    for e in M:
        if not g.has_edge(*e):
            return CheckReport(name, False, ("not-an-edge", e))
        for x in e:
            if x in covered:
                return CheckReport(name, False, ("shared-endpoint", covered[x], e))
            covered[x] = e
    if maximal:
        for u, v in g.edges:
            if u not in covered and v not in covered:
                return CheckReport(name, False, ("augmentable", (u, v)))
    return CheckReport(name, True, counts={"size": len(M)})


def check_two_edge_ruling(g: Graph, edges: Iterable[Edge]) -> CheckReport:
    """Members pairwise non-adjacent; every edge within edge-distance 2 of a member.

    Edge-distance is measured in the line graph: adjacent edges are at
    distance 1, edges joined by a third edge at distance 2.
    """
    name = "two-edge-ruling"
    R = sorted({canon(*e) for e in edges})
    touched: dict[int, Edge] = {}
    for e in R:
        if not g.has_edge(*e):
            return CheckReport(name, False, ("not-an-edge", e))
        for x in e:
            if x in touched:
                return CheckReport(name, False, ("adjacent-members", touched[x], e))
            touched[x] = e
    # an edge is within line distance 2 of a member iff one of its endpoints
    # is within vertex distance 1 of a member endpoint
    dist = _multi_source(g, touched.keys(), limit=1)
    for u, v in g.edges:
        if min(dist[u], dist[v]) > 1:
            return CheckReport(name, False, ("undominated", (u, v)))
    return CheckReport(name, True, counts={"size": len(R)})


def check_clustering(g: Graph, cl) -> CheckReport:
    """Partition, root containment N^alpha(r) in C(r), tree validity, radius and diameter."""
    name = f"clustering({cl.alpha},{cl.beta})"
    root_of, parent, depth = cl.root_of, cl.parent, cl.depth
    roots = sorted({r for r in root_of})
    for r in roots:
        if root_of[r] != r or parent[r] != -1 or depth[r] != 0:
            return CheckReport(name, False, ("bad-root", r))
    for v in range(g.n):
        p = parent[v]
        if p == -1:
            if root_of[v] != v:
                return CheckReport(name, False, ("orphan", v))
            continue
        if not g.has_edge(v, p) or root_of[p] != root_of[v] or depth[p] != depth[v] - 1:
            return CheckReport(name, False, ("bad-parent", v, p))
        if depth[v] > cl.beta:
            return CheckReport(name, False, ("too-deep", v, depth[v]))
    forest = {canon(v, parent[v]) for v in range(g.n) if parent[v] != -1}
    if set(map(lambda e: canon(*e), cl.forest_edges)) != forest:
        return CheckReport(name, False, ("forest-mismatch",))
    for r in roots:
        d = bfs_distances(g, r, limit=cl.alpha)
        for v in range(g.n):
            if d[v] <= cl.alpha and root_of[v] != r:
                return CheckReport(name, False, ("ball-not-contained", r, v))
    # tree diameter: two BFS sweeps inside each tree
    members: dict[int, list[int]] = defaultdict(list)
    for v in range(g.n):
        members[root_of[v]].append(v)
    tree_adj: dict[int, list[int]] = defaultdict(list)
    for u, v in forest:
        tree_adj[u].append(v)
        tree_adj[v].append(u)
    diam_max = 0
    for r, vs in members.items():
        far, _ = _tree_far(tree_adj, r)
        _, diam = _tree_far(tree_adj, far)
        if diam > 2 * cl.beta:
            return CheckReport(name, False, ("diameter", r, diam))
        if len(vs) >= 2 and any(not tree_adj[v] for v in vs):
            return CheckReport(name, False, ("isolated-in-tree", r))
        diam_max = max(diam_max, diam)
    return CheckReport(name, True, counts={"clusters": len(roots), "max_tree_diameter": diam_max})


def _tree_far(tree_adj, s):
    dist = {s: 0}
    q = deque([s])
    far = s
    while q:
        u = q.popleft()
        if dist[u] > dist[far]:
            far = u
        for w in tree_adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return far, dist[far]


def check_sinkless(hyperedges: Mapping[Any, Iterable[Any]], winner: Mapping[Any, Any], required: int = 1,
                   group: Mapping[Any, Any] | None = None, vertices: Iterable[Any] | None = None) -> CheckReport:
    """Every (merged) vertex owns at least ``required`` hyperedges.

    ``group`` maps hypergraph vertices (e.g. split halves) to merged vertices.
    """
    name = f"sinkless(k={required})"
    for e, vs in hyperedges.items():
        if e not in winner:
            return CheckReport(name, False, ("unoriented", e))
        if winner[e] not in set(vs):
            return CheckReport(name, False, ("winner-not-incident", e, winner[e]))
    key = (lambda x: group[x]) if group is not None else (lambda x: x)
    out: dict[Any, int] = defaultdict(int)
    for e, w in winner.items():
        out[key(w)] += 1
    if vertices is None:
        vertices = {key(x) for vs in hyperedges.values() for x in vs}
    for v in vertices:
        if out[v] < required:
            return CheckReport(name, False, ("sink", v, out[v]))
    return CheckReport(name, True, counts={"hyperedges": len(winner)})


def layer_boundary_colors(g: Graph, phi, cluster_vertices: Iterable[int], depth, k: int) -> set[int]:
    """phi(N_E(V_k)): colours of coloured edges with exactly one endpoint in layer k."""
    colors = _colors(phi)
    layer = {v for v in cluster_vertices if depth[v] == k}
    out = set()
    for v in layer:
        for w in g.adj[v]:
            if w in layer:
                continue
            c = colors.get(canon(v, w))
            if c is not None:
                out.add(c)
    return out


def check_colorful_condition(g: Graph, phi, cluster_vertices: Iterable[int], depth, delta: int) -> CheckReport:
    name = "colorful-condition"
    vs = list(cluster_vertices)
    layers = sorted({depth[v] for v in vs})
    sizes = {}
    for k in layers:
        sizes[k] = len(layer_boundary_colors(g, phi, vs, depth, k))
        if sizes[k] >= delta:
            return CheckReport(name, True, counts={"layer": k, "colors": sizes[k]})
    return CheckReport(name, False, ("no-colorful-layer", sizes))


def girth(g: Graph) -> float:
    best = math.inf
    for s in range(g.n):
        dist = {s: 0}
        par = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in g.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    par[w] = u
                    q.append(w)
                elif par[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best
