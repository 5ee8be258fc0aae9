"""Clusters around ruling-set roots, their BFS forest, and cluster classification."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .graph import Edge, Graph, canon

EASY_EVEN_CYCLE = "easy-even-cycle"
EASY_LOW_DEGREE = "easy-low-degree"
NEEDS_ASSIGNMENT = "needs-assignment"


class NotDominating(ValueError):
    pass


class InsufficientLeaves(ValueError):
    pass


@dataclass
class Clustering:
    root_of: list[int]
    parent: list[int]
    depth: list[int]
    alpha: int
    beta: int
    _members: dict[int, list[int]] | None = field(default=None, repr=False)

    @property
    def roots(self) -> list[int]:
        return sorted(self.members)

    @property
    def members(self) -> dict[int, list[int]]:
        if self._members is None:
            groups: dict[int, list[int]] = defaultdict(list)
            for v, r in enumerate(self.root_of):
                groups[r].append(v)
            self._members = dict(groups)
        return self._members

    @property
    def forest_edges(self) -> list[Edge]:
        return sorted(canon(v, p) for v, p in enumerate(self.parent) if p != -1)

    def tree_edges(self, root: int) -> list[Edge]:
        return sorted(canon(v, self.parent[v]) for v in self.members[root] if self.parent[v] != -1)

    def children(self, root: int) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = defaultdict(list)
        for v in self.members[root]:
            if self.parent[v] != -1:
                ch[self.parent[v]].append(v)
        return ch


def cluster(g: Graph, roots: Iterable[int], alpha: int = 4, beta: int = 8) -> Clustering:
    """Every vertex joins a closest root; ties go to the smaller root, then the smaller parent."""
    n = g.n
    root_of = [-1] * n
    parent = [-1] * n
    depth = [-1] * n
    layer = sorted(set(roots))
    for r in layer:
        root_of[r] = r
        depth[r] = 0
    d = 0
    while layer:
        best: dict[int, tuple[int, int]] = {}
        for u in layer:
            key = (root_of[u], u)
            for w in g.adj[u]:
                if depth[w] == -1 and (w not in best or key < best[w]):
                    best[w] = key
        d += 1
        for w, (r, p) in best.items():
            root_of[w], parent[w], depth[w] = r, p, d
        layer = sorted(best)
    missing = [v for v in range(n) if root_of[v] == -1]
    if missing:
        raise NotDominating(f"{len(missing)} vertices unreachable from the roots, e.g. {missing[0]}")
    return Clustering(root_of, parent, depth, alpha, beta)


def residual_graph(g: Graph, cl: Clustering) -> Graph:
    return g.without_edges(cl.forest_edges)


def find_even_cycle(g: Graph, vertices: Iterable[int]) -> list[int] | None:
    """An even cycle (as a vertex sequence) inside G[vertices], or None.

    A 2-connected block contains an even cycle unless it is a single odd
    cycle: otherwise an ear attached to an odd cycle splits it into two
    cycles of different parity.
    """
    vs = set(vertices)
    quick = _even_from_bfs(g, vs)
    if quick is not None:
        return quick
    H = nx.Graph()
    H.add_nodes_from(vs)
    H.add_edges_from((u, w) for u in vs for w in g.adj[u] if u < w and w in vs)
    for block in sorted(nx.biconnected_components(H), key=min):
        if len(block) < 3:
            continue
        B = H.subgraph(block)
        cyc = [u for u, _ in nx.find_cycle(B, source=min(block))]
        if len(cyc) % 2 == 0:
            return cyc
        if B.number_of_edges() == B.number_of_nodes():
            continue
        return _even_from_ear(B, cyc)
    return None


def _even_from_bfs(g: Graph, vs: set[int]) -> list[int] | None:
    """A non-tree edge between consecutive BFS levels closes an even cycle through the LCA."""
    parent: dict[int, int] = {}
    depth: dict[int, int] = {}
    for s in sorted(vs):
        if s in depth:
            continue
        parent[s], depth[s] = -1, 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in g.adj[x]:
                if y not in vs:
                    continue
                if y not in depth:
                    parent[y], depth[y] = x, depth[x] + 1
                    q.append(y)
                elif depth[y] == depth[x] - 1 and parent[x] != y:
                    a, b = [x], [y]
                    while a[-1] != b[-1]:
                        if depth[a[-1]] >= depth[b[-1]]:
                            a.append(parent[a[-1]])
                        else:
                            b.append(parent[b[-1]])
                    return a + b[-2::-1]
    return None


def _even_from_ear(B: nx.Graph, cyc: list[int]) -> list[int]:
    on = {v: i for i, v in enumerate(cyc)}
    L = len(cyc)
    cyc_edges = {frozenset((cyc[i], cyc[(i + 1) % L])) for i in range(L)}
    ear = None
    for a in sorted(on):
        for b in sorted(B.adj[a]):
            if frozenset((a, b)) in cyc_edges:
                continue
            if b in on:
                ear = [a, b]
                break
            # walk from b through off-cycle vertices until the cycle is hit again
            prev = {b: a}
            q = deque([b])
            hit = None
            while q and hit is None:
                x = q.popleft()
                for y in sorted(B.adj[x]):
                    if y in prev:
                        continue
                    if y in on:
                        if y != a:
                            prev[y] = x
                            hit = y
                            break
                        continue
                    prev[y] = x
                    q.append(y)
            if hit is not None:
                path = [hit]
                while path[-1] != a:
                    path.append(prev[path[-1]])
                ear = path[::-1]
                break
        if ear:
            break
    assert ear is not None, "a 2-connected block that is not a cycle has an ear"
    x, y = ear[0], ear[-1]
    i, j = on[x], on[y]
    arc1 = [cyc[(i + t) % L] for t in range((j - i) % L + 1)]  # x .. y forward
    arc2 = [cyc[(i - t) % L] for t in range((i - j) % L + 1)]  # x .. y backward
    inner = ear[1:-1]
    for arc in (arc1, arc2):
        cycle = arc + inner[::-1]
        if len(cycle) % 2 == 0:
            return cycle
    raise AssertionError("ear produced no even cycle")


def classify_clusters(g: Graph, cl: Clustering, delta: int | None = None) -> dict[int, str]:
    delta = g.max_degree() if delta is None else delta
    tags = {}
    for r, vs in sorted(cl.members.items()):
        if find_even_cycle(g, vs) is not None:
            tags[r] = EASY_EVEN_CYCLE
        elif any(g.degree(v) < delta for v in vs):
            tags[r] = EASY_LOW_DEGREE
        else:
            tags[r] = NEEDS_ASSIGNMENT
    return tags


def tree_leaves_by_depth(cl: Clustering, root: int) -> dict[int, list[int]]:
    ch = cl.children(root)
    layers: dict[int, list[int]] = defaultdict(list)
    for v in cl.members[root]:
        if v != root and not ch.get(v):
            layers[cl.depth[v]].append(v)
    return {k: sorted(vs) for k, vs in sorted(layers.items())}


def select_proposal_leaves(g: Graph, cl: Clustering, root: int, s: int) -> tuple[int, list[int]]:
    """(depth k, leaves) for the leaf layer with the most leaves; ties go to the smaller depth."""
    layers = tree_leaves_by_depth(cl, root)
    if not layers:
        raise InsufficientLeaves(f"cluster {root} has no leaves")
    k = max(layers, key=lambda d: (len(layers[d]), -d))
    if len(layers[k]) < s:
        raise InsufficientLeaves(f"cluster {root}: best layer {k} has {len(layers[k])} < {s} leaves")
    return k, layers[k]


def default_leaf_threshold(delta: int) -> int:
    return max(2 * delta * delta, 4)
