"""Extending partial edge colourings to stars, trees and degree-choosable components."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .clustering import find_even_cycle
from .graph import Edge, Graph, bfs_distances, canon


class NoExtension(ValueError):
    pass


class InvariantBroken(AssertionError):
    pass


class PreconditionViolation(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class PartialEdgeColoring:
    palette: int
    colors: dict[Edge, int] = field(default_factory=dict)

    def copy(self) -> "PartialEdgeColoring":
        return PartialEdgeColoring(self.palette, dict(self.colors))

    def get(self, e: Edge) -> int | None:
        return self.colors.get(e)

    def __getitem__(self, e: Edge) -> int:
        return self.colors[e]

    def __setitem__(self, e: Edge, c: int) -> None:
        self.colors[canon(*e)] = c

    def uncolor(self, edges: Iterable[Edge]) -> None:
        for e in edges:
            self.colors.pop(canon(*e), None)

    def __contains__(self, e) -> bool:
        return e in self.colors


def available_colors(g: Graph, phi: PartialEdgeColoring, e: Edge) -> set[int]:
    used = {phi.colors[f] for f in g.edge_neighbors(e) if f in phi.colors}
    return set(range(1, phi.palette + 1)) - used


def _min_available(g: Graph, phi: PartialEdgeColoring, e: Edge, avoid: set[int] = frozenset()) -> int | None:
    used = {phi.colors[f] for f in g.edge_neighbors(e) if f in phi.colors}
    for c in range(1, phi.palette + 1):
        if c not in used and c not in avoid:
            return c
    return None


def boundary_colors(g: Graph, phi: PartialEdgeColoring, layer: Iterable[int]) -> set[int]:
    """phi(N_E(W)) for a vertex set W: colours on edges with exactly one endpoint in W."""
    W = set(layer)
    out = set()
    for v in W:
        for w in g.adj[v]:
            if w not in W:
                c = phi.colors.get(canon(v, w))
                if c is not None:
                    out.add(c)
    return out


# ---------------------------------------------------------------------------
# bipartite matching


def saturating_matching(left: Sequence, options: Mapping) -> dict | None:
    """Left-saturating matching by augmenting paths (Kuhn); ``options[x]`` is tried in order."""
    match_right: dict = {}

    def augment(x, seen) -> bool:
        for c in options[x]:
            if c in seen:
                continue
            seen.add(c)
            if c not in match_right or augment(match_right[c], seen):
                match_right[c] = x
                return True
        return False

    for x in left:
        if not augment(x, set()):
            return None
    return {x: c for c, x in match_right.items()}


def extend_star(g: Graph, phi: PartialEdgeColoring, center: int, edges: Iterable[Edge] | None = None) -> PartialEdgeColoring:
    """Colour the uncoloured edges at ``center`` via a saturating matching into available colours."""
    if edges is None:
        edges = [canon(center, w) for w in g.adj[center] if canon(center, w) not in phi.colors]
    edges = sorted(canon(*e) for e in edges)
    if not edges:
        return phi.copy()
    opts = {e: sorted(available_colors(g, phi, e)) for e in edges}
    m = saturating_matching(edges, opts)
    if m is None:
        raise NoExtension(f"Hall's condition fails at star {center}")
    out = phi.copy()
    out.colors.update(m)
    return out


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class LayerView:
    root: int
    depth: dict[int, int]
    parent: dict[int, int]
    layers: dict[int, list[int]]       # V_k
    edge_layers: dict[int, list[Edge]]  # E_k: tree edges between V_k and V_{k+1}

    @classmethod
    def build(cls, root: int, tree_edges: Iterable[Edge]) -> "LayerView":
        adj: dict[int, list[int]] = defaultdict(list)
        for u, v in tree_edges:
            adj[u].append(v)
            adj[v].append(u)
        depth = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            x = q.popleft()
            for y in sorted(adj[x]):
                if y not in depth:
                    depth[y] = depth[x] + 1
                    parent[y] = x
                    q.append(y)
        if len(depth) != len(adj) and adj:
            raise PreconditionViolation("tree edges are not connected to the root")
        layers: dict[int, list[int]] = defaultdict(list)
        edge_layers: dict[int, list[Edge]] = defaultdict(list)
        for v, d in depth.items():
            layers[d].append(v)
            if parent[v] != -1:
                edge_layers[d - 1].append(canon(v, parent[v]))
        return cls(root, depth, parent,
                   {k: sorted(v) for k, v in layers.items()},
                   {k: sorted(v) for k, v in edge_layers.items()})

    def child_end(self, e: Edge) -> int:
        u, v = e
        return u if self.depth[u] > self.depth[v] else v


def extend_tree_exact(g: Graph, phi: PartialEdgeColoring, root: int, tree_edges: Iterable[Edge]) -> PartialEdgeColoring:
    """Exact list colouring of the uncoloured tree edges by bottom-up feasibility sets."""
    view = LayerView.build(root, tree_edges)
    children: dict[int, list[int]] = defaultdict(list)
    for v, p in view.parent.items():
        if p != -1:
            children[p].append(v)
    lists = {}
    for v, p in view.parent.items():
        if p != -1:
            e = canon(v, p)
            lists[v] = sorted(available_colors(g, phi, e))
    feasible: dict[int, list[int]] = {}
    order = sorted(view.depth, key=lambda v: -view.depth[v])
    for v in order:
        if v == root:
            continue
        ok = []
        for c in lists[v]:
            kids = children.get(v, [])
            opts = {k: [x for x in feasible[k] if x != c] for k in kids}
            if saturating_matching(kids, opts) is not None:
                ok.append(c)
        feasible[v] = ok
    out = phi.copy()
    kids = children.get(root, [])
    m = saturating_matching(kids, {k: feasible[k] for k in kids})
    if m is None:
        raise NoExtension(f"tree at {root} admits no extension")
    q = deque()
    for k, c in m.items():
        out.colors[canon(k, root)] = c
        q.append(k)
    while q:
        v = q.popleft()
        c = out.colors[canon(v, view.parent[v])]
        kids = children.get(v, [])
        m = saturating_matching(kids, {k: [x for x in feasible[k] if x != c] for k in kids})
        if m is None:
            raise InvariantBroken("feasibility sets inconsistent")
        for k, ck in m.items():
            out.colors[canon(k, v)] = ck
            q.append(k)
    return out


def _color_layer_colorful(g: Graph, phi: PartialEdgeColoring, view: LayerView, k: int, delta: int,
                          pair: tuple[Edge, Edge]) -> bool:
    """Colour E_k so that |phi(N_E(V_k))| >= delta, using the two-edge argument around ``pair``."""
    e1, e2 = pair
    Vk = view.layers[k]
    special = set(e1) | set(e2)
    Ek = view.edge_layers[k]
    for e in Ek:
        if e in (e1, e2) or set(e) & special:
            continue
        c = _min_available(g, phi, e)
        if c is None:
            return False
        phi.colors[e] = c
    S = boundary_colors(g, phi, Vk)
    if len(S) < delta:
        for e in (e1, e2):
            c = _min_available(g, phi, e, avoid=S)
            if c is not None:
                phi.colors[e] = c
                break
    for e in Ek:
        if e not in phi.colors:
            c = _min_available(g, phi, e)
            if c is None:
                return False
            phi.colors[e] = c
    return len(boundary_colors(g, phi, Vk)) >= delta


def colorful_layers(g: Graph, phi: PartialEdgeColoring, view: LayerView, delta: int) -> list[int]:
    return [k for k in sorted(view.layers) if k >= 1 and len(boundary_colors(g, phi, view.layers[k])) >= delta]


def extend_tree(g: Graph, phi: PartialEdgeColoring, root: int, tree_edges: Iterable[Edge], delta: int,
                ell: int | None = None, max_pairs: int = 24) -> tuple[PartialEdgeColoring, dict]:
    """Extend ``phi`` to the tree edges given a colourful layer ``ell``.

    Layers at or beyond ``ell`` take minimum available colours, layers
    between 1 and ``ell-1`` keep the colourful condition alive, and the
    root star is finished by a saturating matching.  If a layer step fails
    (the two-edge argument needs large Δ) the exact tree DP takes over.
    Returns the extension and an info dict (``fallback`` flag).
    """
    tree_edges = sorted(canon(*e) for e in tree_edges)
    for e in tree_edges:
        if e in phi.colors:
            raise PreconditionViolation(f"tree edge {e} already coloured")
    view = LayerView.build(root, tree_edges)
    if ell is None:
        cands = colorful_layers(g, phi, view, delta)
        if not cands:
            raise PreconditionViolation("no layer satisfies the colourful condition")
        ell = cands[-1]
    elif len(boundary_colors(g, phi, view.layers.get(ell, []))) < delta:
        raise PreconditionViolation(f"layer {ell} is not colourful")
    info = {"ell": ell, "fallback": False}
    out = phi.copy()
    try:
        for k in sorted(view.edge_layers, reverse=True):
            if k < max(ell, 1):
                break
            for e in view.edge_layers[k]:
                c = _min_available(g, out, e)
                if c is None:
                    raise NoExtension("greedy layer step failed")
                out.colors[e] = c
        for k in range(min(ell, max(view.edge_layers, default=0) + 1) - 1, 0, -1):
            Ek = view.edge_layers.get(k, [])
            if not Ek:
                continue
            up = set(view.layers[k + 1])
            plus = {e: frozenset(c for f in g.edge_neighbors(e)
                                 for c in [out.colors.get(f)] if c is not None
                                 and (f[0] in up) != (f[1] in up)) for e in Ek}
            pairs = [(a, b) for i, a in enumerate(Ek) for b in Ek[i + 1:] if plus[a] != plus[b]]
            if not pairs:
                pairs = [(Ek[0], Ek[-1])]
            done = False
            for pair in pairs[:max_pairs]:
                trial = out.copy()
                if _color_layer_colorful(g, trial, view, k, delta, pair):
                    out = trial
                    done = True
                    break
            if not done:
                raise NoExtension(f"layer {k} could not be made colourful")
        out = extend_star(g, out, root, view.edge_layers.get(0, []))
    except NoExtension:
        info["fallback"] = True
        out = extend_tree_exact(g, phi, root, tree_edges)
    _assert_extension(g, phi, out, tree_edges)
    return out, info


def _assert_extension(g: Graph, before: PartialEdgeColoring, after: PartialEdgeColoring, F: Iterable[Edge]) -> None:
    F = set(F)
    for e, c in before.colors.items():
        if after.colors.get(e) != c:
            raise InvariantBroken(f"edge {e} outside the target set changed")
    for e in F:
        c = after.colors.get(e)
        if c is None or not 1 <= c <= after.palette:
            raise InvariantBroken(f"edge {e} left uncoloured or out of palette")
    for v in sorted({x for e in F for x in e}):
        seen: dict[int, Edge] = {}
        for f in g.incident(v):
            c = after.colors.get(f)
            if c is None:
                continue
            if c in seen:
                raise InvariantBroken(f"conflict between {seen[c]} and {f}")
            seen[c] = f


# ---------------------------------------------------------------------------
# degree-choosable components


def color_even_cycle(cycle_edges: Sequence[Edge], lists: Mapping[Edge, Iterable[int]]) -> dict[Edge, int]:
    """2-list-colour an even cycle given in cyclic order (every list of size >= 2)."""
    L = len(cycle_edges)
    if L % 2:
        raise PreconditionViolation("cycle must be even")
    lst = {e: sorted(set(lists[e])) for e in cycle_edges}
    if any(len(v) < 2 for v in lst.values()):
        raise PreconditionViolation("every cycle edge needs two available colours")
    first = lst[cycle_edges[0]][:2]
    if all(lst[e][:2] == first for e in cycle_edges) and all(set(lst[e]) == set(first) for e in cycle_edges):
        return {e: first[i % 2] for i, e in enumerate(cycle_edges)}
    # colour e_i with a colour missing from list(e_{i-1}), then walk forward so e_{i-1} comes last
    for i in range(L):
        a, b = cycle_edges[i], cycle_edges[i - 1]
        private = [c for c in lst[a] if c not in lst[b]]
        if private:
            break
    else:
        raise InvariantBroken("unequal lists but no private colour")
    out = {a: private[0]}
    for t in range(1, L):
        e = cycle_edges[(i + t) % L]
        banned = {out[cycle_edges[(i + t - 1) % L]]}
        nxt = cycle_edges[(i + t + 1) % L]
        if nxt in out:
            banned.add(out[nxt])
        choice = [c for c in lst[e] if c not in banned]
        if not choice:
            raise InvariantBroken("even-cycle list colouring failed")
        out[e] = choice[0]
    return out


def _component_edges(g: Graph, vertices: Iterable[int]) -> list[Edge]:
    return g.subgraph_edges(vertices)


def _peel(g: Graph, out: PartialEdgeColoring, F: list[Edge], dist: Mapping[int, float], skip: set[Edge]) -> None:
    order = sorted((e for e in F if e not in skip), key=lambda e: (-min(dist[e[0]], dist[e[1]]), e))
    at: dict[int, set[int]] = {}

    def used(x):
        if x not in at:
            at[x] = {out.colors[f] for f in g.incident(x) if f in out.colors}
        return at[x]

    for e in order:
        taken = used(e[0]) | used(e[1])
        c = next((c for c in range(1, out.palette + 1) if c not in taken), None)
        if c is None:
            raise InvariantBroken(f"no colour left for {e} while peeling")
        out.colors[e] = c
        at[e[0]].add(c)
        at[e[1]].add(c)


def extend_easy_component(g: Graph, phi: PartialEdgeColoring, vertices: Iterable[int],
                          edges: Iterable[Edge] | None = None, delta: int | None = None) -> tuple[PartialEdgeColoring, dict]:
    """Extend to the uncoloured edges of a connected component with an even cycle or a low-degree vertex."""
    vs = sorted(set(vertices))
    F = sorted(canon(*e) for e in edges) if edges is not None else _component_edges(g, vs)
    F = [e for e in F if e not in phi.colors]
    delta = g.max_degree() if delta is None else delta
    if not F:
        return phi.copy(), {"case": "empty"}
    H = Graph(g.n, F)
    cyc = find_even_cycle(H, vs)
    out = phi.copy()
    if cyc is not None:
        L = len(cyc)
        cyc_edges = [canon(cyc[i], cyc[(i + 1) % L]) for i in range(L)]
        dist = _multi_bfs(H, cyc)
        _peel(g, out, F, dist, set(cyc_edges))
        lists = {e: available_colors(g, out, e) for e in cyc_edges}
        out.colors.update(color_even_cycle(cyc_edges, lists))
        info = {"case": "even-cycle", "cycle": len(cyc)}
    else:
        low = [v for v in vs if g.degree(v) < delta and H.degree(v) > 0]
        if not low:
            raise PreconditionViolation("component has neither an even cycle nor a low-degree vertex")
        z = low[0]
        dist = bfs_distances(H, z)
        reach = [e for e in F if dist[e[0]] != float("inf")]
        if len(reach) != len(F):
            raise PreconditionViolation("component is not connected")
        _peel(g, out, F, {v: dist[v] for v in range(g.n)}, set())
        info = {"case": "low-degree", "vertex": z}
    _assert_extension(g, phi, out, F)
    return out, info


def _multi_bfs(g: Graph, sources: Iterable[int]) -> dict[int, float]:
    dist: dict[int, float] = defaultdict(lambda: float("inf"))
    q = deque()
    for s in sources:
        dist[s] = 0
        q.append(s)
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if dist[w] == float("inf"):
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


# ---------------------------------------------------------------------------
# colour switching


def switch_colors(g: Graph, phi: PartialEdgeColoring, layer: Iterable[int], pair: tuple[Edge, Edge],
                  delta: int, leaves: Iterable[int] | None = None) -> tuple[PartialEdgeColoring, Edge | None]:
    """Recolour at most one assigned edge to 2Δ-2 so that layer k becomes colourful.

    ``layer`` is V_k; ``pair`` holds the two assigned edges (each with a
    leaf endpoint in V_k).  Returns the new colouring and the switched edge.
    """
    top = 2 * delta - 2
    (a, b), (c, d) = (canon(*pair[0]), canon(*pair[1]))
    if {a, b} & {c, d}:
        raise PreconditionViolation("assigned edges share an endpoint")
    Vk = set(layer)
    leaf_set = set(leaves) if leaves is not None else Vk
    for e in ((a, b), (c, d)):
        if not (set(e) & Vk & leaf_set):
            raise PreconditionViolation(f"assigned edge {e} has no leaf endpoint at the given depth")
        if e not in phi.colors:
            raise PreconditionViolation(f"assigned edge {e} is uncoloured")
    before = boundary_colors(g, phi, Vk)
    if top in before:
        raise PreconditionViolation("colour 2Δ-2 already present at the layer")
    if len(before) >= delta:
        return phi.copy(), None
    for e in ((a, b), (c, d)):
        if any(phi.colors.get(f) == top for f in g.edge_neighbors(e)):
            continue
        out = phi.copy()
        out.colors[e] = top
        if len(boundary_colors(g, out, Vk)) >= delta:
            return out, e
    raise PreconditionViolation("neither assigned edge makes the layer colourful")


def switch_decision(g: Graph, phi: PartialEdgeColoring, layer: Iterable[int], pair: tuple[Edge, Edge],
                    delta: int, leaves: Iterable[int] | None = None) -> Edge | None:
    """The edge that :func:`switch_colors` would recolour (decided on ``phi`` alone)."""
    return switch_colors(g, phi, layer, pair, delta, leaves)[1]


# ---------------------------------------------------------------------------
# oracle


def brute_force_extension_exists(g: Graph, phi: PartialEdgeColoring, F: Iterable[Edge],
                                 budget: int = 16) -> tuple[bool, dict[Edge, int] | None]:
    """Exhaustive backtracking over available colours for the edges in F."""
    F = sorted({canon(*e) for e in F} - set(phi.colors))
    if len(F) > budget:
        raise BudgetExceeded(f"{len(F)} edges exceed the budget of {budget}")
    fixed = phi.colors
    assign: dict[Edge, int] = {}
    nbrs = {e: g.edge_neighbors(e) for e in F}

    def ok(e, c):
        for f in nbrs[e]:
            if fixed.get(f) == c or assign.get(f) == c:
                return False
        return True

    def rec(i):
        if i == len(F):
            return True
        e = F[i]
        for c in range(1, phi.palette + 1):
            if ok(e, c):
                assign[e] = c
                if rec(i + 1):
                    return True
                del assign[e]
        return False

    if rec(0):
        return True, dict(assign)
    return False, None
