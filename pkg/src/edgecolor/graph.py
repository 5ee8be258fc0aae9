"""Static undirected simple graphs, derived graphs and instance generators.

Vertices are the dense integers ``0..n-1``; an edge is the canonical pair
``(u, v)`` with ``u < v``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]
INF = math.inf

MODELS = (
    "regular-random",
    "regular-high-girth",
    "tree",
    "cycle",
    "star-gadget",
    "planted-trees",
)


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    pass


class InfeasibleSpec(GraphError):
    pass


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph with sorted adjacency lists."""

    __slots__ = ("n", "adj", "edges", "_index", "_csr")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 0:
            raise GraphError("negative vertex count")
        if not isinstance(edges, np.ndarray):
            edges = list(edges)
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2) if len(edges) else np.zeros((0, 2), np.int64)
        lo, hi = arr.min(axis=1), arr.max(axis=1)
        if arr.size:
            loops = np.flatnonzero(lo == hi)
            if loops.size:
                raise GraphError(f"self-loop at {int(lo[loops[0]])}")
            bad = np.flatnonzero((lo < 0) | (hi >= n))
            if bad.size:
                u, v = arr[bad[0]]
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        keys = lo * max(n, 1) + hi
        order = np.argsort(keys, kind="stable")
        keys, lo, hi = keys[order], lo[order], hi[order]
        dup = np.flatnonzero(keys[1:] == keys[:-1])
        if dup.size:
            raise GraphError(f"parallel edge {(int(lo[dup[0]]), int(hi[dup[0]]))}")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        by = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(np.bincount(src, minlength=n))
        flat = dst[by].tolist()
        ptr = indptr.tolist()
        self.n = n
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(flat[ptr[i]:ptr[i + 1]]) for i in range(n))
        self.edges: tuple[Edge, ...] = tuple(zip(lo.tolist(), hi.tolist()))
        self._index: dict[Edge, int] | None = None
        self._csr: tuple[np.ndarray, np.ndarray] | None = (indptr, dst[by])

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self.edge_index

    @property
    def edge_index(self) -> dict[Edge, int]:
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.edges)}
        return self._index

    def edge_degree(self, e: Edge) -> int:
        u, v = e
        return len(self.adj[u]) + len(self.adj[v]) - 2

    def edge_neighbors(self, e: Edge) -> list[Edge]:
        u, v = e
        out = [canon(u, w) for w in self.adj[u] if w != v]
        out.extend(canon(v, w) for w in self.adj[v] if w != u)
        return out

    def incident(self, v: int) -> list[Edge]:
        return [canon(v, w) for w in self.adj[v]]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays of the adjacency structure."""
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(a) for a in self.adj])
            indices = np.fromiter(
                (w for a in self.adj for w in a), dtype=np.int64, count=int(indptr[-1])
            )
            self._csr = (indptr, indices)
        return self._csr

    def subgraph_edges(self, vertices: Iterable[int]) -> list[Edge]:
        vs = set(vertices)
        return [(u, v) for u in sorted(vs) for v in self.adj[u] if u < v and v in vs]

    def without_edges(self, removed: Iterable[Edge]) -> "Graph":
        rem = {canon(*e) for e in removed}
        return Graph(self.n, (e for e in self.edges if e not in rem))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, maxdeg={self.max_degree()})"


# ---------------------------------------------------------------------------
# distances and derived graphs


def bfs_distances(g: Graph, source: int, limit: float = INF) -> list[float]:
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} not a vertex")
    dist: list[float] = [INF] * g.n
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        if du >= limit:
            continue
        for w in g.adj[u]:
            if dist[w] == INF:
                dist[w] = du + 1
                q.append(w)
    return dist


def ball(g: Graph, v: int, k: int) -> dict[int, int]:
    """Vertices within distance ``k`` of ``v`` mapped to their distance."""
    dist = {v: 0}
    frontier = [v]
    for d in range(1, k + 1):
        nxt = []
        for u in frontier:
            for w in g.adj[u]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return dist


def edge_vertex_distance(dist_from_w: Sequence[float], e: Edge) -> float:
    return min(dist_from_w[e[0]], dist_from_w[e[1]])


def power_graph(g: Graph, k: int) -> Graph:
    if k < 1:
        raise GraphError("power must be >= 1")
    if k == 1:
        return g
    edges = []
    for v in range(g.n):
        for w in ball(g, v, k):
            if w > v:
                edges.append((v, w))
    return Graph(g.n, edges)


def line_graph(g: Graph) -> tuple[Graph, tuple[Edge, ...]]:
    """Line graph whose vertex ``i`` is ``g.edges[i]``."""
    indptr, indices = g.csr()
    owner = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(indptr))
    n1 = max(g.n, 1)
    keys = np.minimum(owner, indices) * n1 + np.maximum(owner, indices)
    ekeys = np.array([u * n1 + v for u, v in g.edges], dtype=np.int64)
    slot_edge = np.searchsorted(ekeys, keys)
    deg = np.diff(indptr)
    parts = []
    for a in range(int(deg.max(initial=0))):
        for b in range(a + 1, int(deg.max(initial=0))):
            vs = np.flatnonzero(deg > b)
            if vs.size:
                parts.append(np.stack([slot_edge[indptr[vs] + a], slot_edge[indptr[vs] + b]], axis=1))
    ledges = np.concatenate(parts) if parts else np.zeros((0, 2), np.int64)
    return Graph(g.m, ledges), g.edges


class PowerAdjacency:
    """Packed bitset rows of ``G^k`` with the diagonal set.

    Row ``v`` marks every vertex within distance ``k`` of ``v``; memory is
    ``n * n / 8`` bytes, which is the intended desk-scale regime.
    """

    def __init__(self, g: Graph, k: int):
        self.g = g
        self.k = k
        n = g.n
        nbytes = (n + 7) // 8
        rows = np.zeros((n, nbytes), dtype=np.uint8)
        idx = np.arange(n)
        rows[idx, idx >> 3] = (1 << (idx & 7)).astype(np.uint8)
        indptr, indices = g.csr()
        deg = np.diff(indptr)
        src = np.repeat(np.arange(n), deg)
        for _ in range(k):
            nxt = rows.copy()
            # OR each neighbour's row into v's row, one neighbour slot at a time;
            # within a slot every target row appears at most once
            slot = np.arange(len(src)) - indptr[src]
            for j in range(int(deg.max(initial=0))):
                sel = slot == j
                nxt[src[sel]] |= rows[indices[sel]]
            rows = nxt
        self.rows = rows

    def within(self, u: np.ndarray | int, v: np.ndarray | int) -> np.ndarray | bool:
        """True where ``dist(u, v) <= k`` (elementwise for arrays)."""
        u = np.asarray(u)
        v = np.asarray(v)
        bits = (self.rows[u, v >> 3] >> (v & 7)) & 1
        return bits.astype(bool)

    def mask(self, vertices: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.rows.shape[1], dtype=np.uint8)
        for v in vertices:
            m[v >> 3] |= np.uint8(1 << (v & 7))
        return m

    def hits(self, vertices: Sequence[int], mask: np.ndarray) -> np.ndarray:
        """For each vertex, whether some masked vertex lies within distance k."""
        if len(vertices) == 0:
            return np.zeros(0, dtype=bool)
        return (self.rows[np.asarray(vertices)] & mask).any(axis=1)

    def neighbors(self, v: int) -> list[int]:
        bits = np.unpackbits(self.rows[v], bitorder="little")[: self.g.n]
        out = np.flatnonzero(bits).tolist()
        out.remove(v)
        return out


def power_degree_bound(delta: int, k: int) -> int:
    """Largest possible degree of ``G^k`` when ``G`` has maximum degree ``delta``."""
    if delta <= 0:
        return 0
    if delta == 1:
        return 1
    if delta == 2:
        return 2 * k
    return delta * ((delta - 1) ** k - 1) // (delta - 2)


def has_short_cycle(g: Graph, length: int) -> bool:
    """Whether ``g`` has a cycle of length strictly less than ``length``."""
    if length <= 3:
        return False
    radius = (length - 1) // 2
    for s in range(g.n):
        depth = {s: 0}
        parent = {s: -1}
        frontier = [s]
        for d in range(1, radius + 1):
            nxt = []
            for u in frontier:
                for w in g.adj[u]:
                    if w == parent[u]:
                        continue
                    if w in depth:
                        if depth[u] + depth[w] + 1 < length:
                            return True
                        continue
                    depth[w] = d
                    parent[w] = u
                    nxt.append(w)
            frontier = nxt
        # edges between two frontier vertices close cycles of length 2*radius+1
        for u in frontier:
            for w in g.adj[u]:
                if w != parent[u] and w in depth and depth[u] + depth[w] + 1 < length:
                    return True
    return False


# ---------------------------------------------------------------------------
# edge-list files


def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_edge_list(path: str | Path) -> Graph:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ParseError("header must be 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise ParseError(f"malformed line: {exc}") from exc
    if len(pairs) != m:
        raise ParseError(f"header announces {m} edges, found {len(pairs)}")
    for u, v in pairs:
        if not 0 <= u < v < n:
            raise ParseError(f"edge '{u} {v}' violates 0 <= u < v < n")
    try:
        return Graph(n, pairs)
    except GraphError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GeneratorSpec:
    model: str
    n: int = 0
    d: int = 3
    girth_min: int | None = None
    seed: int = 0
    radius: int = 4  # planted-trees only

    def __post_init__(self):
        if self.model not in MODELS:
            raise InfeasibleSpec(f"unknown model {self.model!r}")


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed & (2**64 - 1), spawn_key=key))


def moore_bound(d: int, girth: int) -> int:
    """Minimum order of a d-regular graph with the given girth."""
    if d <= 1 or girth <= 3:
        return d + 1
    if d == 2:
        return girth
    t = (girth - 1) // 2
    if girth % 2:
        return 1 + d * sum((d - 1) ** i for i in range(t))
    return 2 * sum((d - 1) ** i for i in range(girth // 2))


def _pairing_attempt(n: int, d: int, rng: np.random.Generator) -> set[Edge] | None:
    edges: set[Edge] = set()
    stubs = np.repeat(np.arange(n), d)
    while len(stubs):
        rng.shuffle(stubs)
        leftover: list[int] = []
        for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            e = canon(a, b)
            if a != b and e not in edges:
                edges.add(e)
            else:
                leftover += [a, b]
        if len(leftover) == len(stubs):
            # no progress: check whether any legal pair remains
            pool = sorted(set(leftover))
            if not any(
                canon(x, y) not in edges for i, x in enumerate(pool) for y in pool[i + 1 :]
            ):
                return None
        stubs = np.array(leftover, dtype=np.int64)
    return edges


def random_regular(n: int, d: int, rng: np.random.Generator, attempts: int = 1000) -> Graph:
    if (n * d) % 2 or d >= n or d < 0:
        raise InfeasibleSpec(f"no simple {d}-regular graph on {n} vertices")
    for _ in range(attempts):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            return Graph(n, edges)
    raise InfeasibleSpec(f"pairing model failed {attempts} times for n={n}, d={d}")


def _sidon_set(size: int, modulus: int, rng: np.random.Generator, tries: int = 4000) -> list[int] | None:
    if size * (size - 1) > modulus - 1:
        return None
    residues = np.arange(modulus)
    for _ in range(tries):
        rng.shuffle(residues)
        chosen: list[int] = []
        diffs: set[int] = set()
        for r in residues.tolist():
            new = set()
            ok = True
            for c in chosen:
                for x in ((r - c) % modulus, (c - r) % modulus):
                    if x in diffs or x in new:
                        ok = False
                        break
                    new.add(x)
                if not ok:
                    break
            if ok:
                chosen.append(r)
                diffs |= new
                if len(chosen) == size:
                    return chosen
    return None


def _ball_set(adj: list[set[int]], v: int, k: int) -> set[int]:
    seen = {v}
    frontier = {v}
    for _ in range(k):
        frontier = set().union(*(adj[u] for u in frontier)) - seen
        seen |= frontier
    return seen


def _far_apart(adj: list[set[int]], x: int, y: int, girth: int) -> bool:
    """dist(x, y) >= girth - 1, i.e. joining them closes no cycle shorter than girth."""
    reach = girth - 2
    a = reach // 2
    return _ball_set(adj, x, a).isdisjoint(_ball_set(adj, y, reach - a))


def _randomize_switches(adj: list[set[int]], girth: int, rng: np.random.Generator, attempts: int) -> None:
    edges = [(u, v) for u in range(len(adj)) for v in adj[u] if u < v]
    if len(edges) < 2:
        return
    for _ in range(attempts):
        i, j = rng.integers(len(edges), size=2)
        (a, b), (c, d) = edges[i], edges[j]
        if len({a, b, c, d}) < 4:
            continue
        if rng.random() < 0.5:
            c, d = d, c
        # (a,b),(c,d) -> (a,c),(b,d)
        if c in adj[a] or d in adj[b]:
            continue
        adj[a].discard(b); adj[b].discard(a); adj[c].discard(d); adj[d].discard(c)
        ok = _far_apart(adj, a, c, girth)
        if ok:
            adj[a].add(c); adj[c].add(a)
            ok = _far_apart(adj, b, d, girth)
            if not ok:
                adj[a].discard(c); adj[c].discard(a)
        if ok:
            adj[b].add(d); adj[d].add(b)
            edges[i], edges[j] = canon(a, c), canon(b, d)
        else:
            adj[a].add(b); adj[b].add(a); adj[c].add(d); adj[d].add(c)


def _relabel(n: int, edges: Iterable[Edge], rng: np.random.Generator) -> Graph:
    perm = rng.permutation(n)
    return Graph(n, ((int(perm[u]), int(perm[v])) for u, v in edges))


def high_girth_regular(n: int, d: int, girth: int, rng: np.random.Generator, attempts: int = 20) -> Graph:
    if (n * d) % 2 or d >= n:
        raise InfeasibleSpec(f"no simple {d}-regular graph on {n} vertices")
    if n < moore_bound(d, girth):
        raise InfeasibleSpec(
            f"Moore bound: a {d}-regular graph of girth {girth} needs >= {moore_bound(d, girth)} vertices"
        )
    # expected number of cycles shorter than the girth in a random regular graph
    short = sum((d - 1) ** k / (2 * k) for k in range(3, girth))
    for _ in range(attempts if short < 20 else 0):
        g = random_regular(n, d, rng)
        if not has_short_cycle(g, girth):
            return g
    if girth <= 6 and n % 2 == 0:
        half = n // 2
        sidon = _sidon_set(d, half, rng)
        if sidon is not None:
            adj: list[set[int]] = [set() for _ in range(n)]
            for i in range(half):
                for s in sidon:
                    j = half + (i + s) % half
                    adj[i].add(j)
                    adj[j].add(i)
            _randomize_switches(adj, girth, rng, attempts=n * d // 2)
            edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
            g = _relabel(n, edges, rng)
            if not has_short_cycle(g, girth):
                return g
    raise InfeasibleSpec(f"could not reach girth {girth} for n={n}, d={d}")


def planted_tree_size(d: int, radius: int) -> int:
    return 1 + sum(d * (d - 1) ** (i - 1) for i in range(1, radius + 1))


def planted_trees(n: int, d: int, radius: int, girth: int, rng: np.random.Generator, attempts: int = 50) -> Graph:
    """d-regular graph made of disjoint radius-``radius`` trees glued at their leaves.

    Tree ``t`` is centred at vertex ``t`` so the centres carry the smallest
    identifiers; every other vertex sits at distance ``<= radius`` from its
    centre and centres are ``2*radius+1`` apart.
    """
    size = planted_tree_size(d, radius)
    if d < 2 or n % size or n // size < 2:
        raise InfeasibleSpec(f"planted-trees needs n a multiple (>=2) of {size}")
    trees = n // size
    tree_edges: list[Edge] = []
    owner = [0] * n
    leaves: list[int] = []
    nxt = trees
    for t in range(trees):
        layer = [t]
        owner[t] = t
        for depth in range(1, radius + 1):
            new_layer = []
            for u in layer:
                for _ in range(d if depth == 1 else d - 1):
                    tree_edges.append((u, nxt))
                    owner[nxt] = t
                    new_layer.append(nxt)
                    nxt += 1
            layer = new_layer
        leaves.extend(layer)
    for _ in range(attempts):
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in tree_edges:
            adj[u].add(v)
            adj[v].add(u)
        stubs = {v: d - 1 for v in leaves}
        open_ = list(leaves)
        failed = False
        while open_:
            x = open_[int(rng.integers(len(open_)))]
            for _try in range(200):
                y = open_[int(rng.integers(len(open_)))]
                if owner[y] != owner[x] and y not in adj[x] and _far_apart(adj, x, y, max(girth, 3)):
                    break
            else:
                failed = True
                break
            adj[x].add(y)
            adj[y].add(x)
            for z in (x, y):
                stubs[z] -= 1
                if stubs[z] == 0:
                    open_.remove(z)
        if failed:
            continue
        return Graph(n, ((u, v) for u in range(n) for v in adj[u] if u < v))
    raise InfeasibleSpec(f"could not wire planted trees (n={n}, d={d}, girth={girth})")


def random_tree(n: int, d: int, rng: np.random.Generator) -> Graph:
    if n <= 0:
        return Graph(max(n, 0), [])
    if n > 2 and d < 2:
        raise InfeasibleSpec("a tree on more than 2 vertices needs d >= 2")
    deg = [0] * n
    open_ = [0]
    edges = []
    for v in range(1, n):
        u = open_[int(rng.integers(len(open_)))]
        edges.append((u, v))
        deg[u] += 1
        deg[v] = 1
        if deg[u] >= d:
            open_.remove(u)
        if d > 1:
            open_.append(v)
    return Graph(n, edges)


def star_gadget(d: int) -> Graph:
    """Star K_{1,d} whose leaves each carry d-1 pendant edges (the star-lemma gadget)."""
    edges = [(0, i) for i in range(1, d + 1)]
    nxt = d + 1
    for leaf in range(1, d + 1):
        for _ in range(d - 1):
            edges.append((leaf, nxt))
            nxt += 1
    return Graph(nxt, edges)


def cycle(n: int) -> Graph:
    if n < 3:
        raise InfeasibleSpec("cycles need n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def generate(spec: GeneratorSpec) -> Graph:
    rng = _rng(spec.seed, 0)
    if spec.model == "cycle":
        return cycle(spec.n)
    if spec.model == "star-gadget":
        return star_gadget(spec.d)
    if spec.model == "tree":
        return random_tree(spec.n, spec.d, rng)
    if spec.model == "regular-random":
        return random_regular(spec.n, spec.d, rng)
    if spec.model == "regular-high-girth":
        return high_girth_regular(spec.n, spec.d, spec.girth_min or 3, rng)
    return planted_trees(spec.n, spec.d, spec.radius, spec.girth_min or 3, rng)
