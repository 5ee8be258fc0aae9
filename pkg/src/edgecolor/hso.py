"""Proposals, the auxiliary hypergraph, sinkless orientation and matching rearrangement."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .graph import Edge, Graph, canon
from .sim import RoundBudgetExceeded
from .symmetry import ValidityCheckFailed
from .verify import check_matching


class NoNearbyTarget(ValueError):
    pass


class PreconditionDegraded(ValueError):
    pass


class DegreeTooSmall(ValueError):
    pass


class MatchingViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Proposal:
    target: Edge
    path: tuple[int, ...]  # proposer first, an endpoint of ``target`` last

    @property
    def length(self) -> int:
        return len(self.path) - 1


def nearest_targets(g: Graph, targets: Iterable[Edge]) -> tuple[dict[int, Edge], dict[int, int], dict[int, int]]:
    """Multi-source BFS from the target edges: (target, next hop, distance) per reached vertex.

    Ties are broken by the smaller target edge, then the smaller next hop, so
    every vertex adopts the target of its predecessor on its recorded path.
    """
    tgt: dict[int, Edge] = {}
    nxt: dict[int, int] = {}
    dist: dict[int, int] = {}
    layer = []
    for e in sorted(canon(*e) for e in targets):
        for x in e:
            if x in tgt:
                raise ValueError(f"target edges share vertex {x}")
            tgt[x], nxt[x], dist[x] = e, -1, 0
            layer.append(x)
    d = 0
    while layer:
        best: dict[int, tuple[Edge, int]] = {}
        for u in layer:
            key = (tgt[u], u)
            for w in g.adj[u]:
                if w not in tgt and (w not in best or key < best[w]):
                    best[w] = key
        d += 1
        for w, (e, u) in best.items():
            tgt[w], nxt[w], dist[w] = e, u, d
        layer = sorted(best)
    return tgt, nxt, dist


def build_proposals(g: Graph, proposers: Iterable[int], targets: Iterable[Edge], max_hops: int) -> dict[int, Proposal]:
    """Each proposer proposes to a nearest target edge along a path-consistent shortest path."""
    tgt, nxt, dist = nearest_targets(g, targets)
    out = {}
    for v in sorted(set(proposers)):
        if v not in tgt or dist[v] > max_hops:
            raise NoNearbyTarget(f"vertex {v} has no target within {max_hops} hops")
        path = [v]
        while nxt[path[-1]] != -1:
            path.append(nxt[path[-1]])
        out[v] = Proposal(tgt[v], tuple(path))
    return out


@dataclass
class Hypergraph:
    vertices: list[Hashable]
    edges: dict[Hashable, frozenset]
    incidence: dict[Hashable, list[Hashable]] = field(init=False)

    def __post_init__(self):
        inc: dict[Hashable, list[Hashable]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges):
            vs = self.edges[e]
            if not vs:
                raise ValueError(f"hyperedge {e!r} is empty")
            for v in vs:
                inc[v].append(e)
        self.incidence = inc

    def degree(self, v) -> int:
        return len(self.incidence[v])

    def rank(self, e) -> int:
        return len(self.edges[e])

    @property
    def min_degree(self) -> int:
        return min((len(x) for x in self.incidence.values()), default=0)

    @property
    def max_rank(self) -> int:
        return max((len(x) for x in self.edges.values()), default=0)

    def gate(self) -> dict:
        d, r = self.min_degree, self.max_rank
        return {"delta": d, "rank": r, "ok": d > r,
                "rand_gate": d >= 320 * r * math.log2(max(r, 2))}


def build_aux_hypergraph(proposals: Mapping[int, Proposal], cluster_of: Mapping[int, int] | list[int],
                         strict: bool = False) -> tuple[Hypergraph, dict[tuple[int, Edge], list[int]]]:
    """Clusters as vertices; one hyperedge per proposed-to target containing the proposing clusters."""
    members: dict[Edge, set[int]] = defaultdict(set)
    who: dict[tuple[int, Edge], list[int]] = defaultdict(list)
    for v, p in sorted(proposals.items()):
        c = cluster_of[v]
        members[p.target].add(c)
        who[(c, p.target)].append(v)
    verts = sorted({cluster_of[v] for v in proposals})
    h = Hypergraph(verts, {e: frozenset(cs) for e, cs in members.items()})
    if strict and not h.gate()["ok"]:
        raise PreconditionDegraded(f"min degree {h.min_degree} <= max rank {h.max_rank}")
    return h, dict(who)


def split_vertices(h: Hypergraph) -> tuple[Hypergraph, dict[tuple, Hashable]]:
    """Each vertex becomes halves (v, 0) and (v, 1), dealing its sorted hyperedges alternately."""
    side: dict[tuple[Hashable, Hashable], tuple] = {}
    halves = []
    group = {}
    for v in h.vertices:
        inc = h.incidence[v]
        if len(inc) < 2:
            raise DegreeTooSmall(f"vertex {v!r} has degree {len(inc)} < 2")
        for i, e in enumerate(inc):
            side[(v, e)] = (v, i % 2)
        for b in (0, 1):
            halves.append((v, b))
            group[(v, b)] = v
    edges = {e: frozenset(side[(v, e)] for v in vs) for e, vs in h.edges.items()}
    return Hypergraph(halves, edges), group


@dataclass
class Orientation:
    winner: dict[Hashable, Hashable]
    iterations: int
    repairs: int = 0
    measured: dict = field(default_factory=dict)


def _orient(h: Hypergraph, max_rounds: int, rng: np.random.Generator | None) -> Orientation:
    owner: dict[Hashable, Hashable] = {}
    owned: dict[Hashable, Hashable] = {}  # vertex -> its won hyperedge
    pending = sorted(h.vertices, key=repr)
    it = 0
    while pending:
        claims: dict[Hashable, list] = defaultdict(list)
        for v in pending:
            free = [e for e in h.incidence[v] if e not in owner]
            if not free:
                continue
            claims[free[0]].append(v)
        if not claims:
            break
        it += 1
        if it > max_rounds:
            raise RoundBudgetExceeded(f"orientation unfinished after {max_rounds} iterations")
        for e, vs in claims.items():
            w = vs[int(rng.integers(len(vs)))] if rng is not None else min(vs, key=repr)
            owner[e] = w
            owned[w] = e
        pending = [v for v in pending if v not in owned]
    repairs = 0
    for v in pending:
        if not _augment(h, v, owner, owned):
            raise PreconditionDegraded(f"no sinkless orientation reaches {v!r}")
        repairs += 1
    winner = dict(owner)
    for e in sorted(h.edges):
        if e not in winner:
            winner[e] = min(h.edges[e], key=repr)
    return Orientation(winner, it, repairs, {"iterations": it, "repairs": repairs})


def _augment(h: Hypergraph, v, owner: dict, owned: dict) -> bool:
    """Alternating BFS: hand v an edge, shifting owners along a path to a free hyperedge."""
    prev: dict = {}
    q = deque([v])
    seen_v = {v}
    while q:
        x = q.popleft()
        for e in h.incidence[x]:
            if e in prev:
                continue
            prev[e] = x
            if e not in owner:
                # unwind: x takes e, x's old edge passes back along the path
                while True:
                    old = owned.get(x)
                    owner[e] = x
                    owned[x] = e
                    if x == v:
                        return True
                    e = old
                    x = prev[e]
            y = owner[e]
            if y not in seen_v:
                seen_v.add(y)
                q.append(y)
    return False


def solve_hso_det(h: Hypergraph, max_rounds: int = 10**6) -> Orientation:
    """Every vertex gets an outgoing hyperedge: claims on the smallest free edge, min-id wins."""
    return _orient(h, max_rounds, None)


def solve_hso_rand(h: Hypergraph, seed: int, max_rounds: int = 10**6, fail: bool = False) -> Orientation:
    """Contested hyperedges go to a uniformly random claimant; ``fail`` forces a checker rejection (test hook)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed & (2**64 - 1), spawn_key=(77,))))
    o = _orient(h, max_rounds, rng)
    o.measured["gate"] = h.gate()["rand_gate"]
    if fail:
        raise ValidityCheckFailed("forced rejection (fault injection)")
    return o


@dataclass
class Rearrangement:
    matching: list[Edge]
    assigned: dict[int, list[tuple[Edge, int]]]  # cluster -> [(edge, winning leaf)]
    flips: dict[Edge, Edge]


def rearrange_matching(g: Graph, targets: Iterable[Edge], orientation: Orientation, proposals: Mapping[int, Proposal],
                       who: Mapping[tuple[int, Edge], list[int]], group: Mapping[Hashable, int] | None = None,
                       keep: int = 2) -> Rearrangement:
    """Move every won target edge next to its winning leaf and keep ``keep`` edges per cluster.

    For a winner ``v`` whose path is ``v, u, ...`` the new edge is ``vu``;
    a winner incident to its target keeps it.
    """
    flips: dict[Edge, Edge] = {}
    won: dict[int, list[tuple[Hashable, Edge, int]]] = defaultdict(list)
    for e, half in sorted(orientation.winner.items()):
        c = group[half] if group is not None else half
        props = who.get((c, e))
        if not props:
            continue
        v = min(props)
        path = proposals[v].path
        new = e if len(path) == 1 else canon(path[0], path[1])
        flips[e] = new
        won[c].append((half, new, v))
    assigned: dict[int, list[tuple[Edge, int]]] = {}
    for c, lst in sorted(won.items()):
        lst.sort(key=lambda t: (repr(t[0]), t[1]))
        chosen, halves_used = [], set()
        for half, e, v in lst:
            if half not in halves_used and len(chosen) < keep:
                chosen.append((e, v))
                halves_used.add(half)
        for half, e, v in lst:
            if len(chosen) >= keep:
                break
            if (e, v) not in chosen:
                chosen.append((e, v))
        assigned[c] = chosen
    M = sorted({flips.get(canon(*e), canon(*e)) for e in targets})
    rep = check_matching(g, M, maximal=False)
    if not rep.passed:
        raise MatchingViolation(f"rearranged edges are not a matching: {rep.counterexample}")
    return Rearrangement(M, assigned, flips)
