"""Round-synchronous LOCAL simulator with round accounting.

A :class:`NodeProgram` is run in lockstep: in step ``t`` every unfinished
node reads the messages sent to it in step ``t-1`` and emits new ones, so the
state at step ``t`` depends only on the radius-``t`` neighbourhood.  The
number of rounds of a run is the index of the last step in which some node
was still active.
"""

from __future__ import annotations

import json
import pickle
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping

import numpy as np

from .graph import Graph, GraphError

_NO_OUTPUT = object()


class RoundBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class NodeContext:
    v: int
    neighbors: tuple[int, ...]
    n: int
    delta: int
    rng: np.random.Generator


class NodeProgram:
    """Subclass and override ``init`` and ``step``.

    ``step`` returns ``(state, outbox, output)`` where ``outbox`` maps a
    neighbour to a message and ``output`` is :data:`NodeProgram.NONE` while the
    node is still running.
    """

    NONE = _NO_OUTPUT

    def init(self, ctx: NodeContext) -> Any:
        return None

    def step(self, ctx: NodeContext, state: Any, inbox: list[tuple[int, Any]], t: int):
        raise NotImplementedError


def node_rng(seed: int, v: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & (2**64 - 1), spawn_key=(v,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class PhaseRecord:
    phase: str
    virtual_rounds: int
    overhead: int = 1
    measured: dict[str, Any] = field(default_factory=dict)

    @property
    def base_rounds(self) -> int:
        return self.virtual_rounds * self.overhead


@dataclass
class RoundTrace:
    phases: list[PhaseRecord] = field(default_factory=list)
    max_message_bytes: int = 0
    wall_time: dict[str, float] = field(default_factory=dict)

    def add(self, phase: str, virtual_rounds: int, overhead: int = 1, **measured) -> PhaseRecord:
        if virtual_rounds < 0 or overhead < 1:
            raise ValueError("round counts must be non-negative and overhead >= 1")
        rec = PhaseRecord(phase, int(virtual_rounds), int(overhead), dict(measured))
        self.phases.append(rec)
        return rec

    def extend(self, other: "RoundTrace") -> None:
        self.phases.extend(other.phases)
        self.max_message_bytes = max(self.max_message_bytes, other.max_message_bytes)
        for k, v in other.wall_time.items():
            self.wall_time[k] = self.wall_time.get(k, 0.0) + v

    @property
    def total(self) -> int:
        return sum(p.base_rounds for p in self.phases)

    def by_phase(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for p in self.phases:
            out[p.phase] = out.get(p.phase, 0) + p.base_rounds
        return out

    def to_lines(self) -> list[str]:
        # wall time is deliberately left out so trace files are reproducible
        lines = []
        for p in self.phases:
            rec = {
                "phase": p.phase,
                "virtualRounds": p.virtual_rounds,
                "baseRounds": p.base_rounds,
                "overhead": p.overhead,
            }
            if p.measured:
                rec["measured"] = p.measured
            lines.append(json.dumps(rec, sort_keys=True, default=str))
        lines.append(json.dumps({"phase": "total", "baseRounds": self.total,
                                 "maxMessageBytes": self.max_message_bytes}, sort_keys=True))
        return lines

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.to_lines()) + "\n")


def _msg_size(msg: Any) -> int:
    if isinstance(msg, (bytes, bytearray)):
        return len(msg)
    return len(pickle.dumps(msg, protocol=4))


def run_sync(g: Graph, program: NodeProgram, max_rounds: int, seed: int = 0,
             phase: str = "run", trace: RoundTrace | None = None,
             initial: Mapping[int, Any] | None = None) -> tuple[list[Any], RoundTrace]:
    """Run ``program`` on every vertex of ``g``; returns outputs and the trace."""
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    trace = trace if trace is not None else RoundTrace()
    t0 = time.perf_counter()
    delta = g.max_degree()
    ctxs = [NodeContext(v, g.adj[v], g.n, delta, node_rng(seed, v)) for v in range(g.n)]
    states = [program.init(c) for c in ctxs]
    if initial:
        for v, s in initial.items():
            states[v] = s
    outputs: list[Any] = [_NO_OUTPUT] * g.n
    inboxes: list[list[tuple[int, Any]]] = [[] for _ in range(g.n)]
    active = set(range(g.n))
    last = 0
    t = 0
    while active:
        if t > max_rounds:
            raise RoundBudgetExceeded(f"{len(active)} nodes unfinished after {max_rounds} rounds")
        nxt: list[list[tuple[int, Any]]] = [[] for _ in range(g.n)]
        for v in sorted(active):
            state, outbox, out = program.step(ctxs[v], states[v], inboxes[v], t)
            states[v] = state
            if out is not _NO_OUTPUT:
                outputs[v] = out
                active.discard(v)
            for w, msg in (outbox or {}).items():
                if w not in g.adj[v]:
                    raise GraphError(f"node {v} sent to non-neighbour {w}")
                trace.max_message_bytes = max(trace.max_message_bytes, _msg_size(msg))
                nxt[w].append((v, msg))
        last = t
        t += 1
        inboxes = nxt
    trace.add(phase, last)
    trace.wall_time[phase] = trace.wall_time.get(phase, 0.0) + time.perf_counter() - t0
    return outputs, trace


@dataclass
class VirtualLayer:
    """Virtual nodes realised by connected vertex sets of a base graph."""

    base: Graph
    groups: dict[Hashable, frozenset[int]]
    overhead: int
    graph: Graph = field(init=False)
    ids: list[Hashable] = field(init=False)

    def __post_init__(self):
        if self.overhead < 1:
            raise ValueError("overhead must be >= 1")
        self.ids = sorted(self.groups, key=repr) if not all(
            isinstance(k, int) for k in self.groups) else sorted(self.groups)
        pos = {k: i for i, k in enumerate(self.ids)}
        owner: dict[int, int] = {}
        for k, vs in self.groups.items():
            if not vs or not _connected(self.base, vs):
                raise GraphError(f"virtual node {k!r} is empty or disconnected")
            for v in vs:
                if v in owner:
                    raise GraphError(f"vertex {v} in two virtual nodes")
                owner[v] = pos[k]
        edges = {(min(owner[u], owner[v]), max(owner[u], owner[v]))
                 for u, v in self.base.edges
                 if u in owner and v in owner and owner[u] != owner[v]}
        self.graph = Graph(len(self.ids), edges)

    @classmethod
    def from_clusters(cls, base: Graph, groups: Mapping[Hashable, Iterable[int]], radius: int | None = None):
        groups = {k: frozenset(vs) for k, vs in groups.items()}
        if radius is None:
            radius = max((_radius(base, vs) for vs in groups.values()), default=0)
        return cls(base, groups, 2 * radius + 1)


def _connected(g: Graph, vs: frozenset[int]) -> bool:
    start = next(iter(vs))
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if w in vs and w not in seen:
                seen.add(w)
                q.append(w)
    return len(seen) == len(vs)


def _radius(g: Graph, vs: frozenset[int]) -> int:
    best = None
    for s in vs:
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.adj[u]:
                if w in vs and w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        ecc = max(dist.values())
        best = ecc if best is None else min(best, ecc)
    return best or 0


def run_on_virtual(layer: VirtualLayer, program: NodeProgram, max_rounds: int, seed: int = 0,
                   phase: str = "virtual") -> tuple[dict[Hashable, Any], RoundTrace]:
    outs, tr = run_sync(layer.graph, program, max_rounds, seed, phase=phase)
    rec = tr.phases[-1]
    rec.overhead = layer.overhead
    return {k: outs[i] for i, k in enumerate(layer.ids)}, tr


class _Flood(NodeProgram):
    def __init__(self, k: int, annotations: Mapping[int, Any] | None):
        self.k = k
        self.ann = annotations or {}

    def init(self, ctx):
        return {ctx.v: (ctx.neighbors, self.ann.get(ctx.v))}

    def step(self, ctx, state, inbox, t):
        for _, known in inbox:
            state.update(known)
        if t >= self.k:
            return state, {}, state
        return state, {w: dict(state) for w in ctx.neighbors}, self.NONE


@dataclass(frozen=True)
class BallView:
    center: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    annotations: dict[int, Any]


def gather_ball(g: Graph, k: int, annotations: Mapping[int, Any] | None = None,
                trace: RoundTrace | None = None) -> tuple[list[BallView], RoundTrace]:
    """Every vertex learns the subgraph induced by its radius-``k`` ball in ``k`` rounds."""
    if k < 0:
        raise ValueError("k must be >= 0")
    outs, tr = run_sync(g, _Flood(k, annotations), max_rounds=k, phase=f"gather{k}", trace=trace)
    views = []
    for v, known in enumerate(outs):
        # adjacency records of vertices within distance k are known; restrict to the ball
        dist = {v: 0}
        q = deque([v])
        while q:
            u = q.popleft()
            if dist[u] == k:
                continue
            for w in known[u][0]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        vs = tuple(sorted(dist))
        inside = set(vs)
        es = tuple(sorted((u, w) for u in vs for w in known[u][0] if u < w and w in inside))
        views.append(BallView(v, vs, es, {u: known[u][1] for u in vs}))
    return views, tr
