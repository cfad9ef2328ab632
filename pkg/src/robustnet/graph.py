"""Undirected simple graphs: container, preferential-attachment generator, edge-list I/O.

Node ids are always the contiguous range 0..N-1. Adjacency is kept as sorted
neighbor lists so that iteration order (and therefore every seeded run built on
top of it) is deterministic. Graphs are safe to share across workers as values;
mutation is only ever done on a private copy.
"""

from __future__ import annotations

import random
from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


class GraphError(ValueError):
    """Structurally invalid graph operation (bad node id, self-loop, ...)."""


class EdgeListError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Graph:
    """Undirected simple graph on nodes 0..n-1 with sorted adjacency lists."""

    __slots__ = ("_n", "_adj", "_m", "_version")

    def __init__(self, n: int):
        if n < 0:
            raise GraphError(f"node count must be >= 0, got {n}")
        self._n = n
        self._adj: list[list[int]] = [[] for _ in range(n)]
        self._m = 0
        self._version = 0

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def version(self) -> int:
        """Mutation counter; bumps on every structural change (for caches)."""
        return self._version

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self._n:
            raise GraphError(f"node id {u} out of range for {self._n}-node graph")

    def has_edge(self, u: int, v: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        row = self._adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def add_edge(self, u: int, v: int) -> bool:
        """Insert edge {u,v}; returns True iff the graph changed."""
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise GraphError(f"self-loop ({u},{u}) not allowed")
        if self.has_edge(u, v):
            return False
        insort(self._adj[u], v)
        insort(self._adj[v], u)
        self._m += 1
        self._version += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        """Delete edge {u,v}; returns True iff the graph changed."""
        self._check_node(u)
        self._check_node(v)
        if not self.has_edge(u, v):
            return False
        self._adj[u].remove(v)
        self._adj[v].remove(u)
        self._m -= 1
        self._version += 1
        return True

    def neighbors(self, u: int) -> list[int]:
        """Sorted neighbor list of u. Treat as read-only."""
        self._check_node(u)
        return self._adj[u]

    def degree(self, u: int) -> int:
        self._check_node(u)
        return len(self._adj[u])

    def degrees(self) -> list[int]:
        return [len(row) for row in self._adj]

    def edges(self):
        """Yield each edge once as (u, v) with u < v, in sorted order."""
        for u, row in enumerate(self._adj):
            for v in row:
                if v > u:
                    yield (u, v)

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g._n = self._n
        g._adj = [row.copy() for row in self._adj]
        g._m = self._m
        g._version = 0
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self._m})"


@dataclass(frozen=True)
class BaParams:
    """Preferential-attachment parameters: n nodes grown from an n0-clique,
    each arrival bringing m0 edges."""

    n: int
    n0: int
    m0: int
    seed: int | str = 0

    def __post_init__(self):
        if self.n0 < 2:
            raise ConfigError(f"seed clique size n0 must be >= 2, got {self.n0}")
        if self.n < self.n0:
            raise ConfigError(f"n ({self.n}) must be >= n0 ({self.n0})")
        if not 1 <= self.m0 <= self.n0:
            raise ConfigError(f"m0 must satisfy 1 <= m0 <= n0, got m0={self.m0}, n0={self.n0}")


def generate_ba(params: BaParams) -> Graph:
    """Grow a scale-free graph: complete seed on n0 nodes, then each arriving
    node attaches m0 distinct edges with probability proportional to degree
    (rejection sampling until m0 distinct targets).

    Deterministic for a fixed seed. Edge count is C(n0,2) + (n-n0)*m0.
    """
    rng = random.Random(params.seed)
    g = Graph(params.n)
    # one entry per incident edge end; uniform draws give degree-proportional attachment
    repeated: list[int] = []
    for u in range(params.n0):
        for v in range(u + 1, params.n0):
            g.add_edge(u, v)
        repeated.extend([u] * (params.n0 - 1))
    for source in range(params.n0, params.n):
        targets: set[int] = set()
        while len(targets) < params.m0:
            targets.add(repeated[rng.randrange(len(repeated))])
        for t in sorted(targets):
            g.add_edge(source, t)
            repeated.append(t)
        repeated.extend([source] * params.m0)
    return g


def degree_sequence(g: Graph) -> list[int]:
    """Per-node degrees indexed by node id; sums to 2*edge_count."""
    return g.degrees()


def largest_component_size(g: Graph) -> int:
    """Size of the largest connected component (0 for an empty node set)."""
    n = g.node_count
    seen = bytearray(n)
    best = 0
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = 1
        size = 1
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = 1
                    size += 1
                    queue.append(v)
        if size > best:
            best = size
    return best


def betweenness_centrality(g: Graph) -> list[float]:
    """Exact unweighted betweenness (Brandes accumulation), undirected halving."""
    n = g.node_count
    bc = [0.0] * n
    for s in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        order: list[int] = []
        dist[s] = 0
        sigma[s] = 1.0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v]
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return [x / 2.0 for x in bc]


def read_edge_list(source) -> Graph:
    """Parse an edge list: one edge per line, two whitespace-separated
    non-negative integers; '#' lines are comments, blank lines ignored,
    duplicate edges collapsed. Node ids are compacted to 0..N-1 in order of
    first appearance.

    `source` is a path or an open text/binary file.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_edge_list(fh)
    raw_edges: list[tuple[int, int]] = []
    ids: dict[int, int] = {}
    for lineno, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected two integers, got {stripped!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"expected two integers, got {stripped!r}", lineno) from None
        if a < 0 or b < 0:
            raise EdgeListError(f"negative node id in {stripped!r}", lineno)
        if a == b:
            raise EdgeListError(f"self-loop ({a},{b})", lineno)
        for x in (a, b):
            if x not in ids:
                ids[x] = len(ids)
        raw_edges.append((ids[a], ids[b]))
    g = Graph(len(ids))
    for u, v in raw_edges:
        g.add_edge(u, v)
    return g


def write_edge_list(g: Graph, sink) -> None:
    """Write the edge list. Edges are ordered by (max endpoint, min endpoint)
    so that node first appearances are increasing; re-reading an
    attachment-grown graph then reproduces it exactly.
    """
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh)
            return
    for u, v in sorted(g.edges(), key=lambda e: (e[1], e[0])):
        sink.write(f"{u} {v}\n")
