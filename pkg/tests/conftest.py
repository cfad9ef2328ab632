"""Shared fixtures and independent oracles."""

from __future__ import annotations

import random
from collections import deque

import pytest

from robustnet.graph import Graph


def make_graph(n: int, edges) -> Graph:
    g = Graph(n)
    for u, v in edges:
        g.add_edge(u, v)
    return g


def complete_graph(n: int) -> Graph:
    return make_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def random_graph(rng: random.Random, n: int, p: float = 0.35) -> Graph:
    g = Graph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


@pytest.fixture
def k4() -> Graph:
    return complete_graph(4)


@pytest.fixture
def path3() -> Graph:
    return make_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> Graph:
    return complete_graph(3)


@pytest.fixture
def star5() -> Graph:
    return make_graph(5, [(0, v) for v in range(1, 5)])


# --------------------------------------------------------------------------
# Brute-force attack oracle, deliberately naive and independent of the
# production path: recompute degrees over the shrinking node set, remove the
# (max degree, min id) node, then BFS every component.

def brute_attack_sizes(g: Graph) -> list[int]:
    n = g.node_count
    alive = set(range(n))
    adj = {u: set(g.neighbors(u)) for u in range(n)}
    sizes = []
    while alive:
        u = min(alive, key=lambda x: (-sum(1 for w in adj[x] if w in alive), x))
        alive.discard(u)
        sizes.append(_largest_bfs(adj, alive))
    return sizes


def _largest_bfs(adj, alive) -> int:
    best = 0
    seen = set()
    for s in alive:
        if s in seen:
            continue
        seen.add(s)
        size = 1
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in alive and w not in seen:
                    seen.add(w)
                    size += 1
                    queue.append(w)
        best = max(best, size)
    return best


def brute_r(g: Graph) -> float:
    n = g.node_count
    return sum(brute_attack_sizes(g)) / (n * n)


def lcc_sizes_for_order(g: Graph, order: list[int]) -> list[int]:
    """LCC size after removing each prefix of a fixed node order."""
    alive = set(range(g.node_count))
    adj = {u: set(g.neighbors(u)) for u in range(g.node_count)}
    sizes = []
    for u in order:
        alive.discard(u)
        sizes.append(_largest_bfs(adj, alive))
    return sizes
