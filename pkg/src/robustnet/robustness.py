"""Targeted-attack simulation and the attack-averaged robustness score R.

The attack removes one node per step, always the currently highest-degree node
(degrees recomputed after every removal, ties broken by lowest id), and records
s(q) = |largest connected component| / N after each of the N removals.
R = (1/N) * sum_q s(q), which lies in [0, (N-1)/(2N)].

The simulation runs in two integer-only phases: the removal order comes from a
lazy max-heap bucket sweep, then component sizes are recovered by re-adding
nodes in reverse order with union-find. The kernel below is compiled with
numba when available; the pure-Python fallback executes the same source, so
results are bit-for-bit identical either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain

import numpy as np

from .graph import Graph, GraphError

# Budgeted optimizer loops give up after this many consecutive iterations that
# fail to construct a structurally legal move (e.g. complete graphs).
STALL_LIMIT = 1000


def _attack_kernel(indptr, indices, order, sizes):
    # Phase 1: removal order. Max-heap keyed by degree*n + (n-1-node) with lazy
    # invalidation, so the top is always (max degree, lowest id).
    n = indptr.shape[0] - 1
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    removed = np.zeros(n, np.uint8)
    heap = np.empty(n + indices.shape[0] + 1, np.int64)
    hs = 0
    for v in range(n):
        key = deg[v] * n + (n - 1 - v)
        i = hs
        heap[i] = key
        hs += 1
        while i > 0:
            p = (i - 1) // 2
            if heap[p] < heap[i]:
                heap[p], heap[i] = heap[i], heap[p]
                i = p
            else:
                break
    for step in range(n):
        v = -1
        while True:
            top = heap[0]
            hs -= 1
            heap[0] = heap[hs]
            i = 0
            while True:
                left = 2 * i + 1
                m = i
                if left < hs and heap[left] > heap[m]:
                    m = left
                if left + 1 < hs and heap[left + 1] > heap[m]:
                    m = left + 1
                if m == i:
                    break
                heap[i], heap[m] = heap[m], heap[i]
                i = m
            d = top // n
            cand = (n - 1) - (top % n)
            if removed[cand] == 0 and deg[cand] == d:
                v = cand
                break
        removed[v] = 1
        order[step] = v
        for idx in range(indptr[v], indptr[v + 1]):
            w = indices[idx]
            if removed[w] == 0:
                deg[w] -= 1
                key = deg[w] * n + (n - 1 - w)
                i = hs
                heap[i] = key
                hs += 1
                while i > 0:
                    p = (i - 1) // 2
                    if heap[p] < heap[i]:
                        heap[p], heap[i] = heap[i], heap[p]
                        i = p
                    else:
                        break

    # Phase 2: re-add nodes in reverse removal order, union-find tracks the
    # running maximum component size. After re-adding order[i] the state is
    # "q = i nodes removed", so sizes[i-1] records s(i)*N.
    parent = np.empty(n, np.int64)
    csize = np.zeros(n, np.int64)
    active = np.zeros(n, np.uint8)
    cur = 0
    sizes[n - 1] = 0
    for i in range(n - 1, 0, -1):
        v = order[i]
        active[v] = 1
        parent[v] = v
        csize[v] = 1
        for idx in range(indptr[v], indptr[v + 1]):
            w = indices[idx]
            if active[w] == 0:
                continue
            rv = v
            while parent[rv] != rv:
                rv = parent[rv]
            rw = w
            while parent[rw] != rw:
                rw = parent[rw]
            if rv != rw:
                if csize[rv] < csize[rw]:
                    rv, rw = rw, rv
                parent[rw] = rv
                csize[rv] += csize[rw]
            # path compression from the entry points
            x = v
            while parent[x] != rv:
                parent[x], x = rv, parent[x]
            x = w
            while parent[x] != rv:
                parent[x], x = rv, parent[x]
        root = v
        while parent[root] != root:
            root = parent[root]
        if csize[root] > cur:
            cur = csize[root]
        sizes[i - 1] = cur


_attack_kernel_py = _attack_kernel
try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _attack_kernel = njit(cache=True)(_attack_kernel_py)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _csr_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    n = g.node_count
    adj = [g.neighbors(u) for u in range(n)]
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.fromiter((len(row) for row in adj), np.int64, count=n), out=indptr[1:])
    indices = np.fromiter(chain.from_iterable(adj), np.int64, count=2 * g.edge_count)
    return indptr, indices


def _lcc_sizes(g: Graph, kernel=None) -> np.ndarray:
    n = g.node_count
    if n < 1:
        raise GraphError("attack simulation requires at least one node")
    indptr, indices = _csr_arrays(g)
    order = np.empty(n, np.int64)
    sizes = np.empty(n, np.int64)
    (kernel or _attack_kernel)(indptr, indices, order, sizes)
    return sizes


@dataclass(frozen=True)
class AttackTrace:
    """LCC sizes after q = 1..N removals; fractions() divides by N."""

    lcc_sizes: tuple[int, ...]
    node_count: int

    def fractions(self) -> list[float]:
        n = self.node_count
        return [s / n for s in self.lcc_sizes]


def attack_trace(g: Graph) -> AttackTrace:
    """Full removal trace of the targeted attack; the input is unmodified."""
    sizes = _lcc_sizes(g)
    return AttackTrace(tuple(int(s) for s in sizes), g.node_count)


def robustness_r(g: Graph) -> float:
    """Attack-averaged fraction of surviving largest component."""
    sizes = _lcc_sizes(g)
    n = g.node_count
    return int(sizes.sum()) / (n * n)


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested beyond max_attempts."""


@dataclass
class BudgetedEvaluator:
    """Counts robustness evaluations against a hard max_attempts budget and
    snapshots the best graph seen. One optimizer run owns one evaluator."""

    max_attempts: int
    used: int = 0
    best_r: float | None = field(default=None, repr=False)
    best_graph: Graph | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")

    @property
    def remaining(self) -> int:
        return self.max_attempts - self.used

    @property
    def best_seen(self) -> tuple[float, Graph] | None:
        if self.best_r is None:
            return None
        return (self.best_r, self.best_graph)

    def evaluate(self, g: Graph) -> float:
        """Spend one evaluation on g; raises BudgetExhausted past the budget."""
        if self.used >= self.max_attempts:
            raise BudgetExhausted(f"budget of {self.max_attempts} evaluations exhausted")
        self.used += 1
        r = robustness_r(g)
        if self.best_r is None or r > self.best_r:
            self.best_r = r
            self.best_graph = g.copy()
        return r
