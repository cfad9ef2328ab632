"""Native budgeted rewiring optimizers.

All optimizers share one discipline:

* the input graph is never modified; work happens on a private copy;
* the initial robustness is computed once, uncounted; every structurally legal
  proposed move costs exactly one budgeted evaluation;
* rejected moves are rolled back; the best accepted graph is returned;
* after STALL_LIMIT consecutive iterations without a legal move the run stops
  (complete graphs and other fixed points terminate cleanly);
* runs are fully determined by (graph, budget, seed, params).

Random draws go through random.Random(seed) using randrange/random only, in a
fixed order per move proposal. The rule-language interpreter follows the same
discipline, which is what makes its reference programs reproduce these
baselines call-for-call.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .graph import Graph, GraphError
from .robustness import STALL_LIMIT, BudgetedEvaluator, BudgetExhausted, robustness_r


@dataclass(frozen=True)
class AnnealParams:
    """Geometric cooling schedule: temperature starts at t0 and is multiplied
    by alpha after every evaluation."""

    t0: float = 0.01
    alpha: float = 0.999

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError(f"t0 must be > 0, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")


DEFAULT_ANNEAL = AnnealParams()


@dataclass(frozen=True)
class OptimizerOutcome:
    final_graph: Graph
    final_r: float
    evaluations_used: int
    accepted_moves: int


def anneal_accept(rng: random.Random, dr: float, temperature: float) -> bool:
    """Annealed acceptance; draws randomness only for non-improving moves."""
    if dr > 0:
        return True
    return temperature > 0 and rng.random() < math.exp(dr / temperature)


def improve_accept(dr: float) -> bool:
    """Non-decreasing acceptance. Equal-score moves are kept: drifting across
    score plateaus is what lets a fixed move set keep finding improvements
    after strict ascent stalls."""
    return dr >= 0


class _Run:
    """Shared accept/rollback/bookkeeping state for one optimizer run."""

    __slots__ = ("work", "ev", "rng", "current_r", "best_r", "best_graph",
                 "accepted", "fails", "temperature", "alpha")

    def __init__(self, g: Graph, budget: int, seed, anneal: AnnealParams | None = None):
        self.work = g.copy()
        self.ev = BudgetedEvaluator(budget)
        self.rng = random.Random(seed)
        self.current_r = robustness_r(self.work)
        self.best_r = self.current_r
        self.best_graph = self.work.copy()
        self.accepted = 0
        self.fails = 0
        self.temperature = anneal.t0 if anneal else 0.0
        self.alpha = anneal.alpha if anneal else 0.0

    def exhausted(self) -> bool:
        return self.ev.remaining <= 0 or self.fails >= STALL_LIMIT

    def step_failed(self) -> None:
        self.fails += 1

    def decide(self, new_r: float, anneal: bool) -> bool:
        dr = new_r - self.current_r
        if anneal:
            accept = anneal_accept(self.rng, dr, self.temperature)
            self.temperature *= self.alpha
        else:
            accept = improve_accept(dr)
        return accept

    def settle(self, new_r: float, accept: bool, undo) -> None:
        self.fails = 0
        if accept:
            self.accepted += 1
            self.current_r = new_r
            if new_r > self.best_r:
                self.best_r = new_r
                self.best_graph = self.work.copy()
        else:
            undo()

    def outcome(self) -> OptimizerOutcome:
        return OptimizerOutcome(self.best_graph, self.best_r,
                                self.ev.used, self.accepted)


def _swap_ok(g: Graph, a: int, b: int, c: int, d: int) -> bool:
    """Legality of rewiring (a,b),(c,d) -> (a,d),(c,b)."""
    return a != d and b != c and not g.has_edge(a, d) and not g.has_edge(c, b)


def _apply_swap(g: Graph, a: int, b: int, c: int, d: int):
    g.remove_edge(a, b)
    g.remove_edge(c, d)
    g.add_edge(a, d)
    g.add_edge(c, b)

    def undo():
        g.remove_edge(a, d)
        g.remove_edge(c, b)
        g.add_edge(a, b)
        g.add_edge(c, d)

    return undo


def _top_by_degree(g: Graph, k: int) -> list[int]:
    return sorted(range(g.node_count), key=lambda u: (-g.degree(u), u))[:k]


def _bottom_by_degree(g: Graph, k: int) -> list[int]:
    return sorted(range(g.node_count), key=lambda u: (g.degree(u), u))[:k]


def _decile(n: int) -> int:
    return max(1, -(-n // 10))


def _pick(rng: random.Random, seq):
    return seq[rng.randrange(len(seq))]


def baseline_hc(g: Graph, budget: int, seed) -> OptimizerOutcome:
    """Hill climbing: uniform random degree-preserving double edge swap,
    accepted only on strict improvement."""
    return _swap_search(g, budget, seed, anneal=None)


def baseline_sa(g: Graph, budget: int, seed,
                anneal: AnnealParams = DEFAULT_ANNEAL) -> OptimizerOutcome:
    """Same move as hill climbing with annealed acceptance of setbacks."""
    return _swap_search(g, budget, seed, anneal=anneal)


def _swap_search(g: Graph, budget: int, seed, anneal: AnnealParams | None) -> OptimizerOutcome:
    if g.node_count < 1:
        raise GraphError("optimizer requires a non-empty graph")
    run = _Run(g, budget, seed, anneal)
    work, rng = run.work, run.rng
    n = work.node_count
    while not run.exhausted():
        a = rng.randrange(n)
        row = work.neighbors(a)
        if not row:
            run.step_failed()
            continue
        b = row[rng.randrange(len(row))]
        c = rng.randrange(n)
        row = work.neighbors(c)
        if not row:
            run.step_failed()
            continue
        d = row[rng.randrange(len(row))]
        if not _swap_ok(work, a, b, c, d):
            run.step_failed()
            continue
        undo = _apply_swap(work, a, b, c, d)
        try:
            new_r = run.ev.evaluate(work)
        except BudgetExhausted:
            undo()
            break
        run.settle(new_r, run.decide(new_r, anneal is not None), undo)
    return run.outcome()


def heuristic_v1(g: Graph, budget: int, seed,
                 anneal: AnnealParams = DEFAULT_ANNEAL) -> OptimizerOutcome:
    """Degree-preserving swaps between a critical node and a similar-degree
    partner, annealed acceptance.

    Critical pool = top ceil(5% N) nodes by degree (min 2). The pairing
    tolerance max_diff widens by 1 on every iteration that fails (no partner,
    illegal swap, or rejected move) and snaps back to 1 when the score
    strictly improves, so the search tightens around critical nodes while
    progressing and goes global while stuck. All moves are double edge swaps:
    the degree sequence, the pool, and the degree index stay valid all run.
    """
    if g.node_count < 4 or g.edge_count < 2:
        raise GraphError("heuristic_v1 requires >= 4 nodes and >= 2 edges")
    run = _Run(g, budget, seed, anneal)
    work, rng = run.work, run.rng
    n = work.node_count
    pool = _top_by_degree(work, max(2, -(-n * 5 // 100)))
    by_degree = sorted(range(n), key=lambda u: (work.degree(u), u))
    degree_keys = [work.degree(u) for u in by_degree]
    pos_of = [0] * n
    for i, u in enumerate(by_degree):
        pos_of[u] = i

    max_diff = 1
    while not run.exhausted():
        u = _pick(rng, pool)
        du = work.degree(u)
        lo = bisect_left(degree_keys, du - max_diff)
        hi = bisect_right(degree_keys, du + max_diff)
        span = hi - lo - 1  # u itself always lies in [lo, hi)
        if span <= 0 or du == 0:
            max_diff += 1
            run.step_failed()
            continue
        j = lo + rng.randrange(span)
        if j >= pos_of[u]:
            j += 1
        v = by_degree[j]
        row = work.neighbors(u)
        a = row[rng.randrange(len(row))]
        row = work.neighbors(v)
        if not row:
            max_diff += 1
            run.step_failed()
            continue
        b = row[rng.randrange(len(row))]
        if not _swap_ok(work, u, a, v, b):
            max_diff += 1
            run.step_failed()
            continue
        undo = _apply_swap(work, u, a, v, b)
        try:
            new_r = run.ev.evaluate(work)
        except BudgetExhausted:
            undo()
            break
        improved = new_r > run.current_r
        accept = run.decide(new_r, anneal=True)
        run.settle(new_r, accept, undo)
        if improved:
            max_diff = 1
        elif not accept:
            max_diff += 1
    return run.outcome()


def heuristic_v2(g: Graph, budget: int, seed) -> OptimizerOutcome:
    """Redistributes edges from hubs toward low-degree nodes, keeping the edge
    count constant.

    Move: pick h from the top degree decile and l from the bottom decile,
    then hand one of h's remaining edges (h,x) over to l: remove (h,x), add
    (l,x). Candidates x exclude l and l's neighbors so the new edge is always
    legal. Repeated, this drains hub degrees toward the mean while the
    non-decreasing acceptance steers the resulting near-uniform network
    toward attack-resistant wiring.
    """
    return _redistribute(g, budget, seed, within_neighborhood=False)


def heuristic_v3(g: Graph, budget: int, seed) -> OptimizerOutcome:
    """Rewires around hubs: connect two of a hub's neighbors and drop one of
    the hub's own edges, keeping the edge count constant."""
    return _redistribute(g, budget, seed, within_neighborhood=True)


def _redistribute(g: Graph, budget: int, seed, within_neighborhood: bool) -> OptimizerOutcome:
    if g.node_count < 3 or g.edge_count < 2:
        raise GraphError("heuristic requires >= 3 nodes and >= 2 edges")
    run = _Run(g, budget, seed, anneal=None)
    work, rng = run.work, run.rng
    k = _decile(work.node_count)
    top: list[int] = []
    bottom: list[int] = []
    stale = True  # degree pools change only on accepted moves
    while not run.exhausted():
        if stale:
            top = _top_by_degree(work, k)
            if not within_neighborhood:
                bottom = _bottom_by_degree(work, k)
            stale = False
        h = _pick(rng, top)
        if within_neighborhood:
            undo = _propose_neighbor_rewire(work, rng, h)
        else:
            l = _pick(rng, bottom)
            undo = _propose_hub_shift(work, rng, h, l)
        if undo is None:
            run.step_failed()
            continue
        try:
            new_r = run.ev.evaluate(work)
        except BudgetExhausted:
            undo()
            break
        accept = run.decide(new_r, anneal=False)
        run.settle(new_r, accept, undo)
        if accept:
            stale = True
    return run.outcome()


def _propose_hub_shift(g: Graph, rng: random.Random, h: int, l: int):
    if h == l:
        return None
    candidates = [w for w in g.neighbors(h) if w != l and not g.has_edge(w, l)]
    if not candidates:
        return None
    x = candidates[rng.randrange(len(candidates))]
    g.remove_edge(h, x)
    g.add_edge(l, x)

    def undo():
        g.remove_edge(l, x)
        g.add_edge(h, x)

    return undo


def _propose_neighbor_rewire(g: Graph, rng: random.Random, h: int):
    row = g.neighbors(h)
    if len(row) < 2:
        return None
    a = row[rng.randrange(len(row))]
    b = row[rng.randrange(len(row))]
    if a == b or g.has_edge(a, b):
        return None
    g.add_edge(a, b)
    g.remove_edge(h, a)

    def undo():
        g.add_edge(h, a)
        g.remove_edge(a, b)

    return undo


def baseline_sr(g: Graph, budget: int, seed) -> OptimizerOutcome:
    """Locality-biased degree-preserving rewiring.

    Picks a random node with at least two neighbors, takes one incident edge
    of each of two distinct neighbors, and of the two feasible swap
    orientations applies the one whose strongest new edge joins the
    highest-degree endpoints; accepts only strict improvements.
    """
    if g.node_count < 1:
        raise GraphError("optimizer requires a non-empty graph")
    run = _Run(g, budget, seed, anneal=None)
    work, rng = run.work, run.rng
    n = work.node_count
    while not run.exhausted():
        w = rng.randrange(n)
        row = work.neighbors(w)
        if len(row) < 2:
            run.step_failed()
            continue
        n1 = row[rng.randrange(len(row))]
        n2 = row[rng.randrange(len(row))]
        if n1 == n2:
            run.step_failed()
            continue
        r1 = work.neighbors(n1)
        x = r1[rng.randrange(len(r1))]
        r2 = work.neighbors(n2)
        y = r2[rng.randrange(len(r2))]
        # two rewirings of the pair (n1,x),(n2,y): cross or direct
        choices = []
        if _swap_ok(work, n1, x, n2, y):  # new edges (n1,y),(n2,x)
            score = max(work.degree(n1) + work.degree(y),
                        work.degree(n2) + work.degree(x))
            choices.append((score, 1, (n1, x, n2, y)))
        if _swap_ok(work, n1, x, y, n2):  # new edges (n1,n2),(x,y)
            score = max(work.degree(n1) + work.degree(n2),
                        work.degree(x) + work.degree(y))
            choices.append((score, 0, (n1, x, y, n2)))
        if not choices:
            run.step_failed()
            continue
        _, _, (a, b, c, d) = max(choices)
        undo = _apply_swap(work, a, b, c, d)
        try:
            new_r = run.ev.evaluate(work)
        except BudgetExhausted:
            undo()
            break
        run.settle(new_r, run.decide(new_r, anneal=False), undo)
    return run.outcome()


def run_optimizer(name: str, g: Graph, budget: int, seed,
                  anneal: AnnealParams = DEFAULT_ANNEAL) -> OptimizerOutcome:
    """Dispatch by short name: v1|v2|v3|hc|sa|sr."""
    try:
        fn = _OPTIMIZERS[name]
    except KeyError:
        raise ValueError(f"unknown heuristic {name!r}; expected one of {sorted(_OPTIMIZERS)}") from None
    if name in ("v1", "sa"):
        return fn(g, budget, seed, anneal)
    return fn(g, budget, seed)


_OPTIMIZERS = {
    "v1": heuristic_v1,
    "v2": heuristic_v2,
    "v3": heuristic_v3,
    "hc": baseline_hc,
    "sa": baseline_sa,
    "sr": baseline_sr,
}
