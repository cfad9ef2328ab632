"""Budgeted interpreter for heuristic programs.

Each iteration tries the program's rules in order. A rule binds its variables
by evaluating selectors against the current graph (seeded RNG for the random
ones), then applies its move if structurally legal: that costs one budgeted
robustness evaluation, and the acceptance rule keeps or rolls back the change.
The first rule that applies ends the iteration. Iterations that bind or apply
nothing count toward the shared stall limit, so programs with no legal move
(e.g. non_adjacent_to on a complete graph) terminate with zero evaluations.

Same RNG discipline as the native optimizers (random.Random, randrange for
choices, random() only on non-improving annealed moves), so the reference
programs in `dsl` reproduce the corresponding baselines exactly.
"""

from __future__ import annotations

import random
import time

from .dsl import HeuristicProgram, Move, Selector
from .graph import Graph, GraphError, betweenness_centrality
from .heuristics import OptimizerOutcome, anneal_accept, improve_accept
from .robustness import STALL_LIMIT, BudgetedEvaluator, BudgetExhausted, robustness_r


class InterpreterTimeout(Exception):
    """Cooperative wall-clock deadline expired."""


class _BetweennessCache:
    """Exact betweenness, recomputed lazily when the graph version moves."""

    def __init__(self):
        self.version = -1
        self.values: list[float] = []

    def get(self, g: Graph) -> list[float]:
        if g.version != self.version:
            self.values = betweenness_centrality(g)
            self.version = g.version
        return self.values


def _argmax_ids(scores, n: int) -> list[int]:
    best = None
    ids: list[int] = []
    for u in range(n):
        s = scores(u)
        if best is None or s > best:
            best = s
            ids = [u]
        elif s == best:
            ids.append(u)
    return ids


def _select(sel: Selector, g: Graph, env: dict[str, int], rng: random.Random,
            bc: _BetweennessCache, random_tie: bool) -> int | None:
    n = g.node_count
    kind = sel.kind
    if kind == "random_node":
        if n == 0:
            return None
        return rng.randrange(n)
    if kind == "highest_degree" or kind == "lowest_degree":
        if n == 0:
            return None
        sign = 1 if kind == "highest_degree" else -1
        ids = _argmax_ids(lambda u: sign * g.degree(u), n)
        return ids[rng.randrange(len(ids))] if random_tie else ids[0]
    if kind == "highest_betweenness":
        if n == 0:
            return None
        values = bc.get(g)
        ids = _argmax_ids(lambda u: values[u], n)
        return ids[rng.randrange(len(ids))] if random_tie else ids[0]
    ref = env[sel.ref]
    if kind == "neighbor_of":
        row = g.neighbors(ref)
        if not row:
            return None
        return row[rng.randrange(len(row))]
    if kind == "highest_degree_neighbor_of":
        best = None
        best_deg = -1
        for w in g.neighbors(ref):
            dw = g.degree(w)
            if dw > best_deg:
                best, best_deg = w, dw
        return best
    if kind == "similar_degree":
        dr = g.degree(ref)
        cands = [w for w in range(n)
                 if w != ref and abs(g.degree(w) - dr) <= sel.max_diff]
        if not cands:
            return None
        return cands[rng.randrange(len(cands))]
    if kind == "non_adjacent_to":
        row = g.neighbors(ref)
        cands = []
        i = 0
        for w in range(n):
            while i < len(row) and row[i] < w:
                i += 1
            if w != ref and (i >= len(row) or row[i] != w):
                cands.append(w)
        if not cands:
            return None
        return cands[rng.randrange(len(cands))]
    raise AssertionError(f"unhandled selector {kind}")


def _apply_move(move: Move, env: dict[str, int], g: Graph):
    """Apply if legal and return an undo callable, else None."""
    vals = [env[a] for a in move.args]
    kind = move.kind
    if kind == "add_edge":
        a, b = vals
        if a == b or g.has_edge(a, b):
            return None
        g.add_edge(a, b)
        return lambda: g.remove_edge(a, b)
    if kind == "remove_edge":
        a, b = vals
        if a == b or not g.has_edge(a, b):
            return None
        g.remove_edge(a, b)
        return lambda: g.add_edge(a, b)
    if kind == "relocate_edge":
        a, b, c = vals
        if a == b or c == b or not g.has_edge(a, b) or g.has_edge(c, b):
            return None
        g.remove_edge(a, b)
        g.add_edge(c, b)

        def undo():
            g.remove_edge(c, b)
            g.add_edge(a, b)

        return undo
    if kind == "swap_edges":
        a, b, c, d = vals
        if not (g.has_edge(a, b) and g.has_edge(c, d)):
            return None
        if a == d or b == c or g.has_edge(a, d) or g.has_edge(c, b):
            return None
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
    raise AssertionError(f"unhandled move {kind}")


def interpret(program: HeuristicProgram, g: Graph, budget: int, seed,
              random_tie: bool = False,
              deadline: float | None = None) -> OptimizerOutcome:
    """Run a program against a private copy of g under an evaluation budget.

    `deadline` is an absolute time.monotonic() value; crossing it raises
    InterpreterTimeout (checked once per iteration).
    """
    if g.node_count < 1:
        raise GraphError("interpreter requires a non-empty graph")
    work = g.copy()
    ev = BudgetedEvaluator(budget)
    rng = random.Random(seed)
    bc = _BetweennessCache()
    current_r = robustness_r(work)
    best_r = current_r
    best_graph = work.copy()
    accepted = 0
    fails = 0
    acc = program.acceptance
    temperature = acc.t0 if acc.kind == "anneal" else 0.0

    while ev.remaining > 0 and fails < STALL_LIMIT:
        if deadline is not None and time.monotonic() > deadline:
            raise InterpreterTimeout(f"deadline exceeded after {ev.used} evaluations")
        applied = False
        for rule in program.rules:
            env: dict[str, int] = {}
            ok = True
            for binding in rule.bindings:
                val = _select(binding.selector, work, env, rng, bc, random_tie)
                if val is None:
                    ok = False
                    break
                env[binding.var] = val
            if not ok:
                continue
            undo = _apply_move(rule.move, env, work)
            if undo is None:
                continue
            try:
                new_r = ev.evaluate(work)
            except BudgetExhausted:
                undo()
                return OptimizerOutcome(best_graph, best_r, ev.used, accepted)
            dr = new_r - current_r
            if acc.kind == "anneal":
                keep = anneal_accept(rng, dr, temperature)
                temperature *= acc.alpha
            else:
                keep = improve_accept(dr)
            if keep:
                accepted += 1
                current_r = new_r
                if new_r > best_r:
                    best_r = new_r
                    best_graph = work.copy()
            else:
                undo()
            applied = True
            break
        if applied:
            fails = 0
        else:
            fails += 1
    return OptimizerOutcome(best_graph, best_r, ev.used, accepted)
