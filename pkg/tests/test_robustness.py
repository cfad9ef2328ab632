import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from robustnet.graph import BaParams, Graph, GraphError, generate_ba
from robustnet.robustness import (
    HAVE_NUMBA,
    AttackTrace,
    BudgetExhausted,
    BudgetedEvaluator,
    _attack_kernel_py,
    _lcc_sizes,
    attack_trace,
    robustness_r,
)

from conftest import (
    brute_attack_sizes,
    brute_r,
    complete_graph,
    lcc_sizes_for_order,
    make_graph,
    random_graph,
)


class TestAttackTrace:
    def test_path3(self, path3):
        assert attack_trace(path3).lcc_sizes == (1, 1, 0)
        assert attack_trace(path3).fractions() == [1 / 3, 1 / 3, 0.0]

    def test_k4(self, k4):
        assert attack_trace(k4).lcc_sizes == (3, 2, 1, 0)

    def test_single_node(self):
        assert attack_trace(Graph(1)).lcc_sizes == (0,)

    def test_empty_graph_rejected(self):
        with pytest.raises(GraphError):
            attack_trace(Graph(0))

    def test_input_unmodified(self, k4):
        before = k4.copy()
        attack_trace(k4)
        assert k4 == before

    @pytest.mark.parametrize("seed", range(10))
    def test_trace_invariants(self, seed):
        g = random_graph(random.Random(seed), n=11)
        trace = attack_trace(g)
        sizes = trace.lcc_sizes
        assert len(sizes) == g.node_count
        assert sizes[-1] == 0
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))


def test_brute_force_agreement_on_200_random_graphs():
    rng = random.Random(42)
    for _ in range(200):
        n = rng.randrange(1, 13)
        g = random_graph(rng, n, p=rng.choice([0.15, 0.3, 0.5]))
        assert list(attack_trace(g).lcc_sizes) == brute_attack_sizes(g)


class TestRobustnessR:
    def test_k4(self, k4):
        assert robustness_r(k4) == 0.375

    def test_star(self, star5):
        assert robustness_r(star5) == 0.16

    def test_path3(self, path3):
        assert robustness_r(path3) == 2 / 9

    @pytest.mark.parametrize("n", range(3, 11))
    def test_complete_graph_upper_bound(self, n):
        assert robustness_r(complete_graph(n)) == (n - 1) / (2 * n)

    @pytest.mark.parametrize("seed", range(20))
    def test_range(self, seed):
        g = random_graph(random.Random(seed), n=10)
        n = g.node_count
        assert 0 <= robustness_r(g) <= (n - 1) / (2 * n)


def _attack_order_unique(g: Graph) -> bool:
    alive = set(range(g.node_count))
    adj = {u: set(g.neighbors(u)) for u in range(g.node_count)}
    while alive:
        degs = {u: sum(1 for w in adj[u] if w in alive) for u in alive}
        top = max(degs.values())
        if sum(1 for d in degs.values() if d == top) > 1:
            return False
        alive.discard(max(degs, key=degs.get))
    return True


@given(st.integers(0, 10_000), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_label_invariance_when_attack_order_unique(gseed, pseed):
    g = random_graph(random.Random(gseed), n=9, p=0.3)
    assume(_attack_order_unique(g))
    perm = list(range(g.node_count))
    random.Random(pseed).shuffle(perm)
    h = Graph(g.node_count)
    for u, v in g.edges():
        h.add_edge(perm[u], perm[v])
    assert robustness_r(h) == robustness_r(g)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_supergraph_dominates_under_identical_removal_order(seed):
    rng = random.Random(seed)
    g = random_graph(rng, n=9, p=0.25)
    missing = [(u, v) for u in range(9) for v in range(u + 1, 9) if not g.has_edge(u, v)]
    assume(missing)
    extra = missing[rng.randrange(len(missing))]
    big = g.copy()
    big.add_edge(*extra)
    for base in (g, big):
        alive = set(range(base.node_count))
        adj = {u: set(base.neighbors(u)) for u in range(base.node_count)}
        order = []
        while alive:
            u = min(alive, key=lambda x: (-sum(1 for w in adj[x] if w in alive), x))
            alive.discard(u)
            order.append(u)
        small_sizes = lcc_sizes_for_order(g, order)
        big_sizes = lcc_sizes_for_order(big, order)
        assert all(b >= s for b, s in zip(big_sizes, small_sizes))


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled kernel unavailable")
def test_compiled_and_python_kernels_agree():
    rng = random.Random(3)
    for _ in range(25):
        g = random_graph(rng, n=rng.randrange(1, 30), p=0.2)
        fast = _lcc_sizes(g)
        slow = _lcc_sizes(g, kernel=_attack_kernel_py)
        assert list(fast) == list(slow)
    g = generate_ba(BaParams(120, 3, 2, seed=0))
    assert list(_lcc_sizes(g)) == list(_lcc_sizes(g, kernel=_attack_kernel_py))


class TestBudgetedEvaluator:
    def test_counts_and_returns(self, k4):
        ev = BudgetedEvaluator(1)
        assert ev.evaluate(k4) == 0.375
        assert ev.used == 1

    def test_exhaustion(self, k4):
        ev = BudgetedEvaluator(1)
        ev.evaluate(k4)
        with pytest.raises(BudgetExhausted):
            ev.evaluate(k4)
        assert ev.used == 1

    def test_exact_boundary(self, k4):
        ev = BudgetedEvaluator(100)
        for _ in range(100):
            ev.evaluate(k4)
        assert ev.used == 100
        assert ev.remaining == 0

    def test_best_seen_snapshot(self, path3, k4):
        ev = BudgetedEvaluator(5)
        ev.evaluate(path3)
        ev.evaluate(k4)
        best_r, best_g = ev.best_seen
        assert best_r == 0.375
        k4.remove_edge(0, 1)  # snapshot must be isolated from caller mutation
        assert best_g.edge_count == 6

    def test_best_seen_keeps_maximum(self, path3, k4):
        ev = BudgetedEvaluator(5)
        ev.evaluate(k4)
        ev.evaluate(path3)
        assert ev.best_seen[0] == 0.375

    def test_invalid_budget(self):
        with pytest.raises(ValueError):
            BudgetedEvaluator(0)


def test_trace_fractions_match_brute_r():
    rng = random.Random(11)
    for _ in range(20):
        g = random_graph(rng, n=rng.randrange(2, 12))
        assert robustness_r(g) == brute_r(g)


def test_attack_trace_type_roundtrip(path3):
    trace = attack_trace(path3)
    assert isinstance(trace, AttackTrace)
    assert trace.node_count == 3
