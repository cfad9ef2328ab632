import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from robustnet.errors import ConfigError
from robustnet.graph import (
    BaParams,
    EdgeListError,
    Graph,
    GraphError,
    betweenness_centrality,
    degree_sequence,
    generate_ba,
    largest_component_size,
    read_edge_list,
    write_edge_list,
)

from conftest import complete_graph, make_graph, random_graph


class TestEdgeMutation:
    def test_add_edge_counts(self):
        g = Graph(3)
        assert g.add_edge(0, 1) is True
        assert g.edge_count == 1

    def test_add_existing_edge_is_noop(self, triangle):
        assert triangle.add_edge(0, 1) is False
        assert triangle.edge_count == 3

    def test_self_loop_rejected(self):
        g = Graph(3)
        with pytest.raises(GraphError):
            g.add_edge(2, 2)

    def test_out_of_range_rejected(self):
        g = Graph(3)
        with pytest.raises(GraphError):
            g.add_edge(0, 3)
        with pytest.raises(GraphError):
            g.remove_edge(0, 9)

    def test_remove_edge(self, triangle):
        assert triangle.remove_edge(0, 1) is True
        assert triangle.edge_count == 2

    def test_remove_absent_edge(self, path3):
        assert path3.remove_edge(0, 2) is False
        assert path3.edge_count == 2

    def test_neighbors_sorted(self):
        g = make_graph(5, [(3, 1), (3, 4), (3, 0), (3, 2)])
        assert g.neighbors(3) == [0, 1, 2, 4]

    def test_copy_is_independent(self, triangle):
        clone = triangle.copy()
        clone.remove_edge(0, 1)
        assert triangle.has_edge(0, 1)
        assert clone != triangle


@st.composite
def edge_ops(draw):
    n = draw(st.integers(min_value=2, max_value=10))
    ops = draw(st.lists(st.tuples(st.booleans(),
                                  st.integers(0, n - 1),
                                  st.integers(0, n - 1)),
                        max_size=60))
    return n, ops


@given(edge_ops())
@settings(max_examples=150)
def test_mutation_keeps_adjacency_consistent(case):
    n, ops = case
    g = Graph(n)
    mirror = set()
    for add, u, v in ops:
        if u == v:
            continue
        if add:
            g.add_edge(u, v)
            mirror.add(frozenset((u, v)))
        else:
            g.remove_edge(u, v)
            mirror.discard(frozenset((u, v)))
    # full recount audit
    assert g.edge_count == len(mirror)
    assert sum(g.degree(u) for u in range(n)) == 2 * g.edge_count
    for u in range(n):
        for v in g.neighbors(u):
            assert u in g.neighbors(v)
    assert set(frozenset(e) for e in g.edges()) == mirror


class TestBaGeneration:
    def test_edge_count_formula(self):
        g = generate_ba(BaParams(100, 3, 2, seed=0))
        assert g.edge_count == 3 + 97 * 2

    def test_no_arrivals_gives_clique(self):
        g = generate_ba(BaParams(4, 4, 3, seed=0))
        assert g == complete_graph(4)

    def test_deterministic(self):
        a = generate_ba(BaParams(60, 3, 2, seed=9))
        b = generate_ba(BaParams(60, 3, 2, seed=9))
        assert a == b

    def test_connected(self):
        g = generate_ba(BaParams(80, 4, 3, seed=5))
        assert largest_component_size(g) == 80

    @pytest.mark.parametrize("n,n0,m0", [(2, 3, 1), (10, 1, 1), (10, 3, 4)])
    def test_invalid_params(self, n, n0, m0):
        with pytest.raises(ConfigError):
            BaParams(n, n0, m0)

    @given(st.integers(2, 6), st.integers(0, 20), st.integers(1, 6), st.integers(0, 1000))
    @settings(max_examples=40)
    def test_edge_count_property(self, n0, extra, m0, seed):
        m0 = min(m0, n0)
        n = n0 + extra
        g = generate_ba(BaParams(n, n0, m0, seed=seed))
        assert g.edge_count == n0 * (n0 - 1) // 2 + (n - n0) * m0
        assert sum(degree_sequence(g)) == 2 * g.edge_count
        assert largest_component_size(g) == n


class TestDegreeAndComponents:
    def test_star_degrees(self, star5):
        assert degree_sequence(star5) == [4, 1, 1, 1, 1]

    def test_triangle_degrees(self, triangle):
        assert degree_sequence(triangle) == [2, 2, 2]

    def test_ba_degree_sum(self):
        g = generate_ba(BaParams(100, 3, 2, seed=0))
        assert sum(degree_sequence(g)) == 394

    def test_lcc_triangle(self, triangle):
        assert largest_component_size(triangle) == 3

    def test_lcc_disjoint_edges(self):
        assert largest_component_size(make_graph(4, [(0, 1), (2, 3)])) == 2

    def test_lcc_isolated(self):
        assert largest_component_size(Graph(5)) == 1

    def test_lcc_empty(self):
        assert largest_component_size(Graph(0)) == 0


class TestEdgeListIo:
    def test_read_path(self):
        g = read_edge_list(io.StringIO("0 1\n1 2\n"))
        assert g.node_count == 3
        assert g.edge_count == 2
        assert g.has_edge(0, 1) and g.has_edge(1, 2)

    def test_comments_blanks_duplicates(self):
        g = read_edge_list(io.StringIO("# header\n\n0 1\n1 0\n 1 2 \n"))
        assert g.node_count == 3
        assert g.edge_count == 2

    def test_compaction_first_appearance(self):
        g = read_edge_list(io.StringIO("7 3\n3 9\n"))
        # 7 -> 0, 3 -> 1, 9 -> 2
        assert g.node_count == 3
        assert g.has_edge(0, 1) and g.has_edge(1, 2)

    def test_self_loop_line_number(self):
        with pytest.raises(EdgeListError) as err:
            read_edge_list(io.StringIO("0 1\n0 0\n"))
        assert err.value.line == 2

    def test_malformed_line(self):
        with pytest.raises(EdgeListError) as err:
            read_edge_list(io.StringIO("0 1 2\n"))
        assert err.value.line == 1

    def test_negative_id(self):
        with pytest.raises(EdgeListError):
            read_edge_list(io.StringIO("-1 2\n"))

    @pytest.mark.parametrize("seed", range(5))
    def test_ba_round_trip(self, seed, tmp_path):
        g = generate_ba(BaParams(60, 3, 2, seed=seed))
        path = tmp_path / "g.el"
        write_edge_list(g, path)
        assert read_edge_list(path) == g

    def test_round_trip_bytes_stream(self):
        g = generate_ba(BaParams(30, 2, 1, seed=1))
        buf = io.StringIO()
        write_edge_list(g, buf)
        again = read_edge_list(io.BytesIO(buf.getvalue().encode()))
        assert again == g


def _brute_betweenness(g: Graph) -> list[float]:
    # enumerate all shortest paths per pair by DFS over a BFS distance field
    from collections import deque

    n = g.node_count
    bc = [0.0] * n
    for s in range(n):
        for t in range(s + 1, n):
            dist = [-1] * n
            dist[s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w in g.neighbors(v):
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        queue.append(w)
            if dist[t] < 0:
                continue
            paths: list[list[int]] = []

            def extend(path):
                v = path[-1]
                if v == t:
                    paths.append(path)
                    return
                for w in g.neighbors(v):
                    if dist[w] == dist[v] + 1:
                        extend(path + [w])

            extend([s])
            for p in paths:
                for v in p[1:-1]:
                    bc[v] += 1.0 / len(paths)
    return bc


@pytest.mark.parametrize("seed", range(8))
def test_betweenness_matches_path_enumeration(seed):
    g = random_graph(random.Random(seed), n=7, p=0.4)
    got = betweenness_centrality(g)
    want = _brute_betweenness(g)
    assert got == pytest.approx(want, abs=1e-9)
