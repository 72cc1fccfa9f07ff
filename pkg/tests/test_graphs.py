import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_bipartite_cover_size, brute_matching_size, brute_vertex_cover_size, petersen_edges
from turnstile_lab.graphs import (
    BipartiteCover,
    BipartiteGraph,
    CapacityError,
    GeneralGraph,
    greedy_maximal_matching,
    is_valid_cover,
    is_valid_matching,
    maximum_matching,
    minimum_vertex_cover_bipartite,
    minimum_vertex_cover_exact,
)
from turnstile_lab.matrix import derive_rng


def random_bipartite(n, rng, p=0.35):
    return BipartiteGraph.from_adjacency(rng.random((n, n)) < p)


def random_general(n, rng, p=0.3, loops=False):
    edges = [(u, v) for u, v in itertools.combinations(range(1, n + 1), 2) if rng.random() < p]
    if loops:
        edges += [(u, u) for u in range(1, n + 1) if rng.random() < 0.1]
    return GeneralGraph(n, edges)


def test_identity_matching():
    g = BipartiteGraph(8, 8, [(i, i) for i in range(1, 9)])
    m = maximum_matching(g)
    assert len(m) == 8 and is_valid_matching(g, m)


def test_empty_matching():
    assert maximum_matching(BipartiteGraph(4, 4)) == []


def test_matching_agrees_with_exhaustive_search():
    rng = derive_rng(11)
    for _ in range(50):
        g = random_bipartite(8, rng)
        m = maximum_matching(g)
        assert is_valid_matching(g, m)
        assert len(m) == brute_matching_size(g.edges)


def test_bipartite_cover_examples():
    assert len(minimum_vertex_cover_bipartite(BipartiteGraph(2, 2, [(1, 2)]))) == 1
    g = BipartiteGraph(6, 6, [(i, i) for i in range(1, 7)])
    assert len(minimum_vertex_cover_bipartite(g)) == 6


def test_bipartite_cover_agrees_with_exhaustive_search():
    rng = derive_rng(12)
    for _ in range(50):
        g = random_bipartite(7, rng)
        c = minimum_vertex_cover_bipartite(g)
        assert is_valid_cover(g, c)
        assert len(c) == brute_bipartite_cover_size(7, 7, g.edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_konig(nl, nr, seed):
    g = BipartiteGraph.from_adjacency(np.random.default_rng(seed).random((nl, nr)) < 0.4)
    c = minimum_vertex_cover_bipartite(g)
    assert is_valid_cover(g, c)
    assert len(c) == len(maximum_matching(g))


def test_exact_cover_examples():
    assert len(minimum_vertex_cover_exact(GeneralGraph(3, [(1, 2), (2, 3), (1, 3)]))) == 2
    star = GeneralGraph(6, [(1, v) for v in range(2, 7)])
    assert minimum_vertex_cover_exact(star) == {1}
    assert len(minimum_vertex_cover_exact(GeneralGraph(10, petersen_edges()))) == 6


def test_exact_cover_forces_self_loops():
    g = GeneralGraph(4, [(2, 2), (3, 4)])
    c = minimum_vertex_cover_exact(g)
    assert 2 in c and len(c) == 2 and is_valid_cover(g, c)


def test_exact_cover_capacity():
    with pytest.raises(CapacityError):
        minimum_vertex_cover_exact(GeneralGraph(65))
    assert minimum_vertex_cover_exact(GeneralGraph(65), cap=100) == frozenset()


def test_exact_cover_exhaustive_sweep_small_graphs():
    rng = derive_rng(13)
    for n in range(1, 11):
        for _ in range(12):
            g = random_general(n, rng, p=rng.uniform(0.1, 0.7), loops=True)
            c = minimum_vertex_cover_exact(g)
            assert is_valid_cover(g, c)
            assert len(c) == brute_vertex_cover_size(range(1, n + 1), g.edges)


def test_exact_cover_at_least_greedy_matching():
    rng = derive_rng(14)
    for _ in range(20):
        g = random_general(30, rng, p=0.15)
        assert len(minimum_vertex_cover_exact(g)) >= len(greedy_maximal_matching(g))


def test_exact_cover_is_deterministic():
    g = GeneralGraph(4, [(1, 2), (3, 4)])
    assert minimum_vertex_cover_exact(g) == minimum_vertex_cover_exact(g) == {1, 3}


def test_validity_checks():
    g = BipartiteGraph(3, 3, [(1, 1), (2, 2)])
    assert not is_valid_matching(g, [(1, 2)])
    assert not is_valid_matching(g, [(1, 1), (1, 1)])
    assert is_valid_matching(g, [])
    assert is_valid_cover(g, BipartiteCover(frozenset({1, 2, 3}), frozenset({1, 2, 3})))
    assert not is_valid_cover(g, BipartiteCover(frozenset({1}), frozenset()))
    h = GeneralGraph(3, [(1, 2), (2, 3)])
    assert is_valid_cover(h, {1, 2, 3}) and is_valid_cover(h, {2})
    assert not is_valid_matching(h, [(1, 2), (2, 3)])


def test_edge_list_round_trip():
    g = BipartiteGraph(3, 4, [(1, 4), (3, 2)])
    assert BipartiteGraph.from_text(g.to_text()).edges == g.edges
    h = GeneralGraph(5, [(1, 2), (4, 4)])
    assert GeneralGraph.from_text(h.to_text()).edges == h.edges


def test_graph_rejects_duplicates_and_range():
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, [(1, 1), (1, 1)])
    with pytest.raises(ValueError):
        GeneralGraph(3, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        GeneralGraph(3, [(1, 4)])
