import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cubic_hamiltonian
from overlay_closure import catalog
from overlay_closure.graph import Graph, GraphError
from overlay_closure.hcp_model import (
    build_hcp_exclusions,
    companion_closure,
    covering_pairs,
    cycle_to_permutation,
    hamilton_cycles,
)
from overlay_closure.qmatrix import PairKey, QMatrix, init_q, initial_counts, zero_pair


def reference_exclusions(g: Graph):
    """Straight transcription with networkx distances, 1-based P indices."""
    labels = g.position_labels() + [g.anchor]
    n = len(labels) - 1
    h = nx.Graph()
    h.add_nodes_from(range(1, n + 2))
    for a, b in g.edges():
        h.add_edge(labels.index(a) + 1, labels.index(b) + 1)
    a = n + 1

    def dist(x, y):
        had = h.has_edge(x, y)
        if had:
            h.remove_edge(x, y)
        try:
            m = nx.shortest_path_length(h, x, y)
        except nx.NetworkXNoPath:
            m = n + 1
        if had:
            h.add_edge(x, y)
        return int(had), m

    pairs, forced = set(), set()

    def add(u, i, v, j):
        if u != v and i != j:
            pairs.add(PairKey.make(u, i, v, j))

    for u in range(1, n + 1):
        arc, m = dist(u, a)
        for k in range(arc + 1, m):
            forced.add((u, n + 1 - k))
            for v in range(1, n + 1):
                for j in range(1, n + 1):
                    add(v, j, u, n + 1 - k)
        arc, m = dist(a, u)
        for k in range(arc + 1, m):
            forced.add((u, k))
            for v in range(1, n + 1):
                for i in range(1, n + 1):
                    add(u, k, v, i)
    for u, v in itertools.permutations(range(1, n + 1), 2):
        arc, m = dist(u, v)
        for k in range(arc + 1, m):
            for l in range(1, n - k + 1):
                add(u, l, v, l + k)
    return pairs, forced


def test_k4_excludes_nothing():
    e = build_hcp_exclusions(catalog.complete(4))
    assert len(e) == 0 and not e.forced_zero_p


def test_c4_hand_trace():
    e = build_hcp_exclusions(catalog.cycle(4))
    assert e.forced_zero_p == {(1, 2), (2, 1), (2, 3), (3, 2)}
    general = {
        (1, 1, 2, 3), (2, 1, 1, 3), (1, 1, 3, 2), (1, 2, 3, 3),
        (3, 1, 1, 2), (3, 2, 1, 3), (2, 1, 3, 3), (3, 1, 2, 3),
    }
    forced = e.forced_zero_p
    touching = {tuple(k) for k in (PairKey.make(u, i, v, j) for (u, i) in forced
                for v in range(1, 4) for j in range(1, 4) if v != u and j != i)}
    assert {tuple(k) for k in e} == general | touching


@pytest.mark.parametrize("name", ["petersen", "tietze", "herschel", "c6", "prism3", "k5"])
def test_matches_reference_transcription(name):
    g = catalog.CATALOG[name]()
    e = build_hcp_exclusions(g)
    pairs, forced = reference_exclusions(g)
    assert set(e) == pairs
    assert forced <= e.forced_zero_p


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 9), st.floats(0.3, 0.9), st.integers(0, 2**31))
def test_random_graphs_match_reference(nv, p, seed):
    h = nx.gnp_random_graph(nv, p, seed=seed)
    if not nx.is_connected(h):
        return
    g = Graph(nx.to_numpy_array(h, nodelist=range(nv), dtype=bool), anchor=1 + seed % nv)
    e = build_hcp_exclusions(g)
    pairs, forced = reference_exclusions(g)
    assert set(e) == pairs
    assert forced <= e.forced_zero_p


def test_graph_left_untouched():
    g = catalog.petersen()
    before = g.adjacency.copy()
    build_hcp_exclusions(g)
    assert np.array_equal(g.adjacency, before)


def test_too_small_graph():
    with pytest.raises(GraphError):
        build_hcp_exclusions(Graph(np.array([[0, 1], [1, 0]], bool)))


def test_cycle_encoding():
    c4 = catalog.cycle(4)
    assert cycle_to_permutation(c4, [4, 1, 2, 3]) == [1, 2, 3]
    assert cycle_to_permutation(c4, [1, 2, 3, 4]) == [1, 2, 3]
    assert cycle_to_permutation(c4, [4, 3, 2, 1]) == [3, 2, 1]
    assert covering_pairs([1, 2, 3]) == [(1, 1, 2, 2), (1, 1, 3, 3), (2, 2, 3, 3)]
    with pytest.raises(GraphError):
        cycle_to_permutation(c4, [1, 3, 2, 4])


def test_hamilton_cycles_counts():
    # K4 has 3 undirected Hamilton cycles, 6 directed ones through a fixed start
    assert len(hamilton_cycles(catalog.complete(4))) == 6
    assert hamilton_cycles(catalog.petersen()) == []


def brute_cycles(g):
    nv = g.vertex_count
    rest = [v for v in range(1, nv + 1) if v != g.anchor]
    for order in itertools.permutations(rest):
        cyc = [g.anchor, *order]
        if all(g.adjacency[x - 1, y - 1] for x, y in zip(cyc, cyc[1:] + cyc[:1])):
            yield cyc


@pytest.mark.parametrize("name", ["k4", "k5", "c6", "prism3"])
def test_no_real_cycle_is_excluded(name):
    for anchor in range(1, catalog.CATALOG[name]().vertex_count + 1):
        g = catalog.CATALOG[name]().with_anchor(anchor)
        e = build_hcp_exclusions(g)
        cycles = list(brute_cycles(g))
        assert cycles
        for cyc in cycles:
            for direction in (cyc, [cyc[0]] + cyc[1:][::-1]):
                perm = cycle_to_permutation(g, direction)
                for k in covering_pairs(perm):
                    assert k not in e
                assert not {(r, i) for r, i in enumerate(perm, 1)} & e.forced_zero_p


def test_random_cubic_hamiltonian_cycles_survive():
    rng = np.random.default_rng(3)
    for _ in range(20):
        nv = int(rng.choice([6, 8]))
        g = Graph.from_edges(nv, cubic_hamiltonian(rng, nv), anchor=int(rng.integers(1, nv + 1)))
        e = build_hcp_exclusions(g)
        for cyc in brute_cycles(g):
            for k in covering_pairs(cycle_to_permutation(g, cyc)):
                assert k not in e


def test_petersen_counts_independent_of_anchor():
    g = catalog.petersen()
    for a in range(1, 11):
        e = build_hcp_exclusions(g.with_anchor(a))
        assert initial_counts(9, e) == (57, 858)
        assert init_q(9, e).counts() == (57, 834)


def test_companion_partner():
    q = init_q(9)
    zero_pair(q, (1, 2, 3, 4))
    assert companion_closure(q)
    assert not q.cell(1, 8, 3, 6) and not q.cell(3, 6, 1, 8)
    assert q.invariant_violations() == []
    assert not companion_closure(q)


def test_companion_on_symmetric_q_is_noop():
    assert not companion_closure(init_q(5))
    # an HCP model of an undirected graph is already reversal symmetric
    g = catalog.petersen()
    q = init_q(9, build_hcp_exclusions(g))
    assert not companion_closure(q)


def test_companion_idempotent_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(3, 7))
        q = init_q(n)
        for _ in range(int(rng.integers(1, 8))):
            u, v = rng.choice(n, 2, replace=False) + 1
            i, j = rng.choice(n, 2, replace=False) + 1
            zero_pair(q, (u, i, v, j))
        companion_closure(q)
        a = q.to_array()
        rev = a[:, ::-1, :, ::-1]
        assert np.array_equal(a, rev)
        assert not companion_closure(q)
