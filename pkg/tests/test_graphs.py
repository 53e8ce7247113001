import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from causalvar.errors import DegenerateInput, NotPerfectOrdering, NotTriangulated
from causalvar.graphs import (
    Dag,
    JunctionTree,
    UndirectedGraph,
    build_undirected_graph,
    check_rzp,
    junction_tree,
    mcs_order,
    mcs_perfect_order,
    moralize,
    orient_dag,
    partial_correlations,
    pcorr_t_test,
    perfectness_violation,
    triangulate_fill_in,
)

from support import brute_force_is_chordal, random_perfect_chordal

FOUR_CYCLE = np.array([[1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 1], [1, 0, 1, 1]])


def _random_graph(seed, d, prob):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((d, d)) < prob, 1)
    return UndirectedGraph(upper | upper.T)


def _check_jt_invariants(g, jt):
    seen = set()
    for j, c in enumerate(jt.cliques):
        assert g.is_complete(c)
        assert set(jt.separators[j]) == set(c) & seen
        if j:
            assert set(jt.separators[j]) <= set(jt.cliques[jt.parents[j]])
            # lowest-index valid parent
            assert all(not set(jt.separators[j]) <= set(jt.cliques[i]) for i in range(jt.parents[j]))
        assert set(jt.residuals[j]) == set(c) - set(jt.separators[j])
        seen |= set(c)
    for a, b in g.edges():
        assert any(a in c and b in c for c in jt.cliques)
    assert sum(map(len, jt.cliques)) - sum(map(len, jt.separators)) == g.d
    # maximality
    for c in jt.cliques:
        assert not any(set(c) < set(o) for o in jt.cliques)


def test_partial_correlation_two_by_two():
    assert partial_correlations([[2.0, -1.0], [-1.0, 2.0]])[0, 1] == pytest.approx(0.5)
    assert np.array_equal(partial_correlations(np.diag([1.0, 2.0, 3.0])), np.eye(3))


def test_t_test_closed_form_and_cdf_oracle():
    res = pcorr_t_test(0.5, 104, 4)
    assert res.statistic == pytest.approx(10 * 0.5 / np.sqrt(0.75))
    assert res.dof == 100
    # p-value against numerical integration of the t density
    tail, _ = integrate.quad(lambda x: stats.t.pdf(x, 100), res.statistic, np.inf)
    assert res.p_value == pytest.approx(2 * tail, rel=1e-6)
    assert res.p_value < 1e-6 and res.reject
    zero = pcorr_t_test(0.0, 50, 3)
    assert zero.statistic == 0.0 and zero.p_value == pytest.approx(1.0) and not zero.reject
    big = pcorr_t_test(0.522, 534, 8, alpha=0.008851)
    assert big.statistic == pytest.approx(np.sqrt(526) * 0.522 / np.sqrt(1 - 0.522 ** 2))
    assert big.reject
    with pytest.raises(DegenerateInput):
        pcorr_t_test(1.0, 50, 3)


def test_graph_rules():
    R = np.array([[1.0, 0.3, 0.01], [0.3, 1.0, -0.05], [0.01, -0.05, 1.0]])
    g = build_undirected_graph(R, threshold=0.04)
    assert g.edges() == [(0, 1), (1, 2)]
    assert build_undirected_graph(R, threshold=1.01).edges() == []
    assert build_undirected_graph(np.eye(3), threshold=0.04).edges() == []
    assert build_undirected_graph(R, alpha=0.05, n=1000).edges() == [(0, 1)]
    with pytest.raises(DegenerateInput):
        build_undirected_graph(R, threshold=0.1, alpha=0.05, n=10)


def test_four_by_four_rzp_examples():
    m1 = np.array([[1, 1, 1, 1], [1, 1, 0, 1], [1, 0, 1, 1], [1, 1, 1, 1]])
    m2 = np.array([[1, 1, 0, 1], [1, 1, 1, 1], [0, 1, 1, 1], [1, 1, 1, 1]])
    m3 = np.array([[1, 0, 1, 1], [0, 1, 0, 1], [1, 0, 1, 1], [1, 1, 1, 1]])
    ok, viol = check_rzp(m1)
    assert not ok and viol == [(0, 1, 2)]  # sink V 2 -> 1 <- 3 in 1-based labels
    assert np.array_equal(m1[np.ix_([1, 0, 2, 3], [1, 0, 2, 3])], m2)
    assert check_rzp(m2)[0]
    assert check_rzp(m3)[0]
    for perm in itertools.permutations(range(4)):
        assert not check_rzp(FOUR_CYCLE[np.ix_(perm, perm)])[0]


def test_mcs_flags_four_cycle():
    g = UndirectedGraph(FOUR_CYCLE.astype(bool) & ~np.eye(4, dtype=bool))
    with pytest.raises(NotTriangulated) as err:
        mcs_perfect_order(g)
    v, (a, b) = err.value.node, err.value.missing_edge
    assert not g.adjacency[a, b] and {a, b} <= g.neighbors(v)


def test_mcs_deterministic_on_complete_graph():
    g = UndirectedGraph.complete(4)
    # label 4 goes to the last node, then labels 3, 2, 1 to nodes 0, 1, 2
    assert mcs_perfect_order(g) == [2, 1, 0, 3]
    assert mcs_order(g, start=0) == [3, 2, 1, 0]


@given(st.integers(3, 9), st.floats(0.2, 0.8), st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_mcs_agrees_with_chordality_oracles(d, prob, seed):
    g = _random_graph(seed, d, prob)
    G = nx.from_numpy_array(g.adjacency.astype(int))
    chordal = brute_force_is_chordal(g.adjacency)
    assert chordal == nx.is_chordal(G)
    order = mcs_order(g)
    assert (perfectness_violation(g, order) is None) == chordal
    # a perfect ordering is exactly a relabeling with a reducible zero pattern
    if chordal:
        assert check_rzp(g.reorder(order).adjacency)[0]
        _check_jt_invariants(g, junction_tree(g, order))


@given(st.integers(2, 9), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_junction_tree_of_random_chordal(d, seed):
    g = random_perfect_chordal(np.random.default_rng(seed), d)
    assert check_rzp(g.adjacency)[0]
    jt = junction_tree(g)
    _check_jt_invariants(g, jt)
    assert JunctionTree.from_dict(json.loads(json.dumps(jt.to_dict()))) == jt


def test_junction_tree_small_cases():
    path = UndirectedGraph.from_edges(3, [(0, 1), (1, 2)])
    jt = junction_tree(path)
    assert [set(c) for c in jt.cliques] == [{1, 2}, {0, 1}]
    assert jt.separators[1] == (1,)
    jt = junction_tree(UndirectedGraph.complete(4))
    assert jt.cliques == [(0, 1, 2, 3)] and jt.separators == [()]
    with pytest.raises(NotPerfectOrdering):
        junction_tree(UndirectedGraph.from_edges(3, [(0, 1), (0, 2)]))


def test_stated_restricted_financial_structure():
    # non-edges (1-based): 1-2, 1-3, 1-6, 1-7, 1-8, 2-4, 2-8
    non_edges = {(0, 1), (0, 2), (0, 5), (0, 6), (0, 7), (1, 3), (1, 7)}
    g = UndirectedGraph.from_edges(8, [e for e in itertools.combinations(range(8), 2) if e not in non_edges])
    assert check_rzp(g.adjacency)[0]
    jt = junction_tree(g)
    assert [set(c) for c in jt.cliques] == [{2, 3, 4, 5, 6, 7}, {1, 2, 4, 5, 6}, {0, 3, 4}]
    assert [set(s) for s in jt.separators[1:]] == [{2, 4, 5, 6}, {3, 4}]
    assert jt.parents[1:] == [0, 0]


def test_orientation_moralization_and_sink_v():
    g = UndirectedGraph.from_edges(3, [(0, 1), (0, 2)])
    dag = orient_dag(g)
    assert dag.parents(0) == [1, 2]
    ok, viol = check_rzp(dag.adjacency, kind="upper-triangular")
    assert not ok and viol == [(0, 1, 2)]
    assert moralize(dag).adjacency[1, 2]
    chain = Dag(np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=bool))
    assert np.array_equal(moralize(chain).adjacency, chain.skeleton().adjacency)


@given(st.integers(4, 9), st.floats(0.2, 0.7), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_fill_in_yields_chordal_supergraph(d, prob, seed):
    g = _random_graph(seed, d, prob)
    h, added = triangulate_fill_in(g)
    assert brute_force_is_chordal(h.adjacency)
    assert np.all(h.adjacency >= g.adjacency)
    assert len(added) == int((h.adjacency.sum() - g.adjacency.sum()) // 2)
    if brute_force_is_chordal(g.adjacency):
        assert added == []


def test_fill_in_four_cycle_single_chord():
    g = UndirectedGraph(FOUR_CYCLE.astype(bool) & ~np.eye(4, dtype=bool))
    h, added = triangulate_fill_in(g)
    assert len(added) == 1 and nx.is_chordal(nx.from_numpy_array(h.adjacency.astype(int)))


def test_serialization_round_trips():
    g = UndirectedGraph.from_edges(4, [(0, 1), (2, 3)], labels=("a", "b", "c", "d"))
    back = UndirectedGraph.from_json(g.to_json())
    assert np.array_equal(back.adjacency, g.adjacency) and back.labels == g.labels
    assert g.to_edge_list() == "0 1\n2 3\n"
    back = UndirectedGraph.from_edge_list(g.to_edge_list(), 4, g.labels)
    assert np.array_equal(back.adjacency, g.adjacency)


def test_disconnected_graph_warns():
    g = UndirectedGraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.warns(UserWarning):
        order = mcs_perfect_order(g)
    assert sorted(order) == [0, 1, 2, 3]
