import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalvar.acf import lagged_moments
from causalvar.covsel import (
    covsel_decomposable,
    covsel_lagged,
    extend_junction_tree,
    ips_covsel,
    maximal_cliques,
)
from causalvar.errors import CliqueTooLarge, MaxIterationsExceeded, NotDecomposable
from causalvar.graphs import JunctionTree, UndirectedGraph, junction_tree

from support import random_perfect_chordal


def _moments(rng, n, d):
    X = rng.standard_normal((n, d)) @ rng.standard_normal((d, d))
    Z = X - X.mean(axis=0)
    return Z.T @ Z


def test_complete_graph_is_saturated_estimate():
    S = _moments(np.random.default_rng(0), 50, 4)
    res = covsel_decomposable(S, junction_tree(UndirectedGraph.complete(4)), 50)
    assert np.allclose(res.K_hat, 50 * np.linalg.inv(S))


def test_two_cliques_by_hand():
    # path 0 - 1 - 2: K = n ([S_01^-1] + [S_12^-1] - [S_1^-1])
    S = _moments(np.random.default_rng(1), 40, 3)
    jt = junction_tree(UndirectedGraph.from_edges(3, [(0, 1), (1, 2)]))
    expect = np.zeros((3, 3))
    expect[:2, :2] += np.linalg.inv(S[:2, :2])
    expect[1:, 1:] += np.linalg.inv(S[1:, 1:])
    expect[1, 1] -= 1.0 / S[1, 1]
    res = covsel_decomposable(S, jt, 40)
    assert np.allclose(res.K_hat, 40 * expect)
    assert res.K_hat[0, 2] == 0.0 and res.K_hat[2, 0] == 0.0


@given(st.integers(2, 8), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_closed_form_matches_clique_marginals(d, seed):
    rng = np.random.default_rng(seed)
    g = random_perfect_chordal(rng, d)
    n = 60
    S = _moments(rng, n, d)
    res = covsel_decomposable(S, junction_tree(g), n)
    # the fitted covariance reproduces S/n on every clique and has exact zeros at non-edges
    for c in junction_tree(g).cliques:
        idx = np.ix_(c, c)
        assert np.allclose(res.Sigma_hat[idx], S[idx] / n, atol=1e-10)
    off = ~g.adjacency & ~np.eye(d, dtype=bool)
    assert np.all(res.K_hat[off] == 0.0)


@given(st.integers(2, 8), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_ips_matches_closed_form(d, seed):
    rng = np.random.default_rng(seed)
    g = random_perfect_chordal(rng, d)
    S = _moments(rng, 80, d)
    a = covsel_decomposable(S, junction_tree(g), 80).K_hat
    b = ips_covsel(S, g, n=80)
    assert b.converged
    assert np.abs(a - b.K_hat).max() <= 1e-6 * np.abs(a).max()


def test_ips_on_four_cycle_matches_edge_marginals():
    g = UndirectedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    S = _moments(np.random.default_rng(3), 100, 4)
    res = ips_covsel(S, g, n=100)
    assert res.converged
    for i, j in g.edges() + [(k, k) for k in range(4)]:
        assert res.Sigma_hat[i, j] == pytest.approx(S[i, j] / 100, abs=1e-8)
    assert abs(res.K_hat[0, 2]) < 1e-12 and abs(res.K_hat[1, 3]) < 1e-12
    assert set(maximal_cliques(g)) == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_ips_iteration_cap():
    g = UndirectedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    S = _moments(np.random.default_rng(3), 100, 4)
    with pytest.warns(RuntimeWarning):
        res = ips_covsel(S, g, n=100, tol=0.0, max_iter=3)
    assert not res.converged and res.n_iter == 3
    with pytest.raises(MaxIterationsExceeded):
        ips_covsel(S, g, n=100, tol=0.0, max_iter=3, raise_on_failure=True)


def test_clique_too_large_and_bad_structure():
    S = np.eye(3)
    with pytest.raises(CliqueTooLarge):
        covsel_decomposable(S, junction_tree(UndirectedGraph.complete(3)), 3)
    bad = JunctionTree(cliques=[(0, 1), (1, 2)], separators=[(), ()], residuals=[(0, 1), (2,)], parents=[None, 0], d=3)
    with pytest.raises(NotDecomposable):
        covsel_decomposable(S, bad, 10)


def test_lag_extension_keeps_lagged_entries_free():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((400, 3))
    g = UndirectedGraph.from_edges(3, [(0, 1), (1, 2)])
    jt = junction_tree(g)
    ext = extend_junction_tree(jt, 2)
    assert ext.d == 9 and all(set(range(3, 9)) <= set(c) for c in ext.cliques)
    res = covsel_lagged(X, jt, 2)
    assert res.K_hat.shape == (9, 9)
    assert res.K_hat[0, 2] == 0.0
    assert np.all(res.K_hat[3:, :] != 0.0)
    # factor n - p on the lagged product moments
    S, m = lagged_moments(X, 2)
    assert m == 398
    saturated = covsel_lagged(X, junction_tree(UndirectedGraph.complete(3)), 2)
    assert np.allclose(saturated.K_hat, m * np.linalg.inv(S))
