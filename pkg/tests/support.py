"""Generators and independent oracles shared by the test modules."""
from __future__ import annotations

import numpy as np

from causalvar.graphs import UndirectedGraph
from causalvar.model import CvarModel, check_stability


def random_spd(rng, n, cond_shift=None):
    W = rng.standard_normal((n, n))
    shift = n if cond_shift is None else cond_shift
    return W @ W.T + shift * np.eye(n)


def scalar_ldl_oracle(K):
    """Unit lower L and pivots D with K = L diag(D) L^T, read off the Cholesky factor."""
    G = np.linalg.cholesky(K)
    g = np.diag(G)
    return G / g, g ** 2


def random_cvar(rng, d, p, coef_scale=0.3, max_radius=0.9, names=None):
    """Random stable CVAR(p) in structural form."""
    while True:
        A = np.eye(d) + np.triu(rng.uniform(-0.6, 0.6, (d, d)), 1)
        B = tuple(rng.uniform(-coef_scale, coef_scale, (d, d)) / (k + 1) for k in range(p))
        Delta = rng.uniform(0.5, 2.0, d)
        m = CvarModel(A=A, B=B, Delta=Delta, ordering=tuple(names or ()))
        if check_stability(m) < max_radius:
            return m


def random_perfect_chordal(rng, d, attach_prob=0.6):
    """Random connected chordal graph for which the identity labeling is perfect.

    Nodes are added from label d down to 1; each new node is joined to a random
    non-empty subset of an existing clique, so its later-labeled neighbors are
    always complete.
    """
    adj = np.zeros((d, d), dtype=bool)
    cliques = [[d - 1]]
    for v in range(d - 2, -1, -1):
        base = cliques[rng.integers(len(cliques))]
        keep = [u for u in base if rng.random() < attach_prob] or [base[rng.integers(len(base))]]
        for u in keep:
            adj[u, v] = adj[v, u] = True
        cliques.append(keep + [v])
    return UndirectedGraph(adj)


def brute_force_is_chordal(adj):
    """A graph is chordal iff repeatedly deleting simplicial vertices empties it."""
    adj = np.array(adj, dtype=bool)
    alive = list(range(adj.shape[0]))
    while alive:
        for v in alive:
            nb = [w for w in alive if adj[v, w] and w != v]
            if all(adj[a, b] for i, a in enumerate(nb) for b in nb[i + 1:]):
                alive.remove(v)
                break
        else:
            return False
    return True


def lagged_cov_oracle(X, p):
    """Sample covariance of (x_t, ..., x_{t-p}) from explicit loops over t (1/n divisor, full mean)."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    Z = X - X.mean(axis=0)
    C = np.zeros(((p + 1) * d, (p + 1) * d))
    for i in range(p + 1):
        for j in range(p + 1):
            h = i - j  # block (i, j) is E x_{t-i} x_{t-j}^T = C(i - j)
            acc = np.zeros((d, d))
            for t in range(n - abs(h)):
                if h >= 0:
                    acc += np.outer(Z[t], Z[t + h])
                else:
                    acc += np.outer(Z[t - h], Z[t])
            C[i * d:(i + 1) * d, j * d:(j + 1) * d] = acc / n
    return C
