"""Covariance selection: concentration matrices with prescribed zeros.

Decomposable structures have a closed form built from clique and separator
product moments; general graphs go through iterative proportional scaling.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy import linalg

from .acf import Dataset, lagged_moments
from .blockmat import as_symmetric, spd_inverse
from .errors import (
    CliqueTooLarge,
    DimensionMismatch,
    MaxIterationsExceeded,
    NotDecomposable,
    NotPositiveDefinite,
    SingularCliqueMoment,
)
from .graphs import JunctionTree, UndirectedGraph

IPS_TOL = 1e-9
IPS_MAX_ITER = 10000


@dataclass(frozen=True)
class CovselResult:
    K_hat: np.ndarray
    Sigma_hat: np.ndarray
    structure: JunctionTree | None
    lag_extension: int = 0
    n_iter: int = 0
    converged: bool = True


def _embedded_inverse(S, idx, out, sign):
    if not idx:
        return
    block = S[np.ix_(idx, idx)]
    try:
        inv = linalg.cho_solve(linalg.cho_factor(block, lower=True), np.eye(len(idx)))
    except linalg.LinAlgError as exc:
        raise SingularCliqueMoment(f"product-moment matrix of {list(idx)} is singular") from exc
    out[np.ix_(idx, idx)] += sign * 0.5 * (inv + inv.T)


def _validate_jt(jt: JunctionTree):
    seen = set()
    for j, c in enumerate(jt.cliques):
        sep = set(jt.separators[j])
        if sep != set(c) & seen:
            raise NotDecomposable(f"clique {j} violates the running intersection property")
        if j > 0 and not sep <= set(jt.cliques[jt.parents[j]]):
            raise NotDecomposable(f"separator {j} is not contained in its parent clique")
        seen |= set(c)


def covsel_decomposable(S, jt: JunctionTree, n: int) -> CovselResult:
    """Closed-form estimate ``n * (sum_C [S_C^-1] - sum_S [S_S^-1])``.

    ``S`` is the product-moment matrix (sum of centered outer products over ``n``
    observations); ``[.]`` pads a block back to full size with zeros. Positions of
    pairs not covered by any clique are written as exact zeros.
    """
    S = as_symmetric(S, "product-moment matrix")
    if S.shape[0] != jt.d:
        raise DimensionMismatch(f"moments have dimension {S.shape[0]}, structure has {jt.d} nodes")
    _validate_jt(jt)
    if n <= jt.max_clique_size():
        raise CliqueTooLarge(f"n={n} must exceed the largest clique size {jt.max_clique_size()}")
    K = np.zeros_like(S)
    for c in jt.cliques:
        _embedded_inverse(S, list(c), K, +1.0)
    for s in jt.separators[1:]:
        _embedded_inverse(S, list(s), K, -1.0)
    K *= n
    K[~jt.covered_pairs()] = 0.0
    try:
        Sigma = spd_inverse(K)
    except NotPositiveDefinite as exc:
        raise SingularCliqueMoment("covariance selection estimate is not positive definite") from exc
    return CovselResult(K_hat=K, Sigma_hat=Sigma, structure=jt)


def extend_junction_tree(jt: JunctionTree, p: int) -> JunctionTree:
    """Adjoin all ``p*d`` lagged variables (indices d..(p+1)d-1) to every clique and separator."""
    lagged = tuple(range(jt.d, (p + 1) * jt.d))
    return JunctionTree(
        cliques=[tuple(c) + lagged for c in jt.cliques],
        separators=[()] + [tuple(s) + lagged for s in jt.separators[1:]],
        residuals=list(jt.residuals),
        parents=list(jt.parents),
        d=(p + 1) * jt.d,
    )


def covsel_lagged_moments(S, jt: JunctionTree, p: int, n_eff: int) -> CovselResult:
    """Covariance selection on the ``(p+1)d`` lagged product moments.

    Zeros are placed only at contemporaneous non-edges; every entry involving a
    lagged variable is left free.
    """
    ext = extend_junction_tree(jt, p) if p > 0 else jt
    res = covsel_decomposable(S, ext, n_eff)
    return CovselResult(K_hat=res.K_hat, Sigma_hat=res.Sigma_hat, structure=jt, lag_extension=p)


def covsel_lagged(data, jt: JunctionTree, p: int) -> CovselResult:
    """Restricted concentration matrix of ``(X_t, ..., X_{t-p})`` from ``n - p`` lagged samples."""
    d = data.d if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data).T).shape[0]
    if d != jt.d:
        raise DimensionMismatch(f"data has {d} variables, structure has {jt.d} nodes")
    S, n_eff = lagged_moments(data, p)
    return covsel_lagged_moments(S, jt, p, n_eff)


def maximal_cliques(g: UndirectedGraph) -> list[tuple[int, ...]]:
    G = nx.from_numpy_array(g.adjacency.astype(int))
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(G))


def ips_covsel(S, g: UndirectedGraph, n: int = 1, tol: float = IPS_TOL, max_iter: int = IPS_MAX_ITER,
               raise_on_failure: bool = False) -> CovselResult:
    """Iterative proportional scaling for an arbitrary graph.

    Each sweep visits the maximal cliques in order and adjusts the concentration
    matrix so the fitted covariance matches ``S / n`` on that clique. Stops when the
    largest absolute change of the fitted covariance over a sweep is below ``tol``.
    On hitting ``max_iter`` the last iterate is returned with ``converged=False``
    (or :class:`MaxIterationsExceeded` is raised when ``raise_on_failure``).
    """
    target = as_symmetric(S, "product-moment matrix") / n
    if target.shape[0] != g.d:
        raise DimensionMismatch(f"moments have dimension {target.shape[0]}, graph has {g.d} nodes")
    cliques = maximal_cliques(g)
    target_inv = []
    for c in cliques:
        idx = list(c)
        try:
            target_inv.append(spd_inverse(target[np.ix_(idx, idx)]))
        except NotPositiveDefinite as exc:
            raise SingularCliqueMoment(f"moment block of {idx} is singular") from exc

    K = np.diag(1.0 / np.diag(target))
    Sigma = np.diag(np.diag(target))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        prev = Sigma
        for c, tinv in zip(cliques, target_inv):
            idx = np.ix_(c, c)
            K[idx] += tinv - spd_inverse(Sigma[idx])
            K = 0.5 * (K + K.T)
            Sigma = spd_inverse(K)
        if np.abs(Sigma - prev).max() < tol:
            converged = True
            break
    if not converged:
        msg = f"IPS did not converge in {max_iter} sweeps"
        if raise_on_failure:
            raise MaxIterationsExceeded(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return CovselResult(K_hat=K, Sigma_hat=Sigma, structure=None, n_iter=it, converged=converged)
