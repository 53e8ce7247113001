"""Causal VAR(p) models: fitting by block LDL, conversion, simulation and likelihood.

The structural equation is ``A X_t + B_1 X_{t-1} + ... + B_p X_{t-p} = U_t`` with
``A`` unit upper triangular (the causal ordering of the contemporaneous
variables) and ``U_t`` uncorrelated with diagonal covariance ``Delta``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .acf import Dataset, Divisor, assemble_block_toeplitz, autocovariances, lagged_moments
from .blockmat import BlockLdlFactors, block_ldl, cvar_partition, spd_inverse
from .covsel import covsel_lagged_moments
from .errors import DimensionMismatch, InsufficientData, NotDecomposable, UnstableModel
from .graphs import JunctionTree, UndirectedGraph, check_rzp, junction_tree


@dataclass(frozen=True)
class Restriction:
    graph: UndirectedGraph
    jt: JunctionTree


@dataclass(frozen=True)
class CvarModel:
    A: np.ndarray
    B: tuple  # B_1..B_p, each d x d
    Delta: np.ndarray  # diagonal of the shock covariance
    ordering: tuple[str, ...] = ()
    restriction: Restriction | None = None
    # fit by-products, not serialized
    K: np.ndarray | None = field(default=None, repr=False, compare=False)
    factors: BlockLdlFactors | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        d = A.shape[0]
        if A.shape != (d, d) or not np.allclose(np.diag(A), 1.0) or np.any(np.tril(A, -1) != 0):
            raise DimensionMismatch("A must be unit upper triangular")
        B = tuple(np.array(b, dtype=float).reshape(d, d) for b in self.B)
        Delta = np.array(self.Delta, dtype=float).reshape(d)
        if np.any(Delta <= 0):
            raise DimensionMismatch("shock variances must be positive")
        ordering = tuple(self.ordering) if self.ordering else tuple(f"v{i + 1}" for i in range(d))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Delta", Delta)
        object.__setattr__(self, "ordering", ordering)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return len(self.B)

    @property
    def restricted(self) -> bool:
        return self.restriction is not None

    @property
    def B_stacked(self) -> np.ndarray:
        """``(B_1 ... B_p)`` as a ``d x pd`` matrix."""
        return np.hstack(self.B) if self.B else np.zeros((self.d, 0))

    def to_dict(self) -> dict:
        doc = {
            "d": self.d,
            "p": self.p,
            "ordering": list(self.ordering),
            "A": self.A.tolist(),
            "B": [b.tolist() for b in self.B],
            "Delta": self.Delta.tolist(),
            "restricted": None,
        }
        if self.restriction is not None:
            doc["restricted"] = {
                "adjacency": self.restriction.graph.adjacency.astype(int).tolist(),
                "junction_tree": self.restriction.jt.to_dict(),
            }
        return doc

    def to_json(self) -> str:
        # repr-based float encoding round-trips exactly
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc) -> "CvarModel":
        restriction = None
        if doc.get("restricted"):
            r = doc["restricted"]
            restriction = Restriction(
                graph=UndirectedGraph(np.array(r["adjacency"], dtype=bool), tuple(doc["ordering"])),
                jt=JunctionTree.from_dict(r["junction_tree"]),
            )
        return cls(
            A=np.array(doc["A"], dtype=float),
            B=tuple(np.array(b, dtype=float) for b in doc["B"]),
            Delta=np.array(doc["Delta"], dtype=float),
            ordering=tuple(doc["ordering"]),
            restriction=restriction,
        )

    @classmethod
    def from_json(cls, text) -> "CvarModel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ReducedModel:
    """``X_t + M_1 X_{t-1} + ... + M_p X_{t-p} = V_t`` with ``Cov(V_t) = Sigma``."""

    M: tuple
    Sigma: np.ndarray


def _aligned(data: Dataset, ordering) -> Dataset:
    return data if ordering is None else data.reorder(ordering)


def _extract(factors: BlockLdlFactors, d: int, p: int):
    L = factors.L
    A = L[:d, :d].T.copy()
    Bt = L[d:, :d]
    B = tuple(Bt[h * d:(h + 1) * d].T.copy() for h in range(p))
    Delta = 1.0 / np.array(factors.Dinv[:d], dtype=float)
    return A, B, Delta


def fit_from_covariance(cov, d: int, p: int, K=None, ordering=(), restriction=None) -> CvarModel:
    """Fit from the covariance of ``(X_t, ..., X_{t-p})`` (or its given inverse ``K``).

    The trailing block of ``D`` is taken as the inverse of the lagged covariance
    block rather than computed.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != ((p + 1) * d, (p + 1) * d):
        raise DimensionMismatch(f"covariance has shape {cov.shape}, expected {((p + 1) * d,) * 2}")
    K = spd_inverse(cov) if K is None else K
    trailing = spd_inverse(cov[d:, d:]) if p > 0 else None
    factors = block_ldl(K, cvar_partition(d, p), trailing=trailing)
    A, B, Delta = _extract(factors, d, p)
    return CvarModel(A=A, B=B, Delta=Delta, ordering=ordering, restriction=restriction, K=K, factors=factors)


def fit_unrestricted(data: Dataset, p: int, ordering=None, moments: str = "toeplitz",
                     standardize: bool = False, divisor=Divisor.FIXED) -> CvarModel:
    """Unrestricted CVAR(p) via block LDL of the inverse block Toeplitz covariance.

    ``moments="lagged"`` uses the ``n - p`` sample product moments of the stacked
    lagged vectors instead of the Toeplitz autocovariance estimate (the estimator
    the restricted fit is built on).
    """
    data = _aligned(data, ordering)
    if standardize:
        data = data.standardized()
    if p < 0:
        raise InsufficientData("order must be non-negative")
    if moments == "toeplitz":
        acs = autocovariances(data, p, divisor=divisor)
        cov = assemble_block_toeplitz(acs, p)
    elif moments == "lagged":
        S, n_eff = lagged_moments(data, p)
        cov = S / n_eff
    else:
        raise ValueError(f"unknown moments {moments!r}")
    return fit_from_covariance(cov, data.d, p, ordering=data.names)


def fit_restricted(data: Dataset, p: int, graph: UndirectedGraph, ordering=None,
                   standardize: bool = False) -> CvarModel:
    """Restricted CVAR(p): covariance selection on the lag-extended cliques, then block LDL.

    ``graph`` is over the columns of ``data`` (before ``ordering`` is applied). In
    the fitting order the identity labeling must be perfect for the graph.
    """
    if graph.d != data.d:
        raise DimensionMismatch(f"graph has {graph.d} nodes, data has {data.d} variables")
    if ordering is not None:
        idx = data.index_of(ordering)
        data = data.reorder(idx)
        graph = graph.reorder(idx)
    if standardize:
        data = data.standardized()
    ok, violations = check_rzp(graph.adjacency)
    if not ok:
        h, i, j = violations[0]
        raise NotDecomposable(
            f"adjacency has no reducible zero pattern in this ordering (nodes {h}, {i}, {j}); "
            "reorder with mcs_perfect_order or triangulate first"
        )
    jt = junction_tree(graph)
    S, n_eff = lagged_moments(data, p)
    cs = covsel_lagged_moments(S, jt, p, n_eff)
    model = fit_from_covariance(cs.Sigma_hat, data.d, p, K=cs.K_hat, ordering=data.names,
                                restriction=Restriction(graph=graph, jt=jt))
    nonedge = np.triu(~graph.adjacency, 1)
    if np.any(model.A[nonedge] != 0.0):
        raise AssertionError("restricted fit produced non-zero path coefficients at non-edges")
    return model


def to_reduced_form(model: CvarModel) -> ReducedModel:
    """``M_j = A^{-1} B_j`` and ``Sigma = A^{-1} Delta A^{-T}``."""
    Ainv = linalg.solve_triangular(model.A, np.eye(model.d), lower=False, unit_diagonal=True)
    M = tuple(Ainv @ b for b in model.B)
    Sigma = Ainv @ np.diag(model.Delta) @ Ainv.T
    return ReducedModel(M=M, Sigma=0.5 * (Sigma + Sigma.T))


def companion(model) -> np.ndarray:
    """``pd x pd`` companion matrix of ``X_t = -M_1 X_{t-1} - ... - M_p X_{t-p} + V_t``."""
    M = model.M if isinstance(model, ReducedModel) else to_reduced_form(model).M
    p = len(M)
    if p == 0:
        return np.zeros((0, 0))
    d = M[0].shape[0]
    F = np.zeros((p * d, p * d))
    F[:d] = -np.hstack(M)
    F[d:, :-d] = np.eye((p - 1) * d)
    return F


def check_stability(model) -> float:
    """Spectral radius of the companion matrix; the model is stable iff it is below 1."""
    F = companion(model)
    if F.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(F))))


def theoretical_autocovariances(model: CvarModel, max_lag: int) -> np.ndarray:
    """Stationary ``C(0..max_lag)`` implied by a stable model (``C(h) = E X_t X_{t+h}^T``)."""
    red = to_reduced_form(model)
    d, p = model.d, model.p
    if p == 0:
        out = np.zeros((max_lag + 1, d, d))
        out[0] = red.Sigma
        return out
    F = companion(red)
    Q = np.zeros((p * d, p * d))
    Q[:d, :d] = red.Sigma
    G = linalg.solve_discrete_lyapunov(F, Q)  # Cov of the stacked state
    G = 0.5 * (G + G.T)
    out = np.zeros((max(max_lag, p - 1) + 1, d, d))
    # E X_{t-i} X_{t-j}^T = C(j - i) for the stacked state blocks
    for j in range(p):
        out[j] = G[:d, j * d:(j + 1) * d].T
    for h in range(p, max_lag + 1):
        # C(h)^T = E X_{t+h} X_t^T = -sum_k M_k C(h - k)^T
        out[h] = -sum(red.M[k - 1] @ out[h - k].T for k in range(1, p + 1)).T
    return out[: max_lag + 1]


def residuals_and_loglik(model: CvarModel, data: Dataset, center: bool = True):
    """Structural residuals ``U_t = A X_t + sum_j B_j X_{t-j}`` and the Gaussian log-likelihood.

    Returns the ``(n - p) x d`` residual array and
    ``-(n-p)d/2 ln 2pi - (n-p)/2 sum ln delta_j - 1/2 sum_t sum_j U_tj^2 / delta_j``.
    """
    if data.d != model.d:
        raise DimensionMismatch(f"model has {model.d} variables, data has {data.d}")
    if set(data.names) == set(model.ordering) and data.names != model.ordering:
        data = data.reorder(model.ordering)
    X = data.values - data.values.mean(axis=0) if center else data.values
    n, p = X.shape[0], model.p
    if n <= p:
        raise InsufficientData(f"need more than {p} observations")
    U = X[p:] @ model.A.T
    for j, b in enumerate(model.B, start=1):
        U += X[p - j: n - j] @ b.T
    m = n - p
    loglik = (
        -0.5 * m * model.d * np.log(2 * np.pi)
        - 0.5 * m * np.sum(np.log(model.Delta))
        - 0.5 * np.sum(U ** 2 / model.Delta)
    )
    return U, float(loglik)


def simulate(model: CvarModel, n: int, seed: int | None = None, burn_in: int = 1000) -> Dataset:
    """Gaussian trajectory of length ``n`` started at zero, after discarding ``burn_in`` steps."""
    radius = check_stability(model)
    if not radius < 1:
        raise UnstableModel(f"spectral radius {radius:.4f} is not below 1")
    rng = np.random.default_rng(seed)
    red = to_reduced_form(model)
    d, p = model.d, model.p
    total = n + burn_in
    U = rng.standard_normal((total, d)) * np.sqrt(model.Delta)
    Ainv = linalg.solve_triangular(model.A, np.eye(d), lower=False, unit_diagonal=True)
    V = U @ Ainv.T
    X = np.zeros((total + p, d))
    negM = [-m for m in red.M]
    for t in range(total):
        x = V[t].copy()
        for k in range(p):
            x += negM[k] @ X[p + t - 1 - k]
        X[p + t] = x
    return Dataset(X[p + burn_in:], model.ordering)
