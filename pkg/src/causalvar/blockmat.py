"""Symmetric-matrix helpers and the block LDL factorization with varying block sizes.

The factorization never pivots: the row order of the concentration matrix is the
causal ordering of the variables, and permuting it would change the model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, NotPositiveDefinite

SYMMETRY_RTOL = 1e-12
PD_RTOL = 1e-12


def as_symmetric(M, name="matrix") -> np.ndarray:
    """Return ``M`` as a float array after checking it is square and symmetric."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    scale = max(np.abs(M).max(), np.finfo(float).tiny)
    if np.abs(M - M.T).max() > SYMMETRY_RTOL * scale:
        raise DimensionMismatch(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


def spd_inverse(M) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky, symmetrized."""
    M = as_symmetric(M)
    try:
        factor = linalg.cho_factor(M, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix of dimension {M.shape[0]} is not positive definite") from exc
    inv = linalg.cho_solve(factor, np.eye(M.shape[0]))
    return 0.5 * (inv + inv.T)


def cvar_partition(d: int, p: int) -> tuple[int, ...]:
    """Partition ``(1, ..., 1, p*d)`` used for a CVAR(p) concentration matrix.

    For ``p == 0`` every block is a singleton.
    """
    if p == 0:
        return (1,) * d
    return (1,) * d + (p * d,)


@dataclass(frozen=True)
class BlockLdlFactors:
    """``K = L @ blockdiag(Dinv) @ L.T`` with ``L`` unit lower block triangular.

    ``Dinv`` holds one entry per block: a float for singleton blocks (the inverse
    residual variances) and a symmetric array for larger blocks.
    """

    partition: tuple[int, ...]
    L: np.ndarray
    Dinv: list = field(repr=False)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.partition)])

    def block_diagonal(self) -> np.ndarray:
        n = int(sum(self.partition))
        D = np.zeros((n, n))
        for o, s, blk in zip(self.offsets[:-1], self.partition, self.Dinv):
            D[o:o + s, o:o + s] = blk
        return D

    def reconstruct(self) -> np.ndarray:
        return self.L @ self.block_diagonal() @ self.L.T


def _check_partition(partition, n):
    partition = tuple(int(s) for s in partition)
    if not partition or any(s < 1 for s in partition):
        raise DimensionMismatch(f"invalid block partition {partition}")
    if sum(partition) != n:
        raise DimensionMismatch(f"partition {partition} sums to {sum(partition)}, matrix has dimension {n}")
    return partition


def block_ldl(K, partition, trailing=None, verify_trailing=False) -> BlockLdlFactors:
    """Block LDL decomposition of a symmetric positive definite ``K``.

    Singleton columns follow the scalar recursion

        dinv_j = k_jj - sum_h l_jh dinv_h l_jh
        l_ij   = (k_ij - sum_h l_ih dinv_h l_jh) / dinv_j

    applied row-wise below the diagonal (for rows inside a larger block this is the
    vector-valued version of the same formula). Larger blocks use the Schur
    complement as their diagonal block.

    Parameters
    ----------
    K : array_like
        Symmetric positive definite matrix.
    partition : sequence of int
        Block sizes, summing to ``K.shape[0]``.
    trailing : array_like, optional
        Known value of the last diagonal block of ``D``. When given it is recorded
        as is instead of being computed (for a CVAR concentration matrix it is the
        inverse of the lagged covariance block).
    verify_trailing : bool
        Also compute the trailing block and check it agrees with ``trailing``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot (or the minimum eigenvalue of a pivot block) is not above
        ``1e-12 * max(diag(K))``.
    """
    K = as_symmetric(K, "K")
    n = K.shape[0]
    partition = _check_partition(partition, n)
    tol = PD_RTOL * max(float(np.max(np.diag(K))), 0.0)

    L = np.eye(n)
    D = np.zeros((n, n))
    blocks = []
    offset = 0
    for b, s in enumerate(partition):
        o, e = offset, offset + s
        last = b == len(partition) - 1
        Lj = L[o:e, :o]
        Dprev = D[:o, :o]
        if last and trailing is not None:
            Dj = np.array(trailing, dtype=float).reshape(s, s)
            if verify_trailing:
                computed = K[o:e, o:e] - Lj @ Dprev @ Lj.T
                if not np.allclose(computed, Dj, rtol=1e-8, atol=1e-8 * np.abs(Dj).max()):
                    raise AssertionError("supplied trailing block disagrees with the computed one")
        else:
            Dj = K[o:e, o:e] - Lj @ Dprev @ Lj.T
        Dj = 0.5 * (Dj + Dj.T)

        if s == 1:
            dj = float(Dj[0, 0])
            if not dj > tol:
                raise NotPositiveDefinite(
                    f"pivot {o} is {dj:.3e}; the covariance estimate is rank deficient or the order is too large"
                )
            D[o, o] = dj
            blocks.append(dj)
            if e < n:
                w = Dprev @ L[o, :o]
                L[e:, o] = (K[e:, o] - L[e:, :o] @ w) / dj
        else:
            if not np.linalg.eigvalsh(Dj)[0] > tol:
                raise NotPositiveDefinite(f"diagonal block at offset {o} (size {s}) is not positive definite")
            D[o:e, o:e] = Dj
            blocks.append(Dj)
            if e < n:
                R = K[e:, o:e] - L[e:, :o] @ Dprev @ Lj.T
                L[e:, o:e] = linalg.solve(Dj, R.T, assume_a="pos").T
        offset = e
    return BlockLdlFactors(partition=partition, L=L, Dinv=blocks)
