"""Sample autocovariances, the block Toeplitz covariance and its Schur complement."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .blockmat import spd_inverse
from .errors import DimensionMismatch, InsufficientData, MissingLags, ZeroVariance


class Divisor(str, Enum):
    FIXED = "fixed"  # 1/n at every lag; keeps the block Toeplitz estimate PSD
    PER_LAG = "per_lag"  # 1/(n - h)


@dataclass(frozen=True)
class Dataset:
    """An ``n x d`` multivariate series, rows in time order."""

    values: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionMismatch(f"dataset values must be 2-D, got {values.ndim}-D")
        if not np.all(np.isfinite(values)):
            raise DimensionMismatch("dataset contains missing or non-finite values")
        names = tuple(self.names) if self.names else tuple(f"v{i + 1}" for i in range(values.shape[1]))
        if len(names) != values.shape[1]:
            raise DimensionMismatch(f"{len(names)} names for {values.shape[1]} columns")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def index_of(self, ordering) -> list[int]:
        """Column indices for an ordering given as names or integer positions."""
        idx = []
        for item in ordering:
            if isinstance(item, (int, np.integer)):
                idx.append(int(item))
            else:
                try:
                    idx.append(self.names.index(item))
                except ValueError:
                    raise DimensionMismatch(f"unknown variable {item!r}") from None
        if sorted(idx) != list(range(self.d)):
            raise DimensionMismatch(f"ordering {list(ordering)} is not a permutation of the {self.d} columns")
        return idx

    def reorder(self, ordering) -> "Dataset":
        idx = self.index_of(ordering)
        return Dataset(self.values[:, idx], tuple(self.names[i] for i in idx))

    def standardized(self) -> "Dataset":
        return Dataset(standardize_columns(self.values), self.names)


def standardize_columns(values) -> np.ndarray:
    """Center columns and scale them to unit sample standard deviation."""
    values = np.asarray(values, dtype=float)
    centered = values - values.mean(axis=0)
    sd = centered.std(axis=0, ddof=1)
    bad = ~(sd > 0)
    if np.any(bad):
        raise ZeroVariance(f"columns {np.flatnonzero(bad).tolist()} have zero variance")
    return centered / sd


@dataclass(frozen=True)
class AutocovSet:
    """Lag-h autocovariances ``C(h) = E X_t X_{t+h}^T`` for h = 0..p_max."""

    lags: np.ndarray = field(repr=False)  # shape (p_max + 1, d, d)
    divisor: Divisor = Divisor.FIXED
    n: int | None = None

    @property
    def d(self) -> int:
        return self.lags.shape[1]

    @property
    def p_max(self) -> int:
        return self.lags.shape[0] - 1

    def __getitem__(self, h: int) -> np.ndarray:
        if h < 0:
            return self.lags[-h].T
        return self.lags[h]


def autocovariances(data, p_max: int, standardize: bool = False, divisor=Divisor.FIXED) -> AutocovSet:
    """Sample autocovariance matrices C(0..p_max).

    ``C(h) = (1/n) sum_{t=1}^{n-h} (x_t - xbar)(x_{t+h} - xbar)^T`` with the default
    divisor; ``Divisor.PER_LAG`` uses ``1/(n - h)`` instead.
    """
    X = data.values if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    divisor = Divisor(divisor)
    if p_max < 0 or 2 * p_max >= n:
        raise InsufficientData(f"p_max={p_max} needs at least {2 * p_max + 1} observations, have {n}")
    if standardize:
        Z = standardize_columns(X)
    else:
        Z = X - X.mean(axis=0)
    lags = np.empty((p_max + 1, X.shape[1], X.shape[1]))
    for h in range(p_max + 1):
        denom = n if divisor is Divisor.FIXED else n - h
        lags[h] = Z[: n - h].T @ Z[h:] / denom
    lags[0] = 0.5 * (lags[0] + lags[0].T)
    return AutocovSet(lags=lags, divisor=divisor, n=n)


def assemble_block_toeplitz(acs: AutocovSet, p: int) -> np.ndarray:
    """Covariance of ``(X_t, X_{t-1}, ..., X_{t-p})``: block (i, j) is C(i - j).

    Blocks below the diagonal are C(i - j), those above are C(j - i)^T.
    """
    if p < 0 or p > acs.p_max:
        raise MissingLags(f"order {p} needs lags 0..{p}, only 0..{acs.p_max} available")
    d = acs.d
    out = np.empty(((p + 1) * d, (p + 1) * d))
    for i in range(p + 1):
        for j in range(p + 1):
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = acs[i - j]
    return 0.5 * (out + out.T)


def cross_block(acs: AutocovSet, p: int) -> np.ndarray:
    """The ``pd x d`` stack ``C(1, ..., p) = (C(1); ...; C(p))``."""
    if p > acs.p_max:
        raise MissingLags(f"order {p} needs lags 0..{p}, only 0..{acs.p_max} available")
    return np.vstack([acs[h] for h in range(1, p + 1)])


def conditional_covariance(acs: AutocovSet, p: int) -> np.ndarray:
    """Covariance of X_t given its p-lag past: ``C(0) - C^T(1..p) Cp^{-1} C(1..p)``."""
    if p == 0:
        return acs[0].copy()
    Cp = assemble_block_toeplitz(acs, p - 1)
    cross = cross_block(acs, p)
    out = acs[0] - cross.T @ spd_inverse(Cp) @ cross
    return 0.5 * (out + out.T)


def lagged_design(data, p: int) -> np.ndarray:
    """Rows ``(x_t, x_{t-1}, ..., x_{t-p})`` for t = p+1..n, centered at the full-sample mean."""
    X = data.values if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    n = X.shape[0]
    if p < 0 or n - p < 1:
        raise InsufficientData(f"order {p} leaves no observations out of {n}")
    Z = X - X.mean(axis=0)
    return np.hstack([Z[p - h: n - h] for h in range(p + 1)])


def lagged_moments(data, p: int) -> tuple[np.ndarray, int]:
    """Product-moment matrix of :func:`lagged_design` and its sample size ``n - p``."""
    Z = lagged_design(data, p)
    S = Z.T @ Z
    return 0.5 * (S + S.T), Z.shape[0]
