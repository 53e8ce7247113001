"""Information criteria and order selection for CVAR(p) fits."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .acf import Dataset
from .errors import CvarError, DegenerateDenominator
from .graphs import JunctionTree, UndirectedGraph
from .model import CvarModel, fit_restricted, fit_unrestricted, residuals_and_loglik

CRITERIA = ("aic", "aicc", "bic", "hq")
# "full" uses -2 log L; "no_quadratic" drops the residual quadratic form sum_t U_t' Delta^-1 U_t
# from it, leaving (n-p) d ln 2pi + (n-p) sum ln delta_j. The second form reproduces
# reference criteria tables for the Istanbul returns.
AICC_FORMS = ("full", "no_quadratic")


def n_params(d: int, p: int, jt: JunctionTree | None = None) -> int:
    """``p d^2 + C(d, 2)``, or ``p d^2 + sum C(|C_j|, 2) + sum_{j>=2} C(|S_j|, 2)`` when restricted."""
    if jt is None:
        return p * d * d + math.comb(d, 2)
    return (p * d * d + sum(math.comb(len(c), 2) for c in jt.cliques)
            + sum(math.comb(len(s), 2) for s in jt.separators[1:]))


@dataclass(frozen=True)
class CriteriaRow:
    p: int
    aic: float = math.nan
    aicc: float = math.nan
    bic: float = math.nan
    hq: float = math.nan
    n_params: int = 0
    restricted: bool = False
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def criteria_from_terms(log_det: float, loglik: float, q: int, n: int, p: int, d: int,
                        quad: float | None = None) -> CriteriaRow:
    """Evaluate the four criteria from ``sum ln delta_j``, the log-likelihood and ``q``.

    When ``quad`` (the residual quadratic form) is given it is added back to
    ``loglik`` before AICC is formed, i.e. the ``no_quadratic`` AICC form.
    """
    m = n - p
    if m * d <= q + 1:
        raise DegenerateDenominator(f"(n-p)d = {m * d} must exceed q + 1 = {q + 1}")
    if m <= math.e:
        raise DegenerateDenominator(f"n - p = {m} too small for the Hannan-Quinn penalty")
    return CriteriaRow(
        p=p,
        aic=log_det + 2 * q / m,
        aicc=-2 * (loglik if quad is None else loglik + 0.5 * quad) + 2 * q * m * d / (m * d - q - 1),
        bic=log_det + q * math.log(m) / m,
        hq=log_det + 2 * q * math.log(math.log(m)) / m,
        n_params=q,
    )


def information_criteria(model: CvarModel, data: Dataset, aicc_form: str = "full") -> CriteriaRow:
    """AIC, AICC, BIC and HQ of a model fitted on ``data``; ``n`` is the full series length."""
    if aicc_form not in AICC_FORMS:
        raise ValueError(f"aicc_form must be one of {AICC_FORMS}")
    jt = model.restriction.jt if model.restriction is not None else None
    q = n_params(model.d, model.p, jt)
    U, loglik = residuals_and_loglik(model, data)
    quad = float(np.sum(U ** 2 / model.Delta)) if aicc_form == "no_quadratic" else None
    row = criteria_from_terms(float(np.sum(np.log(model.Delta))), loglik, q, data.n, model.p, model.d, quad)
    return CriteriaRow(**{**asdict(row), "restricted": model.restricted})


@dataclass
class CriteriaTable:
    rows: list[CriteriaRow]
    best: dict[str, int | None] = field(default_factory=dict)

    def __post_init__(self):
        if not self.best:
            self.best = best_orders(self.rows)

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "AIC", "AICC", "BIC", "HQ"])
        for r in self.rows:
            if r.failed:
                w.writerow([r.p, "failed", "failed", "failed", "failed"])
            else:
                w.writerow([r.p] + [f"{getattr(r, c):.6f}" for c in CRITERIA])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [asdict(r) for r in self.rows], "best": self.best}, indent=2)


def best_orders(rows) -> dict[str, int | None]:
    """Per-criterion argmin over successful rows; ties go to the smaller order."""
    best = {}
    for c in CRITERIA:
        ok = [r for r in rows if not r.failed and np.isfinite(getattr(r, c))]
        best[c] = min(ok, key=lambda r: (getattr(r, c), r.p)).p if ok else None
    return best


def order_selection(data: Dataset, p_max: int, graph: UndirectedGraph | None = None, ordering=None,
                    p_min: int = 1, aicc_form: str = "full") -> CriteriaTable:
    """Fit orders ``p_min..p_max`` and tabulate the criteria.

    With ``graph`` the restricted model is fitted at every order. A failed fit is
    kept as a row carrying the error name and excluded from the argmin.
    """
    if ordering is not None:
        idx = data.index_of(ordering)
        data = data.reorder(idx)
        if graph is not None:
            graph = graph.reorder(idx)
    rows = []
    for p in range(p_min, p_max + 1):
        try:
            if graph is None:
                model = fit_unrestricted(data, p)
            else:
                model = fit_restricted(data, p, graph)
            rows.append(information_criteria(model, data, aicc_form))
        except CvarError as exc:
            rows.append(CriteriaRow(p=p, restricted=graph is not None, error=f"{type(exc).__name__}: {exc}"))
    return CriteriaTable(rows)
