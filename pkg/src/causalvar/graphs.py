"""Undirected and directed graphs over the contemporaneous variables.

Graphs are stored as boolean adjacency matrices. Node indices are 0-based; an
ordering (labeling) is a list of node indices where position ``k`` holds the node
receiving label ``k + 1``. Under the topological convention a directed edge
``j -> i`` always has ``i < j``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import stats

from .blockmat import as_symmetric
from .errors import DegenerateInput, DimensionMismatch, NotPerfectOrdering, NotPositiveDefinite, NotTriangulated


def _labels(labels, d):
    labels = tuple(labels) if labels else tuple(f"v{i + 1}" for i in range(d))
    if len(labels) != d:
        raise DimensionMismatch(f"{len(labels)} labels for {d} nodes")
    return labels


@dataclass(frozen=True)
class UndirectedGraph:
    adjacency: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got shape {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise DimensionMismatch("undirected adjacency must be symmetric")
        np.fill_diagonal(adj, False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "labels", _labels(self.labels, adj.shape[0]))

    @property
    def d(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_edges(cls, d, edges, labels=()) -> "UndirectedGraph":
        adj = np.zeros((d, d), dtype=bool)
        for i, j in edges:
            adj[i, j] = adj[j, i] = True
        return cls(adj, labels)

    @classmethod
    def complete(cls, d, labels=()) -> "UndirectedGraph":
        return cls(~np.eye(d, dtype=bool), labels)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def neighbors(self, v) -> set[int]:
        return set(np.flatnonzero(self.adjacency[v]).tolist())

    def is_complete(self, nodes) -> bool:
        nodes = list(nodes)
        sub = self.adjacency[np.ix_(nodes, nodes)]
        return bool(np.all(sub | np.eye(len(nodes), dtype=bool)))

    def reorder(self, ordering) -> "UndirectedGraph":
        """Relabel so that position ``k`` of the result is node ``ordering[k]``."""
        idx = list(ordering)
        return UndirectedGraph(self.adjacency[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx))

    def components(self) -> list[list[int]]:
        seen, comps = set(), []
        for s in range(self.d):
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v) - seen:
                    seen.add(w)
                    stack.append(w)
            comps.append(sorted(comp))
        return comps

    def to_edge_list(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in self.edges())

    @classmethod
    def from_edge_list(cls, text, d, labels=()) -> "UndirectedGraph":
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                i, j = line.split()
                edges.append((int(i), int(j)))
        return cls.from_edges(d, edges, labels)

    def to_json(self) -> str:
        return json.dumps({"labels": list(self.labels), "adjacency": self.adjacency.astype(int).tolist()})

    @classmethod
    def from_json(cls, text) -> "UndirectedGraph":
        doc = json.loads(text)
        return cls(np.array(doc["adjacency"], dtype=bool), tuple(doc["labels"]))


@dataclass(frozen=True)
class Dag:
    """DAG in topological order: ``adjacency[i, j]`` (i < j) means the edge j -> i."""

    adjacency: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got shape {adj.shape}")
        if np.any(np.tril(adj)):
            raise DimensionMismatch("DAG adjacency must be strictly upper triangular")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "labels", _labels(self.labels, adj.shape[0]))

    @property
    def d(self) -> int:
        return self.adjacency.shape[0]

    def parents(self, i) -> list[int]:
        return np.flatnonzero(self.adjacency[i]).tolist()

    def skeleton(self) -> UndirectedGraph:
        return UndirectedGraph(self.adjacency | self.adjacency.T, self.labels)


@dataclass(frozen=True)
class JunctionTree:
    """Perfect sequence of cliques with separators, residuals and parent cliques.

    ``separators[0]`` and ``parents[0]`` belong to the first clique and are
    empty / ``None``.
    """

    cliques: list[tuple[int, ...]]
    separators: list[tuple[int, ...]]
    residuals: list[tuple[int, ...]]
    parents: list[int | None]
    d: int = 0

    def max_clique_size(self) -> int:
        return max(len(c) for c in self.cliques)

    def covered_pairs(self) -> np.ndarray:
        """Boolean matrix of pairs lying inside some clique (the graph's edges plus diagonal)."""
        cov = np.eye(self.d, dtype=bool)
        for c in self.cliques:
            cov[np.ix_(c, c)] = True
        return cov

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "cliques": [list(c) for c in self.cliques],
            "separators": [list(s) for s in self.separators],
            "residuals": [list(r) for r in self.residuals],
            "parents": list(self.parents),
        }

    @classmethod
    def from_dict(cls, doc) -> "JunctionTree":
        return cls(
            cliques=[tuple(c) for c in doc["cliques"]],
            separators=[tuple(s) for s in doc["separators"]],
            residuals=[tuple(r) for r in doc["residuals"]],
            parents=list(doc["parents"]),
            d=int(doc["d"]),
        )


@dataclass(frozen=True)
class TestResult:
    statistic: float
    dof: int
    p_value: float
    reject: bool
    alpha: float = field(default=0.05, repr=False)

    __test__ = False  # keep pytest from collecting this class


def partial_correlations(K) -> np.ndarray:
    """Partial correlations ``-k_ij / sqrt(k_ii k_jj)`` from a concentration matrix."""
    K = as_symmetric(K, "concentration matrix")
    diag = np.diag(K)
    if np.any(diag <= 0):
        raise NotPositiveDefinite("concentration matrix has a non-positive diagonal entry")
    scale = np.sqrt(diag)
    R = -K / np.outer(scale, scale)
    np.fill_diagonal(R, 1.0)
    return np.clip(R, -1.0, 1.0)


def pcorr_t_test(r: float, n: int, d: int, alpha: float = 0.05) -> TestResult:
    """Two-sided t test of a zero partial correlation with ``n - d`` degrees of freedom."""
    if not abs(r) < 1:
        raise DegenerateInput(f"|r| must be below 1, got {r}")
    if n <= d:
        raise DegenerateInput(f"need n > d, got n={n}, d={d}")
    dof = n - d
    t = np.sqrt(dof) * r / np.sqrt(1.0 - r * r)
    p = float(2.0 * stats.t.sf(abs(t), dof))
    return TestResult(statistic=float(t), dof=dof, p_value=min(p, 1.0), reject=p < alpha, alpha=alpha)


def build_undirected_graph(pcorr, threshold=None, n=None, d=None, alpha=None, labels=()) -> UndirectedGraph:
    """Connect i and j when ``|r_ij| >= threshold``, or when the t test rejects at ``alpha``.

    Exactly one of ``threshold`` and ``alpha`` must be given; the test rule also needs
    the sample size ``n`` (``d`` defaults to the matrix dimension).
    """
    R = as_symmetric(pcorr, "partial correlation matrix")
    m = R.shape[0]
    if (threshold is None) == (alpha is None):
        raise DegenerateInput("give exactly one of threshold and alpha")
    if threshold is not None:
        adj = np.abs(R) >= threshold
    else:
        if n is None:
            raise DegenerateInput("the test rule needs the sample size n")
        d = m if d is None else d
        adj = np.zeros((m, m), dtype=bool)
        for i, j in combinations(range(m), 2):
            r = float(np.clip(R[i, j], -1 + 1e-15, 1 - 1e-15))
            adj[i, j] = adj[j, i] = pcorr_t_test(r, n, d, alpha).reject
    np.fill_diagonal(adj, False)
    return UndirectedGraph(adj, labels)


def mcs_order(g: UndirectedGraph, start=None) -> list[int]:
    """Maximum cardinality search without the perfectness check.

    Labels are handed out from d down to 1. The first node gets label d (default:
    the last node); each next label goes to the unlabeled node with the most labeled
    neighbors, ties broken by smallest index.
    """
    d = g.d
    if d == 0:
        return []
    start = d - 1 if start is None else int(start)
    weight = np.zeros(d, dtype=int)
    labeled = np.zeros(d, dtype=bool)
    reverse = []
    v = start
    for _ in range(d):
        labeled[v] = True
        reverse.append(v)
        weight[g.adjacency[v]] += 1
        cand = np.flatnonzero(~labeled)
        if cand.size == 0:
            break
        v = int(cand[np.argmax(weight[cand])])  # argmax returns the first, i.e. smallest index
    return reverse[::-1]


def perfectness_violation(g: UndirectedGraph, order):
    """First ``(node, (a, b))`` where later-labeled neighbors of ``node`` miss edge a~b, else None."""
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        later = sorted((w for w in g.neighbors(v) if pos[w] > pos[v]), key=pos.get)
        for a, b in combinations(later, 2):
            if not g.adjacency[a, b]:
                return v, (a, b)
    return None


def mcs_perfect_order(g: UndirectedGraph, start=None) -> list[int]:
    """MCS ordering, verified to be perfect.

    Raises
    ------
    NotTriangulated
        With the violating node and the missing edge, if the graph is not chordal.
    """
    if len(g.components()) > 1:
        warnings.warn("graph is disconnected; components are labeled one after another", stacklevel=2)
    order = mcs_order(g, start)
    bad = perfectness_violation(g, order)
    if bad is not None:
        v, (a, b) = bad
        raise NotTriangulated(
            f"graph is not triangulated: neighbors {g.labels[a]} and {g.labels[b]} of {g.labels[v]} are not adjacent",
            node=v,
            missing_edge=(a, b),
        )
    return order


def junction_tree(g: UndirectedGraph, order=None) -> JunctionTree:
    """Junction tree of a chordal graph from a perfect ordering (identity if omitted).

    Each node together with its later-labeled neighbors is a complete set; the
    maximal ones are the cliques. The first clique holds the highest label.
    """
    d = g.d
    order = list(range(d)) if order is None else list(order)
    bad = perfectness_violation(g, order)
    if bad is not None:
        raise NotPerfectOrdering(f"ordering is not perfect at node {g.labels[bad[0]]}")
    pos = {v: k for k, v in enumerate(order)}
    candidates = []
    for v in reversed(order):
        candidates.append(frozenset({v} | {w for w in g.neighbors(v) if pos[w] > pos[v]}))
    maximal = []
    for c in candidates:
        if not any(c < other for other in candidates) and c not in maximal:
            maximal.append(c)
    # Sequence by maximum cardinality over cliques: next is the clique sharing the
    # most nodes with those already placed (ties keep the label order). This keeps
    # the running intersection property for any perfect ordering.
    cliques, rest = [maximal[0]], maximal[1:]
    seen = set(maximal[0])
    while rest:
        k = max(range(len(rest)), key=lambda i: (len(rest[i] & seen), -i))
        cliques.append(rest.pop(k))
        seen |= cliques[-1]

    separators, residuals, parents = [()], [tuple(sorted(cliques[0]))], [None]
    seen = set(cliques[0])
    for j in range(1, len(cliques)):
        c = cliques[j]
        sep = c & seen
        parent = next((i for i in range(j) if sep <= cliques[i]), None)
        if parent is None:
            raise NotPerfectOrdering("running intersection property fails")
        separators.append(tuple(sorted(sep)))
        residuals.append(tuple(sorted(c - sep)))
        parents.append(parent)
        seen |= c
    return JunctionTree(
        cliques=[tuple(sorted(c)) for c in cliques],
        separators=separators,
        residuals=residuals,
        parents=parents,
        d=d,
    )


def check_rzp(M, kind="symmetric") -> tuple[bool, list[tuple[int, int, int]]]:
    """Reducible zero pattern check.

    For every zero ``m_ij`` with ``i < j`` and every ``h < i``, one of ``m_hi`` and
    ``m_hj`` must be zero. Returns the verdict and all violating ``(h, i, j)``
    triples (0-based). For a DAG adjacency each triple is a sink V ``j -> h <- i``.
    Only the strictly upper triangle is read, so ``kind`` is accepted for clarity.
    """
    if kind not in ("symmetric", "upper-triangular"):
        raise ValueError(f"unknown kind {kind!r}")
    if isinstance(M, (UndirectedGraph, Dag)):
        M = M.adjacency
    nz = np.asarray(M) != 0
    d = nz.shape[0]
    violations = []
    for i, j in combinations(range(d), 2):
        if nz[i, j]:
            continue
        for h in range(i):
            if nz[h, i] and nz[h, j]:
                violations.append((h, i, j))
    return not violations, violations


def orient_dag(g: UndirectedGraph, order=None) -> Dag:
    """Direct every edge from the later to the earlier node of ``order``.

    The result is expressed in the new labeling: position k is ``order[k]``.
    """
    order = list(range(g.d)) if order is None else list(order)
    h = g.reorder(order)
    return Dag(np.triu(h.adjacency, 1), h.labels)


def moralize(dag: Dag) -> UndirectedGraph:
    """Skeleton plus an edge between every pair of parents sharing a child."""
    adj = dag.adjacency | dag.adjacency.T
    for child in range(dag.d):
        for a, b in combinations(dag.parents(child), 2):
            adj[a, b] = adj[b, a] = True
    return UndirectedGraph(adj, dag.labels)


def triangulate_fill_in(g: UndirectedGraph) -> tuple[UndirectedGraph, list[tuple[int, int]]]:
    """Chordal supergraph by the elimination game along the MCS ordering.

    Eliminating nodes from label 1 upward, the later-labeled neighbors of each node
    are made pairwise adjacent. Returns the filled graph and the added edges.
    """
    order = mcs_order(g)
    pos = {v: k for k, v in enumerate(order)}
    adj = g.adjacency.copy()
    added = []
    for v in order:
        later = [w for w in np.flatnonzero(adj[v]) if pos[w] > pos[v]]
        for a, b in combinations(sorted(later), 2):
            if not adj[a, b]:
                adj[a, b] = adj[b, a] = True
                added.append((min(a, b), max(a, b)))
    return UndirectedGraph(adj, g.labels), added
