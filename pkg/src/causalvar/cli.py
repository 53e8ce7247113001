"""Command-line front end.

Subcommands: ``graph``, ``fit``, ``order``, ``covsel`` and ``simulate``. Every
module error is reported on stderr together with the failing stage and mapped
to its own non-zero exit code.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acf import Dataset, autocovariances, conditional_covariance
from .blockmat import spd_inverse
from .covsel import covsel_lagged
from .errors import CvarError, NonNumericCell, ParseError, RaggedRows
from .graphs import (
    UndirectedGraph,
    build_undirected_graph,
    junction_tree,
    mcs_perfect_order,
    partial_correlations,
    triangulate_fill_in,
)
from .model import CvarModel, fit_restricted, fit_unrestricted, simulate
from .select import AICC_FORMS, order_selection

OUTPUT_DIR_ENV = "CAUSALVAR_OUTPUT_DIR"
IO_EXIT_CODE = 3


def load_dataset(path, delimiter=",", header=True, columns=None, standardize=False) -> Dataset:
    """Read a rectangular numeric CSV; rows are taken as time order.

    Blank lines are skipped. Without a header the columns are named ``v1..vd``.
    ``columns`` selects a subset by name or 0-based position.
    """
    rows, lines = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            rows.append([cell.strip() for cell in row])
            lines.append(lineno)
    if not rows:
        raise ParseError(f"{path} has no data")
    names = None
    if header:
        names, rows, lines = rows[0], rows[1:], lines[1:]
        if not rows:
            raise ParseError(f"{path} has a header but no data rows")
    width = len(names) if names is not None else len(rows[0])
    values = np.empty((len(rows), width))
    for k, (row, lineno) in enumerate(zip(rows, lines)):
        if len(row) != width:
            raise RaggedRows(f"expected {width} cells, found {len(row)}", line=lineno)
        for c, cell in enumerate(row):
            try:
                values[k, c] = float(cell)
            except ValueError:
                raise NonNumericCell(f"cell {c + 1} is not numeric: {cell!r}", line=lineno) from None
    data = Dataset(values, tuple(names) if names is not None else ())
    if columns:
        idx = []
        for col in columns:
            idx.append(int(col) if str(col).isdigit() and str(col) not in data.names else data.names.index(col))
        data = Dataset(data.values[:, idx], tuple(data.names[i] for i in idx))
    return data.standardized() if standardize else data


def write_matrix_csv(path, M, row_labels, col_labels):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(col_labels))
        for label, row in zip(row_labels, np.atleast_2d(M)):
            w.writerow([label] + [f"{v:.6g}" for v in row])


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    order: int = 1
    max_order: int = 9
    aicc_form: str = "full"
    restricted: bool = False
    threshold: float | None = None
    alpha: float | None = None
    edges_path: Path | None = None
    graph_lag: int | None = None
    ordering_path: Path | None = None
    mcs: bool = False
    fill_in: bool = False
    standardize: bool = False
    delimiter: str = ","
    header: bool = True
    columns: list[str] = field(default_factory=list)
    model_path: Path | None = None
    n: int = 1000
    seed: int = 0
    burn_in: int = 1000
    output_dir: Path = Path(".")


class Stage:
    """Tracks the pipeline stage so errors can name it."""

    def __init__(self):
        self.name = "setup"

    def __call__(self, name):
        self.name = name
        return self


def _graph_from_config(cfg: RunConfig, data: Dataset, stage: Stage, lag: int):
    if cfg.edges_path is not None:
        stage("read-edges")
        return UndirectedGraph.from_edge_list(Path(cfg.edges_path).read_text(), data.d, data.names), None
    if cfg.threshold is None and cfg.alpha is None:
        return None, None
    stage("partial-correlations")
    acs = autocovariances(data, max(lag, 0))
    pcorr = partial_correlations(spd_inverse(conditional_covariance(acs, lag)))
    stage("build-graph")
    if cfg.threshold is not None:
        g = build_undirected_graph(pcorr, threshold=cfg.threshold, labels=data.names)
    else:
        g = build_undirected_graph(pcorr, alpha=cfg.alpha, n=data.n, d=data.d, labels=data.names)
    return g, pcorr


def _ordering(cfg: RunConfig, data: Dataset, graph, stage: Stage):
    if cfg.ordering_path is not None:
        stage("read-ordering")
        names = [ln.strip() for ln in Path(cfg.ordering_path).read_text().splitlines() if ln.strip()]
        return data.index_of(names)
    if cfg.mcs:
        stage("mcs")
        if graph is None:
            raise CvarError("--mcs needs a graph (--edges, --threshold or --alpha)")
        return mcs_perfect_order(graph)
    return None


def _apply_fill_in(cfg, graph, stage):
    if graph is not None and cfg.fill_in:
        stage("fill-in")
        graph, _ = triangulate_fill_in(graph)
    return graph


def _run_graph(cfg: RunConfig, data: Dataset, out: Path, stage: Stage):
    lag = cfg.graph_lag if cfg.graph_lag is not None else 0
    graph, pcorr = _graph_from_config(cfg, data, stage, lag)
    if graph is None:
        raise CvarError("graph needs --threshold, --alpha or --edges")
    stage("write")
    if pcorr is not None:
        write_matrix_csv(out / "pcorr.csv", pcorr, data.names, data.names)
    (out / "edges.txt").write_text(graph.to_edge_list())
    (out / "graph.json").write_text(graph.to_json())
    added = []
    if cfg.fill_in:
        stage("fill-in")
        graph, added = triangulate_fill_in(graph)
    stage("mcs")
    order = mcs_perfect_order(graph)
    stage("junction-tree")
    jt = junction_tree(graph, order)
    stage("write")
    (out / "ordering.txt").write_text("".join(f"{data.names[i]}\n" for i in order))
    doc = {"labels": list(data.names), "ordering": order, "fill_in": [list(e) for e in added], **jt.to_dict()}
    (out / "jt.json").write_text(json.dumps(doc, indent=2))


def _write_model(model: CvarModel, out: Path):
    (out / "model.json").write_text(model.to_json())
    names = model.ordering
    write_matrix_csv(out / "A.csv", model.A, names, names)
    for k, b in enumerate(model.B, start=1):
        write_matrix_csv(out / f"B{k}.csv", b, names, [f"{n}_-{k}" for n in names])
    write_matrix_csv(out / "Delta.csv", model.Delta[:, None], names, ["delta"])


def _run_fit(cfg: RunConfig, data: Dataset, out: Path, stage: Stage):
    lag = cfg.graph_lag if cfg.graph_lag is not None else (1 if cfg.restricted else 0)
    graph, _ = _graph_from_config(cfg, data, stage, lag)
    graph = _apply_fill_in(cfg, graph, stage)
    ordering = _ordering(cfg, data, graph, stage)
    stage("fit")
    if cfg.restricted:
        if graph is None:
            raise CvarError("--restricted needs a graph (--edges, --threshold or --alpha)")
        model = fit_restricted(data, cfg.order, graph, ordering=ordering)
    else:
        model = fit_unrestricted(data, cfg.order, ordering=ordering)
    stage("write")
    _write_model(model, out)


def _run_order(cfg: RunConfig, data: Dataset, out: Path, stage: Stage):
    lag = cfg.graph_lag if cfg.graph_lag is not None else (1 if cfg.restricted else 0)
    graph, _ = _graph_from_config(cfg, data, stage, lag)
    graph = _apply_fill_in(cfg, graph, stage)
    ordering = _ordering(cfg, data, graph, stage)
    if cfg.restricted and graph is None:
        raise CvarError("--restricted needs a graph (--edges, --threshold or --alpha)")
    stage("order-selection")
    table = order_selection(data, cfg.max_order, graph=graph if cfg.restricted else None, ordering=ordering,
                            aicc_form=cfg.aicc_form)
    stage("write")
    (out / "criteria.csv").write_text(table.to_csv())
    (out / "criteria.json").write_text(table.to_json())


def _run_covsel(cfg: RunConfig, data: Dataset, out: Path, stage: Stage):
    lag = cfg.graph_lag if cfg.graph_lag is not None else 1
    graph, _ = _graph_from_config(cfg, data, stage, lag)
    if graph is None:
        raise CvarError("covsel needs a graph (--edges, --threshold or --alpha)")
    graph = _apply_fill_in(cfg, graph, stage)
    ordering = _ordering(cfg, data, graph, stage)
    if ordering is not None:
        data, graph = data.reorder(ordering), graph.reorder(ordering)
    stage("junction-tree")
    jt = junction_tree(graph)
    stage("covsel")
    res = covsel_lagged(data, jt, cfg.order)
    stage("write")
    labels = [f"{n}_-{k}" if k else n for k in range(cfg.order + 1) for n in data.names]
    write_matrix_csv(out / "Khat.csv", res.K_hat, labels, labels)
    doc = {"labels": labels, "p": cfg.order, "K_hat": res.K_hat.tolist(), "junction_tree": jt.to_dict()}
    (out / "covsel.json").write_text(json.dumps(doc, indent=2))


def _run_simulate(cfg: RunConfig, out: Path, stage: Stage):
    stage("read-model")
    model = CvarModel.from_json(Path(cfg.model_path).read_text())
    stage("simulate")
    data = simulate(model, cfg.n, seed=cfg.seed, burn_in=cfg.burn_in)
    stage("write")
    with open(out / "simulated.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.names)
        for row in data.values:
            w.writerow([repr(float(v)) for v in row])


def dispatch(cfg: RunConfig) -> int:
    stage = Stage()
    try:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        if cfg.command == "simulate":
            _run_simulate(cfg, out, stage)
            return 0
        stage("load")
        data = load_dataset(cfg.input_path, delimiter=cfg.delimiter, header=cfg.header,
                            columns=cfg.columns or None, standardize=cfg.standardize)
        runner = {"graph": _run_graph, "fit": _run_fit, "order": _run_order, "covsel": _run_covsel}[cfg.command]
        runner(cfg, data, out, stage)
        return 0
    except CvarError as exc:
        print(f"causalvar: {cfg.command} failed at stage {stage.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"causalvar: {cfg.command} failed at stage {stage.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return IO_EXIT_CODE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalvar", description="Causal VAR(p) models via block LDL.")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("input", type=Path, help="CSV file, one row per time point")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--no-header", dest="header", action="store_false")
        p.add_argument("--columns", default="", help="comma-separated column names or positions")
        p.add_argument("--standardize", action="store_true")

    def graph_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--threshold", type=float, help="edge iff |partial correlation| >= threshold")
        g.add_argument("--alpha", type=float, help="edge iff the partial-correlation t test rejects")
        g.add_argument("--edges", dest="edges_path", type=Path, help="edge list, one 0-based 'i j' pair per line")
        p.add_argument("--graph-lag", type=int, default=None,
                       help="partial correlations of X_t given its lag-step past (default 0 for graph and unrestricted runs, 1 otherwise)")
        p.add_argument("--fill-in", action="store_true", help="triangulate the graph before use")

    def ordering_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--ordering-file", dest="ordering_path", type=Path, help="variable names, one per line")
        g.add_argument("--mcs", action="store_true", help="order variables by maximum cardinality search")

    def out_args(p):
        p.add_argument("--output-dir", type=Path, default=Path(os.environ.get(OUTPUT_DIR_ENV, ".")))

    p = sub.add_parser("graph", help="partial correlations, graph, MCS ordering and junction tree")
    data_args(p), graph_args(p), out_args(p)

    p = sub.add_parser("fit", help="fit a CVAR(p) model")
    data_args(p), graph_args(p), ordering_args(p), out_args(p)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--restricted", action="store_true")

    p = sub.add_parser("order", help="information criteria over p = 1..max-order")
    data_args(p), graph_args(p), ordering_args(p), out_args(p)
    p.add_argument("--max-order", type=int, default=9)
    p.add_argument("--aicc-form", choices=AICC_FORMS, default="full",
                   help="'no_quadratic' drops the residual quadratic form from -2 log L")
    p.add_argument("--restricted", action="store_true")

    p = sub.add_parser("covsel", help="restricted concentration matrix of the lag-extended vector")
    data_args(p), graph_args(p), ordering_args(p), out_args(p)
    p.add_argument("--order", type=int, default=1)

    p = sub.add_parser("simulate", help="simulate a fitted model")
    p.add_argument("--model", dest="model_path", type=Path, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=1000)
    out_args(p)
    return parser


def config_from_args(args) -> RunConfig:
    ns = vars(args)
    cfg = RunConfig(command=ns["command"])
    for key in ("order", "max_order", "restricted", "threshold", "alpha", "edges_path", "graph_lag",
                "ordering_path", "mcs", "aicc_form", "fill_in", "standardize", "delimiter", "header", "model_path",
                "n", "seed", "burn_in", "output_dir"):
        if key in ns and ns[key] is not None:
            setattr(cfg, key, ns[key])
    cfg.input_path = ns.get("input")
    cfg.columns = [c for c in ns.get("columns", "").split(",") if c]
    if cfg.order < 0 or cfg.max_order < 1:
        raise SystemExit("causalvar: orders must be non-negative (max-order at least 1)")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return dispatch(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
