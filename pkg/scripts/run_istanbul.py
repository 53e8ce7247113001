"""Replication report on the Istanbul returns.

Fits the graph, junction tree, VAR(1) coefficients and order-selection tables
and prints each next to the reference values with the largest deviation.

    python3 scripts/run_istanbul.py data/istanbul.csv --output-dir runs/istanbul
"""
import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from causalvar.acf import autocovariances, conditional_covariance
from causalvar.blockmat import spd_inverse
from causalvar.cli import load_dataset, write_matrix_csv
from causalvar.errors import CvarError
from causalvar.graphs import build_undirected_graph, junction_tree, partial_correlations
from causalvar.model import fit_restricted, fit_unrestricted
from causalvar.select import CRITERIA, order_selection

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
import istanbul_reference as ref  # noqa: E402


@dataclass
class ReplicationConfig:
    data_path: Path
    output_dir: Path | None = None
    threshold: float = 0.04
    max_order: int = 9
    aicc_form: str = "no_quadratic"


def _show(title, got, expected):
    print(f"\n{title}: max abs deviation {np.abs(got - expected).max():.4f}")
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(got)


def run(cfg: ReplicationConfig) -> dict:
    data = load_dataset(cfg.data_path).reorder(list(ref.NAMES))
    print(f"{data.n} observations, variables {', '.join(data.names)}")
    acs = autocovariances(data, 1)
    report = {"n": data.n}

    R0 = partial_correlations(spd_inverse(acs[0]))
    _show("partial correlations from C^-1(0)", R0, ref.PCORR_C0)
    g0 = build_undirected_graph(R0, threshold=cfg.threshold, labels=data.names)
    report["non_edges_c0"] = sorted([i, j] for i in range(8) for j in range(i + 1, 8) if not g0.adjacency[i, j])
    print("non-edges:", report["non_edges_c0"])

    R1 = partial_correlations(spd_inverse(conditional_covariance(acs, 1)))
    g1 = build_undirected_graph(R1, threshold=cfg.threshold, labels=data.names)
    try:
        jt = junction_tree(g1)
        report["cliques"] = [[data.names[i] for i in c] for c in jt.cliques]
        report["separators"] = [[data.names[i] for i in s] for s in jt.separators]
        print("\njunction tree cliques:", report["cliques"])
        print("separators:", report["separators"][1:])
    except CvarError as exc:
        print(f"\nrestricted structure is not usable: {type(exc).__name__}: {exc}")
        g1 = None

    un = fit_unrestricted(data, 1)
    _show("unrestricted A", un.A, ref.A_UNRESTRICTED_P1)
    _show("unrestricted B1", un.B[0], ref.B_UNRESTRICTED_P1)
    tables = {"unrestricted": order_selection(data, cfg.max_order, aicc_form=cfg.aicc_form)}
    expected = {"unrestricted": ref.CRITERIA_UNRESTRICTED, "restricted": ref.CRITERIA_RESTRICTED}
    if g1 is not None:
        rs = fit_restricted(data, 1, g1)
        _show("restricted A", rs.A, ref.A_RESTRICTED_P1)
        _show("restricted B1", rs.B[0], ref.B_RESTRICTED_P1)
        tables["restricted"] = order_selection(data, cfg.max_order, graph=g1, aicc_form=cfg.aicc_form)

    for kind, table in tables.items():
        got = np.column_stack([table.column(c) for c in CRITERIA])
        print(f"\n{kind} order selection (max abs deviation {np.nanmax(np.abs(got - expected[kind][:len(got)])):.3f})")
        print(table.to_csv(), end="")
        print("argmin:", table.best)
        report[f"best_{kind}"] = table.best

    if cfg.output_dir is not None:
        out = cfg.output_dir
        out.mkdir(parents=True, exist_ok=True)
        write_matrix_csv(out / "pcorr_c0.csv", R0, data.names, data.names)
        write_matrix_csv(out / "A_unrestricted.csv", un.A, data.names, data.names)
        for kind, table in tables.items():
            (out / f"criteria_{kind}.csv").write_text(table.to_csv())
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data_path", type=Path, nargs="?", default=Path("data/istanbul.csv"))
    ap.add_argument("--output-dir", type=Path)
    ap.add_argument("--threshold", type=float, default=0.04)
    ap.add_argument("--max-order", type=int, default=9)
    ap.add_argument("--aicc-form", default="no_quadratic")
    args = ap.parse_args(argv)
    run(ReplicationConfig(args.data_path, args.output_dir, args.threshold, args.max_order, args.aicc_form))


if __name__ == "__main__":
    main()
