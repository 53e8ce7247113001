"""Convert the UCI Istanbul stock exchange file to the layout the tests expect.

The UCI download (``data_akbilgic.xlsx``, or a CSV export of it) has a
two-row header and the columns

    date, ISE (TL based), ISE (USD based), SP, DAX, FTSE, NIKKEI, BOVESPA, EU, EM

Columns are mapped by position, since the header text differs between copies
of the file. The output keeps every data row and writes the eight series in
the causal ordering NIK, EU, ISE, EM, BVSP, DAX, FTSE, SP.

    python3 scripts/prepare_istanbul.py data_akbilgic.xlsx -o data/istanbul.csv

Reading ``.xlsx`` needs pandas and openpyxl (``pip install -e .[data]``);
CSV input needs only the standard library.
"""
import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

RAW_COLUMNS = ("date", "ISE_TL", "ISE_USD", "SP", "DAX", "FTSE", "NIKKEI", "BOVESPA", "EU", "EM")
OUTPUT = (("NIK", "NIKKEI"), ("EU", "EU"), ("ISE", None), ("EM", "EM"),
          ("BVSP", "BOVESPA"), ("DAX", "DAX"), ("FTSE", "FTSE"), ("SP", "SP"))


@dataclass
class PrepareConfig:
    source: Path
    output: Path = Path("data/istanbul.csv")
    ise: str = "usd"  # which ISE series to keep: "usd" or "tl"


def _read_rows(path: Path) -> list[list[str]]:
    if path.suffix.lower() in (".xlsx", ".xls"):
        import pandas as pd  # optional, only for spreadsheets

        frame = pd.read_excel(path, header=None, dtype=str)
        return frame.fillna("").values.tolist()
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh)]


def _is_number(cell) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def data_rows(rows) -> list[dict[str, float]]:
    """Keep rows whose nine series cells are numeric; header rows drop out."""
    out = []
    for row in rows:
        if len(row) < len(RAW_COLUMNS):
            continue
        cells = row[:len(RAW_COLUMNS)]
        if not all(_is_number(c) for c in cells[1:]):
            continue
        out.append({k: float(v) for k, v in zip(RAW_COLUMNS[1:], cells[1:])})
    return out


def prepare(cfg: PrepareConfig) -> int:
    records = data_rows(_read_rows(cfg.source))
    if not records:
        raise SystemExit(f"no numeric rows found in {cfg.source}")
    ise = {"usd": "ISE_USD", "tl": "ISE_TL"}[cfg.ise]
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([name for name, _ in OUTPUT])
        for rec in records:
            w.writerow([repr(rec[src or ise]) for _, src in OUTPUT])
    return len(records)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=Path)
    ap.add_argument("-o", "--output", type=Path, default=PrepareConfig.output)
    ap.add_argument("--ise", choices=("usd", "tl"), default="usd")
    args = ap.parse_args(argv)
    n = prepare(PrepareConfig(args.source, args.output, args.ise))
    print(f"wrote {n} rows to {args.output}")


if __name__ == "__main__":
    main()
