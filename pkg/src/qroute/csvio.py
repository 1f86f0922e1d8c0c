"""CSV emission and parsing for the raw and aggregated result tables.

Floats are written with 9 significant digits and missing numerics as
empty fields, so byte-identical output is a meaningful determinism check.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .engine import RAW_COLUMNS

FLOAT_FIELDS = {"xi", "a", "beta", "lambda", "fidelity_true", "fidelity_est",
                "value", "ci_half", "probability", "mean",
                "q05", "q25", "q50", "q75", "q95"}
INT_FIELDS = {"n_sd", "replica_topo", "replica_quality", "order_index",
              "pair_id", "path_len", "theta", "count"}


class CsvError(ValueError):
    """Input file does not match the documented table schema."""


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def write_csv(path: str | Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])


def _parse(field: str, text: str):
    if text == "":
        return None
    if field in FLOAT_FIELDS:
        return float(text)
    if field in INT_FIELDS:
        return int(text)
    return text


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            {k: _parse(k, v) for k, v in row.items()} for row in reader
        ]


def read_raw_csv(path: str | Path) -> list[dict]:
    rows = read_rows(path)
    if rows and set(rows[0]) != set(RAW_COLUMNS):
        raise CsvError(
            f"{path}: unexpected raw CSV header {sorted(rows[0])}"
        )
    return rows
