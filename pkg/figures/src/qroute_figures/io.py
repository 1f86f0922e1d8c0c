"""CSV ingestion for the aggregated simulator outputs.

The three input schemas share the grid-point key columns:
policy, topology, xi, a, beta, lambda, n_sd. Empty cells mean "not
applicable" and parse to None; everything else is parsed as a number
when possible and kept as a string otherwise.
"""

from __future__ import annotations

import csv

GRID_KEYS = ["topology", "xi", "a", "beta", "lambda", "n_sd"]
KEY_COLUMNS = ["policy"] + GRID_KEYS

STRING_COLUMNS = {"policy", "topology", "metric"}
INT_COLUMNS = {"n_sd", "path_len", "theta", "count"}


class TableError(ValueError):
    """Unreadable or schema-violating input table."""


def _parse_cell(column: str, text: str):
    if text == "":
        return None
    if column in STRING_COLUMNS:
        return text
    if column in INT_COLUMNS:
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path, required: list[str]) -> list[dict]:
    """Read a CSV into typed row dicts, checking required columns."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise TableError(f"{path}: missing columns {missing}")
            return [
                {k: _parse_cell(k, v) for k, v in row.items()}
                for row in reader
            ]
    except OSError as exc:
        raise TableError(f"{path}: {exc}") from exc


def select_rows(rows: list[dict], select: dict) -> list[dict]:
    """Rows matching every key of ``select`` exactly (None matches empty)."""
    unknown = [k for k in select if rows and k not in rows[0]]
    if unknown:
        raise TableError(f"unknown selection columns {unknown}")
    return [r for r in rows if all(r[k] == v for k, v in select.items())]


def distinct(rows: list[dict], keys: list[str]) -> list[tuple]:
    """Sorted unique value combinations of ``keys`` (None sorts last)."""
    combos = {tuple(r[k] for k in keys) for r in rows}
    return sorted(combos, key=lambda c: tuple((v is None, v) for v in c))
