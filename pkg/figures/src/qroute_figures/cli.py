"""Command-line figure generation.

Two modes:
  figures --spec specs.yaml          render explicit figure specs
  figures --all --in-dir D --out-dir O
                                     one figure per (kind, grid point)
                                     discovered from D's aggregated CSVs
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .io import GRID_KEYS, TableError, read_table
from .render import (
    AGG_REQUIRED,
    ORDER_REQUIRED,
    PMF_REQUIRED,
    FigureSpec,
    RenderError,
    output_stem,
    render,
)

AGG_NAME = "aggregated.csv"
PMF_NAME = "pmf.csv"
ORDER_NAME = "order_fidelity.csv"

# line_ci sweeps xi, so its grid point excludes the sweep column
LINE_KEYS = [k for k in GRID_KEYS if k != "xi"]


def load_specs(path: str) -> list[FigureSpec]:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if isinstance(doc, dict):
        doc = doc.get("figures", [doc])
    if not isinstance(doc, list) or not doc:
        raise RenderError(f"{path}: expected a list of figure specs")
    specs = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise RenderError(f"{path}: spec [{i}] must be a mapping")
        try:
            specs.append(FigureSpec(**entry))
        except TypeError as exc:
            raise RenderError(f"{path}: spec [{i}]: {exc}") from exc
    return specs


def _grid_values(rows: list[dict], keys: list[str]) -> list[dict]:
    combos = {tuple(r[k] for k in keys) for r in rows}
    ordered = sorted(
        combos, key=lambda c: tuple((v is None, v) for v in c)
    )
    return [dict(zip(keys, combo)) for combo in ordered]


def discover_specs(in_dir: str, out_dir: str) -> list[FigureSpec]:
    """One spec per (figure kind, grid point) found in the input tables."""
    in_path, out_path = Path(in_dir), Path(out_dir)
    specs: list[FigureSpec] = []

    agg = read_table(in_path / AGG_NAME, AGG_REQUIRED)
    metrics = sorted({r["metric"] for r in agg})
    for metric in metrics:
        rows = [r for r in agg if r["metric"] == metric]
        if all(r["xi"] is None for r in rows):
            continue  # nothing to sweep under the continuous scheme
        for select in _grid_values(rows, LINE_KEYS):
            spec = FigureSpec(kind="line_ci", csv=str(in_path / AGG_NAME),
                              metric=metric, select=select, out="")
            spec.out = str(out_path / output_stem(spec))
            specs.append(spec)

    pmf = read_table(in_path / PMF_NAME, PMF_REQUIRED)
    for select in _grid_values(pmf, GRID_KEYS):
        spec = FigureSpec(kind="pmf_bar", csv=str(in_path / PMF_NAME),
                          select=select, out="")
        spec.out = str(out_path / output_stem(spec))
        specs.append(spec)

    order = read_table(in_path / ORDER_NAME, ORDER_REQUIRED)
    for select in _grid_values(order, GRID_KEYS):
        spec = FigureSpec(kind="violin", csv=str(in_path / ORDER_NAME),
                          select=select, out="")
        spec.out = str(out_path / output_stem(spec))
        specs.append(spec)
    return specs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render line-CI, PMF-bar, and violin figures from "
                    "aggregated simulation CSVs",
    )
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--spec", help="YAML file with explicit figure specs")
    mode.add_argument("--all", action="store_true",
                      help="render every discoverable figure")
    parser.add_argument("--in-dir", default=".",
                        help="directory with the aggregated CSVs (--all)")
    parser.add_argument("--out-dir", default="figures_out",
                        help="output directory (--all)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            specs = load_specs(args.spec)
        else:
            specs = discover_specs(args.in_dir, args.out_dir)
        if not specs:
            raise RenderError("no figures to render")
        for spec in specs:
            for written in render(spec):
                print(f"wrote {written}")
        return 0
    except (RenderError, TableError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
