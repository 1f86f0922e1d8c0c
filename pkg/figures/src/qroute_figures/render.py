"""Figure rendering from aggregated simulation tables.

Three figure kinds:
  line_ci  - metric vs a sweep variable, one line per series value,
             shaded mean +/- ci_half band where the CI is present
  pmf_bar  - path-length distribution, grouped bars per policy
  violin   - per-serving-order fidelity distributions rebuilt from the
             stored quantiles, with mean markers

Rendering is read-only over its inputs. Output names are derived from
the spec fields only, so reruns produce the same files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import TableError, read_table, select_rows

KINDS = ("line_ci", "pmf_bar", "violin")

AGG_REQUIRED = ["policy", "metric", "value", "ci_half"]
PMF_REQUIRED = ["policy", "path_len", "probability"]
ORDER_REQUIRED = ["policy", "theta", "count", "mean",
                  "q05", "q25", "q50", "q75", "q95"]

# violin outline half-widths at the stored quantile levels
VIOLIN_LEVELS = ["q05", "q25", "q50", "q75", "q95"]
VIOLIN_WIDTHS = [0.08, 0.42, 0.5, 0.42, 0.08]


class RenderError(ValueError):
    """Bad figure spec, missing columns, or an empty selection."""


@dataclass
class FigureSpec:
    """One figure: what to draw, from which table, into which files."""

    kind: str
    csv: str
    out: str
    metric: str | None = None
    x: str = "xi"
    series: str = "policy"
    select: dict = field(default_factory=dict)
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(
                f"kind must be one of {KINDS}, got {self.kind!r}"
            )
        if self.kind == "line_ci" and not self.metric:
            raise RenderError("line_ci requires a metric")


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def output_stem(spec: FigureSpec) -> str:
    """Deterministic file stem from the spec fields."""
    parts = [spec.kind]
    if spec.metric:
        parts.append(spec.metric)
    parts += [f"{k}-{_fmt(spec.select[k])}" for k in sorted(spec.select)]
    return "__".join(parts)


def _series_groups(rows: list[dict], series: str) -> list[tuple]:
    values = sorted({r[series] for r in rows}, key=lambda v: (v is None, v))
    return [(v, [r for r in rows if r[series] == v]) for v in values]


def _finish(fig, ax, spec: FigureSpec, default_x: str, default_y: str):
    ax.set_xlabel(spec.xlabel or default_x)
    ax.set_ylabel(spec.ylabel or default_y)
    if spec.title:
        ax.set_title(spec.title)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix in (".pdf", ".png"):
        target = out.with_suffix(suffix)
        fig.savefig(target, dpi=150, bbox_inches="tight")
        written.append(target)
    plt.close(fig)
    return written


def _render_line_ci(spec: FigureSpec, rows: list[dict]):
    rows = [r for r in rows if r["metric"] == spec.metric]
    rows = select_rows(rows, spec.select)
    if not rows:
        raise RenderError(
            f"empty selection for metric {spec.metric!r} with {spec.select}"
        )
    if any(r[spec.x] is None for r in rows):
        raise RenderError(f"sweep column {spec.x!r} is empty in the selection")
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for value, group in _series_groups(rows, spec.series):
        group = sorted(group, key=lambda r: r[spec.x])
        xs = [r[spec.x] for r in group]
        ys = [r["value"] for r in group]
        (line,) = ax.plot(xs, ys, marker="o", markersize=3.5,
                          label=_fmt(value))
        if any(r["ci_half"] is not None for r in group):
            lo = [r["value"] - (r["ci_half"] or 0.0) for r in group]
            hi = [r["value"] + (r["ci_half"] or 0.0) for r in group]
            ax.fill_between(xs, lo, hi, color=line.get_color(), alpha=0.2,
                            linewidth=0)
    ax.legend(title=spec.series, fontsize=8)
    return _finish(fig, ax, spec, spec.x, spec.metric)


def _render_pmf_bar(spec: FigureSpec, rows: list[dict]):
    rows = select_rows(rows, spec.select)
    if not rows:
        raise RenderError(f"empty selection with {spec.select}")
    groups = _series_groups(rows, spec.series)
    lengths = sorted({r["path_len"] for r in rows})
    index = {length: i for i, length in enumerate(lengths)}
    width = 0.8 / len(groups)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for offset, (value, group) in enumerate(groups):
        xs = [index[r["path_len"]] + (offset - (len(groups) - 1) / 2) * width
              for r in group]
        ax.bar(xs, [r["probability"] for r in group], width=width,
               label=_fmt(value))
    ax.set_xticks(range(len(lengths)), [str(v) for v in lengths])
    ax.legend(title=spec.series, fontsize=8)
    return _finish(fig, ax, spec, "path length (nodes)", "probability")


def _quantile_outline(row: dict, center: float, width: float):
    ys = [row[level] for level in VIOLIN_LEVELS]
    halves = [w * width for w in VIOLIN_WIDTHS]
    left = [(center - h, y) for h, y in zip(halves, ys)]
    right = [(center + h, y) for h, y in zip(reversed(halves), reversed(ys))]
    return left + right


def _render_violin(spec: FigureSpec, rows: list[dict]):
    rows = select_rows(rows, spec.select)
    if not rows:
        raise RenderError(f"empty selection with {spec.select}")
    groups = _series_groups(rows, spec.series)
    thetas = sorted({r["theta"] for r in rows})
    slot = {theta: i for i, theta in enumerate(thetas)}
    width = 0.8 / len(groups)
    fig, ax = plt.subplots(figsize=(5.6, 3.4))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for offset, (value, group) in enumerate(groups):
        color = colors[offset % len(colors)]
        label = _fmt(value)
        for row in sorted(group, key=lambda r: r["theta"]):
            center = slot[row["theta"]] + (
                offset - (len(groups) - 1) / 2) * width
            outline = _quantile_outline(row, center, width / 2)
            ax.fill(*zip(*outline), color=color, alpha=0.45,
                    label=label)
            label = None  # legend entry once per series
            ax.plot([center], [row["mean"]], marker="o", markersize=3,
                    color=color)
    ax.set_xticks(range(len(thetas)), [str(v) for v in thetas])
    ax.legend(title=spec.series, fontsize=8)
    return _finish(fig, ax, spec, "serving order", "fidelity")


def render(spec: FigureSpec) -> list[Path]:
    """Render one spec; returns the written files (PDF then PNG)."""
    required = {"line_ci": AGG_REQUIRED, "pmf_bar": PMF_REQUIRED,
                "violin": ORDER_REQUIRED}[spec.kind]
    try:
        rows = read_table(spec.csv, required)
    except TableError as exc:
        raise RenderError(str(exc)) from exc
    if not rows:
        raise RenderError(f"{spec.csv}: no data rows")
    handler = {"line_ci": _render_line_ci, "pmf_bar": _render_pmf_bar,
               "violin": _render_violin}[spec.kind]
    try:
        return handler(spec, rows)
    except TableError as exc:
        raise RenderError(str(exc)) from exc
