"""Figure generation for aggregated entanglement-routing simulation CSVs."""

from .io import TableError, read_table, select_rows
from .render import FigureSpec, RenderError, output_stem, render

__all__ = [
    "FigureSpec",
    "RenderError",
    "TableError",
    "output_stem",
    "read_table",
    "render",
    "select_rows",
]
