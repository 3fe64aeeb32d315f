"""Figures for committee-resilience experiment CSVs."""

from .figures import (
    FigureResult,
    FigureSpec,
    SchemaError,
    load_rows,
    plot,
    plot_box,
    plot_exp1,
    write_figure_manifest,
)

__all__ = [
    "FigureResult",
    "FigureSpec",
    "SchemaError",
    "load_rows",
    "plot",
    "plot_box",
    "plot_exp1",
    "write_figure_manifest",
]
