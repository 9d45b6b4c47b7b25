"""Render experiment-sweep CSVs into per-budget trend plots."""

from .errors import EmptyInput, PlotkitError, SchemaMismatch
from .render import Panel, PlotSpec, Point, build_panels, read_rows, render

__all__ = [
    "EmptyInput",
    "Panel",
    "PlotSpec",
    "PlotkitError",
    "Point",
    "SchemaMismatch",
    "build_panels",
    "read_rows",
    "render",
]
