"""Figures from probe-metrics CSV tables: the (LQU, AvSk) plane and the
variance-vs-gap plane with family boundary overlays."""

from .io import BoundaryTable, MissingColumn, ParseError, ScatterTable, read_boundary, read_scatter
from .render import FIGURES, PlotSpec, discover_boundaries, render

__version__ = "0.1.0"
