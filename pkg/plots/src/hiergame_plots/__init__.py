"""Render figure images from hiergame experiment CSV datasets."""

from .csvio import EXPECTED_HEADERS, PRESETS, CsvFormatError, Table, read_table
from .render import FigureJob, StyleOptions, build_figure, render

__version__ = "0.1.0"

__all__ = [
    "CsvFormatError",
    "EXPECTED_HEADERS",
    "FigureJob",
    "PRESETS",
    "StyleOptions",
    "Table",
    "build_figure",
    "read_table",
    "render",
    "__version__",
]
