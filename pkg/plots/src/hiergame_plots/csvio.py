"""Schema-checked reading of the experiment CSV files.

Each dataset starts with a schema comment line, then a header row, then
data rows. This module refuses files whose schema string or header does
not match the preset it is asked to read, and files with no data rows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class CsvFormatError(ValueError):
    """The file is not a valid dataset for the requested preset."""


_SCHEMA_PREFIX = "# schema: "

EXPECTED_HEADERS: dict[str, tuple[str, ...]] = {
    "fig1": ("n", "x", "h"),
    "fig2": ("n", "x", "h"),
    "fig3": ("variant", "n", "tau", "fc", "cb_analytic", "cb_sim", "se"),
    "fig4": ("n", "tau", "lower", "upper_ours", "upper_mark"),
    "fig5": ("n", "tau", "lower", "upper_ours", "upper_mark"),
    "fig6": ("variant", "n", "tau", "fc", "cb_analytic", "cb_sim", "se"),
    "fig7": ("variant", "n", "tau", "fc", "cb_analytic", "cb_sim", "se"),
    "fig8": ("variant", "n", "tau", "fc", "cb_analytic", "cb_sim", "se"),
    "fig9": ("n", "tau", "lower", "upper_ours", "upper_mark"),
    "fig10": ("model", "n", "fc", "wc_or_wd_sim", "analytic_revised", "analytic_mark_original"),
    "fig11": ("model", "n", "fc", "wc_or_wd_sim", "analytic_revised", "analytic_mark_original"),
}

PRESETS = tuple(EXPECTED_HEADERS)


@dataclass(frozen=True)
class Table:
    preset: str
    header: tuple
    rows: tuple

    def column(self, name: str) -> list:
        """Column values as floats, with empty cells mapped to None."""
        idx = self.header.index(name)
        out = []
        for row in self.rows:
            cell = row[idx]
            out.append(None if cell == "" else float(cell))
        return out

    def raw_column(self, name: str) -> list:
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]


def expected_schema(preset: str) -> str:
    if preset not in EXPECTED_HEADERS:
        raise CsvFormatError(f"unknown preset {preset!r}")
    return f"hiergame.{preset}/1"


def read_table(path, preset: str) -> Table:
    path = Path(path)
    if not path.exists():
        raise CsvFormatError(f"input file {path} does not exist")
    want = expected_schema(preset)
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(_SCHEMA_PREFIX):
            raise CsvFormatError(f"{path}: missing schema line")
        found = first[len(_SCHEMA_PREFIX):]
        if found != want:
            raise CsvFormatError(f"{path}: schema {found!r}, expected {want!r}")
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise CsvFormatError(f"{path}: missing header row") from None
        if header != EXPECTED_HEADERS[preset]:
            raise CsvFormatError(
                f"{path}: header {header!r} does not match preset {preset!r}"
            )
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(f"{path}: row width {len(row)} != {len(header)}")
            rows.append(tuple(row))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return Table(preset=preset, header=header, rows=tuple(rows))
