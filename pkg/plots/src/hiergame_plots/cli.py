"""Command line front end: render figure images from experiment CSVs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvio import PRESETS, CsvFormatError
from .render import FigureJob, StyleOptions, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figure images from hiergame experiment CSVs.",
    )
    parser.add_argument("preset", choices=PRESETS + ("all",))
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding <preset>.csv files")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for the rendered images")
    parser.add_argument("--format", default="png", choices=("png", "pdf", "svg"))
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--dot-size", type=float, default=5.0)
    parser.add_argument("--palette", default="tab10")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    style = StyleOptions(dot_size=args.dot_size, palette=args.palette, dpi=args.dpi)
    names = PRESETS if args.preset == "all" else (args.preset,)
    status = 0
    for name in names:
        job = FigureJob(
            preset=name,
            csv_path=Path(args.in_dir) / f"{name}.csv",
            out_path=Path(args.out_dir) / f"{name}.{args.format}",
            style=style,
        )
        try:
            path = render(job)
        except (CsvFormatError, OSError) as exc:
            sys.stderr.write(f"error: {exc}\n")
            status = 2
            continue
        sys.stderr.write(f"wrote {path}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
