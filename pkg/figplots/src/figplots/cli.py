"""render_figs: draw figures from probe-metrics CSV files.

    render_figs --scatter scatter.csv --boundaries dir/ --figure fig1 --out fig1.png

Exit codes: 0 success, 2 bad input data or configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .io import MissingColumn, ParseError
from .render import FIGURES, PlotSpec, discover_boundaries, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="render_figs", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--scatter", required=True, help="scatter CSV from `probe scatter`")
    parser.add_argument("--boundaries", default=None,
                        help="directory of boundary CSVs from `probe boundary`")
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    boundary_paths = discover_boundaries(args.boundaries) if args.boundaries else ()
    spec = PlotSpec(
        scatter_path=args.scatter,
        figure=args.figure,
        output_path=args.out,
        boundary_paths=boundary_paths,
    )
    try:
        render(spec)
    except (ParseError, MissingColumn) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
