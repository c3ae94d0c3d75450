"""Command line entry point.

Grammar::

    dbbo-plot <kind> --in CSV [CSV ...] --out PATH
              [--cap N] [--window K] [--normalizer NAME] [--raster]

where ``<kind>`` is one of ``normalized_means``, ``fixed_target``,
``gradients`` or ``lo_fixed_target``.  Exit status 0 on success and 2
on any input problem (bad flags, unreadable files, schema mismatches);
no output file is written in the failure case.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .io import PlotInputError
from .render import KINDS, NORMALIZERS, PlotJob, render

_EXIT_OK = 0
_EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbbo-plot",
        description="Render figures from dbbo benchmark CSV files.",
    )
    parser.add_argument("kind", choices=KINDS, help="figure kind to render")
    parser.add_argument(
        "--in",
        dest="inputs",
        nargs="+",
        required=True,
        metavar="CSV",
        help="input CSV files, plotted in the order given",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--cap",
        type=float,
        default=None,
        help="clip displayed means at this value (fixed-target kinds)",
    )
    parser.add_argument(
        "--window",
        type=int,
        default=5,
        help="smoothing window for the gradient-gap curve (default 5)",
    )
    parser.add_argument(
        "--normalizer",
        choices=NORMALIZERS,
        default="n_ln_n",
        help="reference scaling for normalized means (default n_ln_n)",
    )
    parser.add_argument(
        "--raster",
        action="store_true",
        help="write PNG instead of the default vector SVG",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        job = PlotJob(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            cap=args.cap,
            window=args.window,
            normalizer=args.normalizer,
            raster=args.raster,
        )
        written = render(job)
    except (PlotInputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    print(f"wrote {written}")
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
