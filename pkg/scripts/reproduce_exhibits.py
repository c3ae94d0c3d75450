#!/usr/bin/env python3
"""Regenerate the standard exhibits into one directory tree.

Thin wrapper over `dbbo reproduce`; each exhibit lands in its own
subdirectory. At the published 100 runs per cell the two OneMax
exhibits finish in minutes, but fig3/fig4 contain two-rate cells on
LeadingOnes whose r random-walks against its clamp, so a full fig3
takes hours; pass --runs to scale the whole thing down first.

Usage: python3 scripts/reproduce_exhibits.py --out results [--runs 10]
"""

import argparse
import sys
from pathlib import Path

from dbbo.cli import FIGURES, main as dbbo_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="root output directory")
    parser.add_argument("--runs", type=int, default=None, help="override runs per cell")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    parser.add_argument("--seed", default=None, help="master seed (64-bit unsigned)")
    parser.add_argument(
        "--figures", nargs="+", default=list(FIGURES), choices=FIGURES, help="subset to run"
    )
    args = parser.parse_args()

    failures = []
    for figure in args.figures:
        out = Path(args.out) / figure
        argv = ["reproduce", figure, "--out", str(out), "--jobs", str(args.jobs)]
        if args.seed is not None:
            argv += ["--seed", args.seed]
        if args.runs is not None and figure != "table1":
            argv += ["--override", f"runs_per_cell={args.runs}"]
        print(f"== {figure} -> {out}", flush=True)
        code = dbbo_main(argv)
        if code != 0:
            failures.append((figure, code))
    for figure, code in failures:
        print(f"{figure} exited with {code}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
