"""Command-line front end.

Subcommands:

    run        execute an experiment config, write raw/agg/summary CSVs
    aggregate  re-aggregate previously written raw CSVs
    theory     tabulate the exact expected-runtime bounds (24-cell table)
    reproduce  run the canned experiment behind one of the standard
               exhibits: fig1, fig2, fig3, fig4, or table1

Exit codes: 0 on success, 1 when any requested cell fails at runtime,
2 for malformed configs, unreadable inputs, or unknown exhibit names.
A master seed is taken from --seed, else the DBBO_SEED environment
variable, else the config file (the built-in default for reproduce).
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import stats as stats_mod
from .algorithms import parse_algorithm
from .config import ConfigError, apply_overrides, read_config
from .profiler import (
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    ProblemSet,
    read_raw_csv,
    run_experiment,
    write_experiment_outputs,
)
from .theory import tabulate_table1
from .problems import LEADINGONES, ONEMAX

__all__ = ["main"]

FIGURES = ("fig1", "fig2", "fig3", "fig4", "table1")

FIG2_DISPLAY_CAP = 60_000.0

_EXIT_OK = 0
_EXIT_RUNTIME = 1
_EXIT_USAGE = 2


def _parse_seed(text: str, source: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise ConfigError(f"{source}: seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"{source}: seed must fit in 64 bits, got {seed}")
    return seed


def _resolve_seed(args: argparse.Namespace) -> Optional[int]:
    """--seed beats DBBO_SEED; None means fall back to the config."""
    if args.seed is not None:
        return _parse_seed(args.seed, "--seed")
    env = os.environ.get("DBBO_SEED")
    if env is not None:
        return _parse_seed(env, "DBBO_SEED")
    return None


def _print_summary(results) -> None:
    rows = [
        (
            r.cell.spec.descriptor(),
            r.cell.instance.descriptor(),
            str(len(r.records)),
            "FAILED"
            if r.error is not None
            else stats_mod.format_float(stats_mod.mean_optimization_time(r.records).mean),
        )
        for r in results
    ]
    headers = ("algorithm", "instance", "runs", "mean_opt_time")
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in rows:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _execute(config: ExperimentConfig, out_dir: str, jobs: int) -> int:
    results = run_experiment(
        config, out_dir=out_dir, jobs=jobs, progress=lambda line: print(line, flush=True)
    )
    _print_summary(results)
    failures = [r.error for r in results if r.error is not None]
    for message in failures:
        print(message, file=sys.stderr)
    return _EXIT_RUNTIME if failures else _EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = read_config(args.config)
    config = apply_overrides(config, args.override)
    seed = _resolve_seed(args)
    if seed is not None:
        config = apply_overrides(config, [f"master_seed={seed}"])
    return _execute(config, args.out, args.jobs)


def cmd_aggregate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for raw_path in args.raw:
        raw_path = Path(raw_path)
        n = args.dimension if args.dimension is not None else _infer_dimension(raw_path)
        records = read_raw_csv(raw_path, n)
        table = stats_mod.fixed_target_curve(records)
        stem = raw_path.name
        if stem.endswith(".raw.csv"):
            stem = stem[: -len(".raw.csv")]
        else:
            stem = raw_path.stem
        stats_mod.write_fixed_target_csv(out / f"{stem}.agg.csv", table)
        print(f"{raw_path} -> {out / (stem + '.agg.csv')} (n={n}, runs={table.runs})")
    return _EXIT_OK


def _infer_dimension(raw_path: Path) -> int:
    """Largest target in the file; exact whenever any run reached the
    optimum, a lower bound otherwise (pass --dimension to pin it)."""
    best = -1
    with open(raw_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row in reader:
            try:
                best = max(best, int(row[2]))
            except (ValueError, IndexError):
                raise ConfigError(f"{raw_path}: malformed row {row!r}") from None
    if best < 0:
        raise ConfigError(f"{raw_path}: no data rows")
    return best


def cmd_theory(args: argparse.Namespace) -> int:
    rows = tabulate_table1()
    print("lambda  n       percent_of_n2")
    for lam, n, percent in rows:
        print(f"{lam:<7d} {n:<7d} {percent:.3f}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_table1_csv(out / "table1.csv", rows)
        print(f"wrote {out / 'table1.csv'}")
    return _EXIT_OK


def _write_table1_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda", "n", "percent_of_n2"])
        for lam, n, percent in rows:
            writer.writerow([lam, n, f"{percent:.3f}"])


def _static_descriptors(lambdas: Sequence[int]) -> List[str]:
    return [f"ea_gt0,lambda={lam},p=1/n" for lam in lambdas]


_FIG_ALGORITHMS = {
    "fig1": _static_descriptors((1, 2, 5, 10, 20, 50))
    + [
        "ea_gt0,lambda=50,p=pstar",
        "two_rate,lambda=50,r0=2",
        "adaptlambda,rule=div_s,lambda0=50",
        "adaptlambda,rule=reset,lambda0=50",
        "adaptlambda,rule=halve,lambda0=50",
    ],
    "fig2": _static_descriptors((1, 2, 50))
    + [
        "adaptlambda,rule=div_s,lambda0=50",
        "adaptlambda,rule=reset,lambda0=50",
    ],
    "fig3": _static_descriptors((1, 2, 5, 10, 50))
    + [
        "adaptlambda,rule=div_s,lambda0=50",
        "adaptlambda,rule=reset,lambda0=50",
        "adaptlambda,rule=halve,lambda0=50",
        "two_rate,lambda=50,r0=2",
    ],
    "fig4": _static_descriptors((1, 50))
    + [
        "adaptlambda,rule=div_s,lambda0=50",
        "rls",
    ],
}

_FIG_PROBLEMS = {
    "fig1": ProblemSet(ONEMAX, (500, 1000, 1500, 2000, 2500, 3000)),
    "fig2": ProblemSet(ONEMAX, (3000,)),
    "fig3": ProblemSet(LEADINGONES, (500, 1000, 1500)),
    "fig4": ProblemSet(LEADINGONES, (1500,)),
}


def figure_config(figure: str, master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentConfig:
    """The canned experiment behind one of the runnable exhibits."""
    if figure not in _FIG_ALGORITHMS:
        raise ConfigError(f"no experiment config for {figure!r}")
    return ExperimentConfig(
        algorithms=tuple(parse_algorithm(d) for d in _FIG_ALGORITHMS[figure]),
        problems=(_FIG_PROBLEMS[figure],),
        runs_per_cell=100,
        master_seed=master_seed,
    )


def cmd_reproduce(args: argparse.Namespace) -> int:
    if args.figure == "table1":
        return cmd_theory(args)
    seed = _resolve_seed(args)
    config = figure_config(args.figure, master_seed=seed if seed is not None else DEFAULT_MASTER_SEED)
    config = apply_overrides(config, args.override)
    out = Path(args.out)
    results = run_experiment(
        config, out_dir=None, jobs=args.jobs, progress=lambda line: print(line, flush=True)
    )
    write_experiment_outputs(results, out)
    if args.figure in ("fig1", "fig3"):
        rows = stats_mod.normalized_summary_rows(results)
        stats_mod.write_normalized_csv(out / "normalized_means.csv", rows)
    if args.figure == "fig2":
        _write_fig2_extras(results, out)
    _print_summary(results)
    failures = [r.error for r in results if r.error is not None]
    for message in failures:
        print(message, file=sys.stderr)
    return _EXIT_RUNTIME if failures else _EXIT_OK


def _write_fig2_extras(results, out: Path) -> None:
    """Display-capped curves plus per-target gradient series."""
    for result in results:
        if result.error is not None:
            continue
        slug = result.cell.slug()
        table = stats_mod.fixed_target_curve(result.records)
        stats_mod.write_fixed_target_csv(out / f"{slug}.display.csv", table, cap=FIG2_DISPLAY_CAP)
        grads = stats_mod.gradients(table)
        with open(out / f"{slug}.gradients.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["target", "gradient"])
            for v, g in zip(table.targets, grads):
                if not math.isnan(g):
                    writer.writerow([int(v), stats_mod.format_float(float(g))])


def _add_common_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output directory for CSV files")
    parser.add_argument("--seed", default=None, help="master seed (64-bit unsigned)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="config override (runs_per_cell, master_seed, budget); repeatable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbbo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="path to a key=value config file")
    _add_common_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_agg = sub.add_parser("aggregate", help="re-aggregate raw CSV files")
    p_agg.add_argument("raw", nargs="+", help="raw CSV files to aggregate")
    p_agg.add_argument("--out", required=True, help="output directory")
    p_agg.add_argument(
        "--dimension", type=int, default=None, help="problem dimension (inferred when omitted)"
    )
    p_agg.set_defaults(func=cmd_aggregate)

    p_theory = sub.add_parser("theory", help="tabulate exact expected-runtime bounds")
    p_theory.add_argument("--out", default=None, help="directory for table1.csv (optional)")
    p_theory.set_defaults(func=cmd_theory)

    p_rep = sub.add_parser("reproduce", help="run a standard exhibit's experiment")
    p_rep.add_argument("figure", choices=FIGURES, help="which exhibit to reproduce")
    _add_common_run_flags(p_rep)
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
