"""Run harness and fixed-target / fixed-budget data recording.

A RunRecord stores one run's complete fixed-target trace: for every
fitness value v it remembers the evaluation count at which fitness >= v
was first attained by any evaluated point. Records are written to one
raw CSV per experiment cell using improvement rows only (plateaus are
implicit), which keeps files at O(n) lines per run and reconstructs the
full trace losslessly.

`run_experiment` expands an ExperimentConfig into cells (algorithm x
family x dimension x instance), executes `runs_per_cell` independent
seeded runs per cell, and optionally writes raw, aggregated, and
summary CSVs. Seeds depend only on (master_seed, cell, run_index),
never on scheduling, so outputs are byte-identical for any job count.
"""

from __future__ import annotations

import csv
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import algorithms as alg_mod
from . import stats as stats_mod
from .algorithms import AlgorithmSpec, ENGINE_KERNEL
from .core import RngStream
from .problems import FAMILIES, ProblemInstance, generate_instance

__all__ = [
    "CellResult",
    "ConsistencyError",
    "ExperimentCell",
    "ExperimentConfig",
    "ProblemSet",
    "RunRecord",
    "cell_slug",
    "expand_cells",
    "fixed_budget_value",
    "read_raw_csv",
    "read_summary_csv",
    "record_evaluation",
    "run_experiment",
    "write_raw_csv",
    "write_summary_csv",
]

RAW_HEADER = ["run_index", "seed", "target", "evaluations"]
SUMMARY_HEADER = ["algorithm", "family", "dimension", "instance", "runs", "mean_opt_time", "success_rate"]

DEFAULT_MASTER_SEED = 881310257


class ConsistencyError(RuntimeError):
    """A recording call violated the strictly-increasing evaluation order."""


@dataclass
class RunRecord:
    """One run's fixed-target trace plus identifying metadata.

    first_hit[v] is the evaluation count at which fitness >= v was first
    attained, or -1 where v was never reached; it is monotone and
    defined contiguously on 0..final_fitness.
    """

    algorithm: str
    problem: str
    run_index: int
    seed: int
    first_hit: np.ndarray
    final_fitness: int = -1
    total_evaluations: int = 0
    success: bool = False

    @classmethod
    def fresh(cls, algorithm: str, problem: str, run_index: int, seed: int, n: int) -> "RunRecord":
        return cls(
            algorithm=algorithm,
            problem=problem,
            run_index=run_index,
            seed=seed,
            first_hit=np.full(n + 1, -1, dtype=np.int64),
        )

    @property
    def n(self) -> int:
        return self.first_hit.size - 1

    def first_hit_of(self, target: int) -> Optional[int]:
        """Evaluation count at which `target` was first reached, if ever."""
        value = int(self.first_hit[target])
        return value if value >= 0 else None


def record_evaluation(record: RunRecord, eval_count: int, fitness: int) -> RunRecord:
    """Fold one evaluation into the record's first-hit trace.

    Targets skipped by a fitness jump share the jump's evaluation count.
    Calls must use strictly increasing eval_count within a run.
    """
    if eval_count <= record.total_evaluations:
        raise ConsistencyError(
            f"evaluation counter went from {record.total_evaluations} to {eval_count}"
        )
    if not 0 <= fitness <= record.n:
        raise ValueError(f"fitness {fitness} outside [0, {record.n}]")
    record.total_evaluations = eval_count
    if fitness > record.final_fitness:
        record.first_hit[max(record.final_fitness + 1, 0) : fitness + 1] = eval_count
        record.final_fitness = fitness
    return record


def fixed_budget_value(record: RunRecord, budget: int) -> int:
    """Best fitness attained within the first `budget` evaluations."""
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    hits = record.first_hit[: record.final_fitness + 1]
    # hits is non-decreasing; rightmost target reached within the budget
    return int(np.searchsorted(hits, budget, side="right")) - 1


@dataclass(frozen=True)
class ProblemSet:
    """One family crossed with dimension and instance lists."""

    family: str
    dimensions: Tuple[int, ...]
    instance_ids: Tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.dimensions or any(n < 1 for n in self.dimensions):
            raise ValueError("dimensions must be a nonempty list of integers >= 1")
        if not self.instance_ids or any(i < 0 for i in self.instance_ids):
            raise ValueError("instance_ids must be a nonempty list of integers >= 0")


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: Tuple[AlgorithmSpec, ...]
    problems: Tuple[ProblemSet, ...]
    runs_per_cell: int = 100
    master_seed: int = DEFAULT_MASTER_SEED
    budget: Optional[int] = None

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if not self.problems:
            raise ValueError("at least one problem set is required")
        if self.runs_per_cell < 1:
            raise ValueError(f"runs_per_cell must be at least 1, got {self.runs_per_cell}")
        if self.budget is not None and self.budget < 1:
            raise ValueError(f"budget must be at least 1 evaluation, got {self.budget}")


@dataclass(frozen=True)
class ExperimentCell:
    spec: AlgorithmSpec
    instance: ProblemInstance

    def key(self) -> str:
        return f"{self.spec.descriptor()}|{self.instance.descriptor()}"

    def slug(self) -> str:
        return cell_slug(self.spec.descriptor(), self.instance.descriptor())


@dataclass
class CellResult:
    cell: ExperimentCell
    records: List[RunRecord] = field(default_factory=list)
    error: Optional[str] = None


def expand_cells(config: ExperimentConfig) -> List[ExperimentCell]:
    cells = []
    for spec in config.algorithms:
        for pset in config.problems:
            for n in pset.dimensions:
                for iid in pset.instance_ids:
                    inst = generate_instance(pset.family, n, iid, config.master_seed)
                    cells.append(ExperimentCell(spec, inst))
    return cells


def cell_slug(algorithm_descriptor: str, instance_descriptor: str) -> str:
    """Deterministic filesystem-safe name for a cell's data files."""
    text = f"{algorithm_descriptor}__{instance_descriptor}"
    text = text.replace("/", "over").replace("=", "-").replace(",", "_")
    return re.sub(r"[^A-Za-z0-9._-]", "-", text)


def run_cell(
    cell: ExperimentCell,
    runs_per_cell: int,
    master_seed: int,
    budget: Optional[int],
    engine: str = ENGINE_KERNEL,
) -> CellResult:
    """Execute one cell's independent runs; failures are captured, not raised."""
    result = CellResult(cell)
    key = cell.key()
    try:
        cell.spec.validate_for(cell.instance)
        for k in range(runs_per_cell):
            stream = RngStream.for_run(master_seed, key, k)
            record = alg_mod.run(
                cell.spec, cell.instance, budget=budget, rng=stream, run_index=k, engine=engine
            )
            result.records.append(record)
    except Exception as exc:  # noqa: BLE001 - cell isolation is the contract
        result.records = []
        result.error = f"cell {key}: {type(exc).__name__}: {exc}"
    return result


def _run_cell_task(args) -> CellResult:
    return run_cell(*args)


def run_experiment(
    config: ExperimentConfig,
    out_dir: Union[str, Path, None] = None,
    jobs: int = 1,
    engine: str = ENGINE_KERNEL,
    progress: Optional[Callable[[str], None]] = None,
) -> List[CellResult]:
    """Run every cell of the config; optionally write the CSV outputs.

    With out_dir set, each completed cell gets <slug>.raw.csv and
    <slug>.agg.csv, and a summary.csv indexes all successful cells.
    A failing cell is reported in its CellResult and skipped in the
    files; other cells still run.
    """
    cells = expand_cells(config)
    tasks = [(cell, config.runs_per_cell, config.master_seed, config.budget, engine) for cell in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_task, tasks))
    else:
        results = []
        for i, task in enumerate(tasks):
            result = _run_cell_task(task)
            results.append(result)
            if progress is not None:
                progress(_progress_line(i, len(tasks), result))
    if jobs > 1 and progress is not None:
        for i, result in enumerate(results):
            progress(_progress_line(i, len(results), result))
    if out_dir is not None:
        write_experiment_outputs(results, out_dir)
    return results


def _progress_line(index: int, total: int, result: CellResult) -> str:
    cell = result.cell
    label = f"[{index + 1}/{total}] {cell.spec.descriptor()} on {cell.instance.descriptor()}"
    if result.error is not None:
        return f"{label}: FAILED ({result.error})"
    summary = stats_mod.mean_optimization_time(result.records)
    mean = "n/a" if summary.successes == 0 else f"{summary.mean:.1f}"
    return (
        f"{label}: runs={len(result.records)} mean_opt_time={mean} "
        f"success={summary.successes}/{summary.runs}"
    )


def write_experiment_outputs(results: Sequence[CellResult], out_dir: Union[str, Path]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for result in results:
        if result.error is not None:
            continue
        cell = result.cell
        slug = cell.slug()
        write_raw_csv(out / f"{slug}.raw.csv", result.records)
        table = stats_mod.fixed_target_curve(result.records)
        stats_mod.write_fixed_target_csv(out / f"{slug}.agg.csv", table)
        summary_rows.append(_summary_row(result))
    write_summary_csv(out / "summary.csv", summary_rows)


def _summary_row(result: CellResult) -> dict:
    cell = result.cell
    summary = stats_mod.mean_optimization_time(result.records)
    return {
        "algorithm": cell.spec.descriptor(),
        "family": cell.instance.family,
        "dimension": cell.instance.n,
        "instance": cell.instance.instance_id,
        "runs": len(result.records),
        "mean_opt_time": summary.mean,
        "success_rate": summary.successes / summary.runs,
    }


def write_raw_csv(path: Union[str, Path], records: Sequence[RunRecord]) -> None:
    """Improvement rows only: target 0, every target whose first-hit time
    jumps, and the final fitness; plateaus are reconstructed on read."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        for record in sorted(records, key=lambda r: r.run_index):
            hits = record.first_hit
            final = record.final_fitness
            targets = [0]
            targets += [v for v in range(1, final + 1) if hits[v] != hits[v - 1]]
            if final > 0 and targets[-1] != final:
                targets.append(final)
            for v in targets:
                writer.writerow([record.run_index, record.seed, v, int(hits[v])])


def read_raw_csv(path: Union[str, Path], n: int) -> List[RunRecord]:
    """Rebuild per-run records (traces and seeds; success means target n)."""
    by_run: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RAW_HEADER:
            raise ValueError(f"{path}: expected header {RAW_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            try:
                run_index, seed, target, evaluations = (int(c) for c in row)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: malformed row {row!r}") from exc
            by_run.setdefault(run_index, (seed, []))[1].append((target, evaluations))
    records = []
    for run_index in sorted(by_run):
        seed, rows = by_run[run_index]
        record = RunRecord.fresh("", "", run_index, seed, n)
        final = max(target for target, _ in rows)
        # step-extend between improvement rows
        rows.sort()
        for (v, e), (v_next, _) in zip(rows, rows[1:] + [(final + 1, 0)]):
            record.first_hit[v:v_next] = e
        record.final_fitness = final
        record.total_evaluations = int(record.first_hit[final])
        record.success = final == n
        records.append(record)
    return records


def write_summary_csv(path: Union[str, Path], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row["algorithm"],
                    row["family"],
                    row["dimension"],
                    row["instance"],
                    row["runs"],
                    stats_mod.format_float(row["mean_opt_time"]),
                    stats_mod.format_float(row["success_rate"]),
                ]
            )


def read_summary_csv(path: Union[str, Path]) -> List[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SUMMARY_HEADER:
            raise ValueError(f"{path}: expected header {SUMMARY_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(SUMMARY_HEADER):
                raise ValueError(f"{path}:{line_no}: malformed row {row!r}")
            rows.append(
                {
                    "algorithm": row[0],
                    "family": row[1],
                    "dimension": int(row[2]),
                    "instance": int(row[3]),
                    "runs": int(row[4]),
                    "mean_opt_time": float(row[5]),
                    "success_rate": float(row[6]),
                }
            )
    return rows
