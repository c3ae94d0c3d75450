"""Cross-run aggregation: fixed-target curves, gradients, normalized means.

Everything here is pure aggregation over immutable run records. Means
use compensated summation so that results are bit-reproducible and an
independent recomputation of the same quantities matches exactly.

Conventions for partially successful cells: a target's mean and
standard deviation are conditional on the runs that hit it, and the hit
count is reported alongside so downstream consumers can tell full from
partial coverage. A cell with zero successful runs has an undefined
mean optimization time, reported as nan rather than an exception.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "AGG_HEADER",
    "NORMALIZED_HEADER",
    "FixedTargetTable",
    "OptTimeSummary",
    "fixed_target_curve",
    "format_float",
    "gradient",
    "gradients",
    "mean_optimization_time",
    "normalized_summary_rows",
    "read_fixed_target_csv",
    "relative_difference",
    "rolling_gradient",
    "write_fixed_target_csv",
    "write_normalized_csv",
]

AGG_HEADER = ["target", "mean_evals", "std_evals", "hits", "runs"]
NORMALIZED_HEADER = ["algorithm", "dimension", "mean_opt_time", "norm_nlogn", "norm_n2"]


def format_float(x: float) -> str:
    """Stable decimal rendering shared by every CSV writer."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.10g}"


def _mean_std(values: List[float]) -> Tuple[float, float]:
    # compensated sums keep aggregate-vs-reaggregate comparisons exact
    count = len(values)
    if count == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / count
    if count < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return mean, math.sqrt(var)


@dataclass
class FixedTargetTable:
    """Per-target aggregation of first-hit times for one algorithm cell.

    mean[i] is the average evaluation count over the runs that reached
    targets[i] (nan when none did); hits[i] counts those runs.
    """

    n: int
    targets: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    hits: np.ndarray
    runs: int

    @property
    def n_log_n(self) -> float:
        return self.n * math.log(self.n)

    @property
    def n_squared(self) -> float:
        return float(self.n) * float(self.n)

    def index_of(self, target: int) -> int:
        i = int(np.searchsorted(self.targets, target))
        if i >= self.targets.size or self.targets[i] != target:
            raise KeyError(f"target {target} not in table")
        return i


def fixed_target_curve(records: Sequence, targets: Optional[Sequence[int]] = None) -> FixedTargetTable:
    """Aggregate first-hit times per target over a cell's runs."""
    if not records:
        raise ValueError("at least one record is required")
    n = records[0].n
    if any(r.n != n for r in records):
        raise ValueError("records mix dimensions")
    if targets is None:
        targets = np.arange(n + 1, dtype=np.int64)
    else:
        targets = np.asarray(sorted(targets), dtype=np.int64)
        if targets.size and (targets[0] < 0 or targets[-1] > n):
            raise ValueError(f"targets must lie within [0, {n}]")
    mean = np.empty(targets.size, dtype=np.float64)
    std = np.empty(targets.size, dtype=np.float64)
    hits = np.empty(targets.size, dtype=np.int64)
    for i, v in enumerate(targets):
        values = [float(r.first_hit[v]) for r in records if r.first_hit[v] >= 0]
        hits[i] = len(values)
        mean[i], std[i] = _mean_std(values)
    return FixedTargetTable(
        n=n, targets=targets, mean=mean, std=std, hits=hits, runs=len(records)
    )


@dataclass(frozen=True)
class OptTimeSummary:
    """Mean optimization time of a cell with its normalizations."""

    mean: float
    median: float
    std: float
    successes: int
    runs: int
    n: int

    @property
    def norm_nlogn(self) -> float:
        return self.mean / (self.n * math.log(self.n))

    @property
    def norm_n2(self) -> float:
        return self.mean / (float(self.n) * float(self.n))


def mean_optimization_time(records: Sequence) -> OptTimeSummary:
    """Average evaluations to first query the optimum, over successful runs.

    Zero successful runs is a data condition, not a crash: the summary
    then carries nan statistics and successes == 0.
    """
    if not records:
        raise ValueError("at least one record is required")
    n = records[0].n
    if any(r.n != n for r in records):
        raise ValueError("records mix dimensions")
    times = sorted(float(r.first_hit[n]) for r in records if r.success)
    if not times:
        return OptTimeSummary(math.nan, math.nan, math.nan, 0, len(records), n)
    mean, std = _mean_std(times)
    mid = len(times) // 2
    median = times[mid] if len(times) % 2 else (times[mid - 1] + times[mid]) / 2.0
    return OptTimeSummary(mean, median, std, len(times), len(records), n)


def gradient(table: FixedTargetTable, i: int) -> Optional[float]:
    """T(i) - T(i-1): average evaluations to gain one fitness unit at level i.

    None when either endpoint's mean is undefined (the undefined-gradient
    signal); requires consecutive integer targets around i.
    """
    try:
        hi = table.index_of(i)
        lo = table.index_of(i - 1)
    except KeyError:
        return None
    a, b = table.mean[hi], table.mean[lo]
    if math.isnan(a) or math.isnan(b):
        return None
    return float(a - b)


def gradients(table: FixedTargetTable) -> np.ndarray:
    """Vector of gradients aligned with table.targets; nan where undefined."""
    out = np.full(table.targets.size, math.nan)
    consecutive = np.flatnonzero(np.diff(table.targets) == 1) + 1
    out[consecutive] = table.mean[consecutive] - table.mean[consecutive - 1]
    return out


def rolling_gradient(table: FixedTargetTable, i: int, window: int = 5) -> Optional[float]:
    """Mean of G(j) for j in [i, i+window); None if any entry is undefined."""
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    values = []
    for j in range(i, i + window):
        g = gradient(table, j)
        if g is None:
            return None
        values.append(g)
    return math.fsum(values) / window


def relative_difference(
    table_a: FixedTargetTable, table_b: FixedTargetTable, i: int, window: int = 5
) -> Optional[float]:
    """R(i) = (avg G_A - avg G_B) / avg G_B over the window [i, i+window).

    The rolling average smooths both gradient curves before comparing;
    identical tables give exactly 0. None signals an undefined window or
    an all-flat baseline (avg G_B = 0).
    """
    avg_a = rolling_gradient(table_a, i, window)
    avg_b = rolling_gradient(table_b, i, window)
    if avg_a is None or avg_b is None or avg_b == 0.0:
        return None
    return (avg_a - avg_b) / avg_b


def write_fixed_target_csv(
    path: Union[str, Path], table: FixedTargetTable, cap: Optional[float] = None
) -> None:
    """Write the aggregated curve; `cap` clips emitted means for display
    plots without touching the table itself."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_HEADER)
        for i, v in enumerate(table.targets):
            mean = table.mean[i]
            if cap is not None and not math.isnan(mean):
                mean = min(mean, cap)
            writer.writerow(
                [
                    int(v),
                    format_float(mean),
                    format_float(table.std[i]),
                    int(table.hits[i]),
                    table.runs,
                ]
            )


def read_fixed_target_csv(path: Union[str, Path]) -> FixedTargetTable:
    targets, mean, std, hits = [], [], [], []
    runs = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != AGG_HEADER:
            raise ValueError(f"{path}: expected header {AGG_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            try:
                targets.append(int(row[0]))
                mean.append(float(row[1]))
                std.append(float(row[2]))
                hits.append(int(row[3]))
                runs = int(row[4])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{line_no}: malformed row {row!r}") from exc
    if not targets:
        raise ValueError(f"{path}: no data rows")
    return FixedTargetTable(
        n=max(targets),
        targets=np.asarray(targets, dtype=np.int64),
        mean=np.asarray(mean),
        std=np.asarray(std),
        hits=np.asarray(hits, dtype=np.int64),
        runs=runs,
    )


def normalized_summary_rows(cell_results: Sequence) -> List[dict]:
    """Rows for the normalized-means bar data, one per (algorithm, n).

    Successful runs are pooled across instance ids of the same algorithm
    and dimension (instances are runtime-equivalent by construction).
    """
    pooled: dict = {}
    order: List[Tuple[str, int]] = []
    for result in cell_results:
        if getattr(result, "error", None) is not None:
            continue
        key = (result.cell.spec.descriptor(), result.cell.instance.n)
        if key not in pooled:
            pooled[key] = []
            order.append(key)
        n = result.cell.instance.n
        pooled[key].extend(
            float(r.first_hit[n]) for r in result.records if r.success
        )
    rows = []
    for algorithm, n in order:
        times = pooled[(algorithm, n)]
        mean = math.fsum(times) / len(times) if times else math.nan
        rows.append(
            {
                "algorithm": algorithm,
                "dimension": n,
                "mean_opt_time": mean,
                "norm_nlogn": mean / (n * math.log(n)) if times else math.nan,
                "norm_n2": mean / (float(n) * float(n)) if times else math.nan,
            }
        )
    return rows


def write_normalized_csv(path: Union[str, Path], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NORMALIZED_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row["algorithm"],
                    row["dimension"],
                    format_float(row["mean_opt_time"]),
                    format_float(row["norm_nlogn"]),
                    format_float(row["norm_n2"]),
                ]
            )
