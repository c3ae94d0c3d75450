"""Readers for the benchmark suite's CSV output files.

The suite exposes four fixed text schemas and this module is the only
place that knows them.  Every reader returns plain dataclasses; every
parse failure raises :class:`PlotInputError` naming the file and the
1-based line of the offending row, so a bad input can be fixed without
opening a debugger.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

AGG_HEADER = ("target", "mean_evals", "std_evals", "hits", "runs")
SUMMARY_HEADER = (
    "algorithm",
    "family",
    "dimension",
    "instance",
    "runs",
    "mean_opt_time",
    "success_rate",
)
NORMALIZED_HEADER = ("algorithm", "dimension", "mean_opt_time", "norm_nlogn", "norm_n2")
GRADIENTS_HEADER = ("target", "gradient")


class PlotInputError(ValueError):
    """A CSV file does not satisfy its documented schema."""

    def __init__(self, path: str | Path, line_no: int, message: str) -> None:
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


def series_label(path: str | Path) -> str:
    """Legend label for a curve file: the algorithm part of the slug.

    File names produced by the suite look like
    ``<algorithm>__<instance>.agg.csv``; everything before the first
    ``__`` identifies the algorithm, which is the part worth showing
    when all curves in one figure share an instance.
    """
    name = Path(path).name
    for suffix in (".csv", ".agg", ".display", ".gradients"):
        name = name.removesuffix(suffix)
    return name.split("__")[0]


def _read_rows(path: str | Path, header: Tuple[str, ...]) -> List[Tuple[int, List[str]]]:
    # Returns (1-based line number, fields) per data row; header checked here.
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise PlotInputError(path, 0, f"cannot read file: {exc.strerror}") from exc
    if not rows or tuple(rows[0]) != header:
        found = ",".join(rows[0]) if rows else "<empty file>"
        raise PlotInputError(
            path, 1, f"expected header {','.join(header)!r}, found {found!r}"
        )
    data = [(i, row) for i, row in enumerate(rows[1:], start=2) if row]
    if not data:
        raise PlotInputError(path, 1, "no data rows")
    return data


def _parse_int(path: str | Path, line_no: int, field: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise PlotInputError(path, line_no, f"{field}: expected integer, found {text!r}") from None


def _parse_float(path: str | Path, line_no: int, field: str, text: str) -> float:
    # "nan" is a legitimate value for means at never-reached targets.
    try:
        return float(text)
    except ValueError:
        raise PlotInputError(path, line_no, f"{field}: expected number, found {text!r}") from None


def _expect_width(path: str | Path, line_no: int, row: Sequence[str], width: int) -> None:
    if len(row) != width:
        raise PlotInputError(path, line_no, f"expected {width} fields, found {len(row)}")


@dataclass(frozen=True)
class FixedTargetCurve:
    """One algorithm's fixed-target profile on one instance."""

    label: str
    targets: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    hits: np.ndarray
    runs: int

    def __post_init__(self) -> None:
        lengths = {len(self.targets), len(self.mean), len(self.std), len(self.hits)}
        if lengths != {len(self.targets)}:
            raise ValueError("column lengths differ")


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    family: str
    dimension: int
    instance: int
    runs: int
    mean_opt_time: float
    success_rate: float


@dataclass(frozen=True)
class NormalizedRow:
    algorithm: str
    dimension: int
    mean_opt_time: float
    norm_nlogn: float
    norm_n2: float


@dataclass(frozen=True)
class GradientSeries:
    """Per-target gradient values for one algorithm."""

    label: str
    targets: np.ndarray
    values: np.ndarray


def read_fixed_target(path: str | Path) -> FixedTargetCurve:
    """Parse an aggregated fixed-target CSV (``.agg`` or ``.display``)."""
    data = _read_rows(path, AGG_HEADER)
    targets, means, stds, hits, runs = [], [], [], [], []
    for line_no, row in data:
        _expect_width(path, line_no, row, 5)
        targets.append(_parse_int(path, line_no, "target", row[0]))
        means.append(_parse_float(path, line_no, "mean_evals", row[1]))
        stds.append(_parse_float(path, line_no, "std_evals", row[2]))
        hits.append(_parse_int(path, line_no, "hits", row[3]))
        runs.append(_parse_int(path, line_no, "runs", row[4]))
    if len(set(runs)) != 1:
        raise PlotInputError(path, data[-1][0], "runs column is not constant")
    return FixedTargetCurve(
        label=series_label(path),
        targets=np.asarray(targets, dtype=np.int64),
        mean=np.asarray(means, dtype=np.float64),
        std=np.asarray(stds, dtype=np.float64),
        hits=np.asarray(hits, dtype=np.int64),
        runs=runs[0],
    )


def read_summary(path: str | Path) -> List[SummaryRow]:
    data = _read_rows(path, SUMMARY_HEADER)
    out = []
    for line_no, row in data:
        _expect_width(path, line_no, row, 7)
        out.append(
            SummaryRow(
                algorithm=row[0],
                family=row[1],
                dimension=_parse_int(path, line_no, "dimension", row[2]),
                instance=_parse_int(path, line_no, "instance", row[3]),
                runs=_parse_int(path, line_no, "runs", row[4]),
                mean_opt_time=_parse_float(path, line_no, "mean_opt_time", row[5]),
                success_rate=_parse_float(path, line_no, "success_rate", row[6]),
            )
        )
    return out


def read_normalized(path: str | Path) -> List[NormalizedRow]:
    data = _read_rows(path, NORMALIZED_HEADER)
    out = []
    for line_no, row in data:
        _expect_width(path, line_no, row, 5)
        out.append(
            NormalizedRow(
                algorithm=row[0],
                dimension=_parse_int(path, line_no, "dimension", row[1]),
                mean_opt_time=_parse_float(path, line_no, "mean_opt_time", row[2]),
                norm_nlogn=_parse_float(path, line_no, "norm_nlogn", row[3]),
                norm_n2=_parse_float(path, line_no, "norm_n2", row[4]),
            )
        )
    return out


def read_gradients(path: str | Path) -> GradientSeries:
    data = _read_rows(path, GRADIENTS_HEADER)
    targets, values = [], []
    for line_no, row in data:
        _expect_width(path, line_no, row, 2)
        targets.append(_parse_int(path, line_no, "target", row[0]))
        values.append(_parse_float(path, line_no, "gradient", row[1]))
    return GradientSeries(
        label=series_label(path),
        targets=np.asarray(targets, dtype=np.int64),
        values=np.asarray(values, dtype=np.float64),
    )


def sniff_mean_table(path: str | Path) -> str:
    """Decide whether a file is a run summary or a normalized-means table.

    Both are legal inputs for the normalized-means plot; the header
    disambiguates.  Returns ``"summary"`` or ``"normalized"``.
    """
    try:
        with open(path, newline="") as handle:
            first = next(csv.reader(handle), None)
    except OSError as exc:
        raise PlotInputError(path, 0, f"cannot read file: {exc.strerror}") from exc
    if first is not None and tuple(first) == SUMMARY_HEADER:
        return "summary"
    if first is not None and tuple(first) == NORMALIZED_HEADER:
        return "normalized"
    found = ",".join(first) if first else "<empty file>"
    raise PlotInputError(
        path,
        1,
        "expected a summary or normalized-means header, found " + repr(found),
    )


def successes(row: SummaryRow) -> int:
    """Number of successful runs behind a summary row."""
    return int(round(row.runs * row.success_rate))


def normalizer_value(dimension: int, normalizer: str) -> float:
    if normalizer == "n_ln_n":
        return dimension * math.log(dimension)
    if normalizer == "n_squared":
        return float(dimension) ** 2
    raise ValueError(f"unknown normalizer {normalizer!r}")
