"""Figure builders for the four exhibit kinds.

Each ``build_*`` function returns a matplotlib ``Figure`` so tests can
inspect the plotted arrays; :func:`render` combines building with a
deterministic save.  Determinism matters because regenerated figures
are diffed byte-for-byte in CI: we pin the SVG id hash salt and strip
every timestamp the backends would otherwise embed.

Style conventions shared by all kinds:
  * one color per series, solid lines for fully supported data,
  * dashed continuation once a fixed-target curve leaves the range
    every run reached (hits < runs),
  * legend labels taken from the algorithm part of the input slug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    GradientSeries,
    normalizer_value,
    read_fixed_target,
    read_gradients,
    read_normalized,
    read_summary,
    sniff_mean_table,
    successes,
)

KIND_NORMALIZED_MEANS = "normalized_means"
KIND_FIXED_TARGET = "fixed_target"
KIND_GRADIENTS = "gradients"
KIND_LO_FIXED_TARGET = "lo_fixed_target"
KINDS = (
    KIND_NORMALIZED_MEANS,
    KIND_FIXED_TARGET,
    KIND_GRADIENTS,
    KIND_LO_FIXED_TARGET,
)

NORMALIZERS = ("n_ln_n", "n_squared")

_FORMATS = (".svg", ".png", ".pdf")

# Stable ids inside SVG output; matplotlib salts them with this string
# instead of the figure's creation time.
plt.rcParams["svg.hashsalt"] = "dbbo-plots"
plt.rcParams["figure.figsize"] = (7.0, 4.5)


@dataclass(frozen=True)
class PlotJob:
    """One figure request: what to draw, from which files, to where."""

    kind: str
    inputs: Tuple[str, ...]
    out: str
    cap: Optional[float] = None
    window: int = 5
    normalizer: str = "n_ln_n"
    raster: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        if self.cap is not None and not self.cap > 0:
            raise ValueError("cap must be positive")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.normalizer not in NORMALIZERS:
            raise ValueError(f"unknown normalizer {self.normalizer!r}")


def build_normalized_means(
    inputs: Sequence[str], normalizer: str = "n_ln_n"
) -> "plt.Figure":
    """Mean optimization time over dimension, divided by a reference scaling.

    Accepts run summaries (several instances per dimension are pooled,
    weighted by the number of successful runs each row aggregates) and
    pre-normalized tables, in any mixture; the header of each file
    decides how it is parsed.
    """
    points: Dict[str, Dict[int, Tuple[float, float]]] = {}

    def add(algorithm: str, dimension: int, weight: float, value: float) -> None:
        if weight <= 0 or math.isnan(value):
            return
        acc = points.setdefault(algorithm, {})
        w, v = acc.get(dimension, (0.0, 0.0))
        acc[dimension] = (w + weight, v + weight * value)

    for path in inputs:
        table = sniff_mean_table(path)
        if table == "summary":
            for row in read_summary(path):
                add(row.algorithm, row.dimension, successes(row), row.mean_opt_time)
        else:
            for row in read_normalized(path):
                value = row.norm_nlogn if normalizer == "n_ln_n" else row.norm_n2
                add(row.algorithm, row.dimension, 1.0, value * normalizer_value(row.dimension, normalizer))

    fig, ax = plt.subplots()
    plotted = 0
    for algorithm in sorted(points):
        dims = sorted(points[algorithm])
        ys = []
        for n in dims:
            w, v = points[algorithm][n]
            ys.append((v / w) / normalizer_value(n, normalizer))
        ax.plot(dims, ys, marker="o", label=algorithm)
        plotted += 1
    if plotted == 0:
        plt.close(fig)
        raise ValueError("no plottable rows: every input row has zero successful runs")

    denom = "n ln n" if normalizer == "n_ln_n" else "n^2"
    ax.set_xlabel("dimension n")
    ax.set_ylabel(f"mean optimization time / {denom}")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return fig


def _split_full_hit(curve_hits: np.ndarray, runs: int) -> int:
    # Index one past the last target every run reached; 0 if none.
    full = np.flatnonzero(curve_hits == runs)
    return int(full[-1]) + 1 if full.size else 0


def build_fixed_target(
    inputs: Sequence[str], cap: Optional[float] = None, log_y: bool = False
) -> "plt.Figure":
    """Mean evaluations to reach each fitness target, one curve per file.

    Solid up to the last target every run reached, dashed beyond it
    (those means condition on the runs that got there).  A cap clips
    displayed means without touching the underlying files.
    """
    fig, ax = plt.subplots()
    for path in inputs:
        curve = read_fixed_target(path)
        y = curve.mean.copy()
        if cap is not None:
            y = np.minimum(y, cap)
        boundary = _split_full_hit(curve.hits, curve.runs)
        color = None
        if boundary:
            (line,) = ax.plot(
                curve.targets[:boundary], y[:boundary], label=curve.label
            )
            color = line.get_color()
        start = max(boundary - 1, 0)
        if boundary < len(y):
            ax.plot(
                curve.targets[start:],
                y[start:],
                linestyle="--",
                color=color,
                label=None if boundary else curve.label,
            )
    ax.set_xlabel("fitness target")
    ax.set_ylabel("mean evaluations to reach target")
    if log_y:
        ax.set_yscale("log")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return fig


def rolling_means(series: GradientSeries, window: int) -> Dict[int, float]:
    """Mean gradient over the ``window`` targets starting at each target.

    A window is reported only when all of its targets are present in
    the series and carry finite values; ``window=1`` returns the raw
    series.
    """
    lookup = {int(t): float(v) for t, v in zip(series.targets, series.values)}
    out: Dict[int, float] = {}
    for start in lookup:
        values = []
        for offset in range(window):
            value = lookup.get(start + offset)
            if value is None or not math.isfinite(value):
                break
            values.append(value)
        else:
            out[start] = sum(values) / window
    return out


def relative_gap(
    first: GradientSeries, second: GradientSeries, window: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Windowed relative difference between two gradient series.

    At each target where both series support a full window, this is
    the first series' window mean over the second's, minus one; zero
    therefore means the two climb equally fast there.  Targets where
    the second series' window mean vanishes are skipped.
    """
    a = rolling_means(first, window)
    b = rolling_means(second, window)
    targets = sorted(set(a) & set(b))
    xs, ys = [], []
    for t in targets:
        if b[t] == 0.0:
            continue
        xs.append(t)
        ys.append(a[t] / b[t] - 1.0)
    return np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.float64)


def build_gradients(inputs: Sequence[str], window: int = 5) -> "plt.Figure":
    """Per-target gradient curves, plus the relative gap between the
    first two inputs on a secondary axis when two or more are given."""
    series = [read_gradients(path) for path in inputs]
    fig, ax = plt.subplots()
    for s in series:
        finite = np.isfinite(s.values)
        ax.plot(s.targets[finite], s.values[finite], label=s.label)
    ax.set_xlabel("fitness target")
    ax.set_ylabel("gradient (mean evaluations per fitness level)")
    ax.legend(fontsize="small", loc="upper left")

    if len(series) >= 2:
        xs, ys = relative_gap(series[0], series[1], window)
        twin = ax.twinx()
        twin.plot(xs, ys, color="black", linestyle=":", linewidth=1.0)
        twin.set_ylabel(
            f"relative gap, {series[0].label} vs {series[1].label} (window {window})"
        )
    fig.tight_layout()
    return fig


def build_lo_fixed_target(
    inputs: Sequence[str], cap: Optional[float] = None
) -> "plt.Figure":
    """Fixed-target curves on a log scale, for quadratic-time problems
    where the interesting structure spans several orders of magnitude."""
    return build_fixed_target(inputs, cap=cap, log_y=True)


def _resolve_output(out: str, raster: bool) -> Path:
    path = Path(out)
    if raster:
        return path.with_suffix(".png")
    if path.suffix not in _FORMATS:
        return path.with_suffix(path.suffix + ".svg")
    return path


def save(fig: "plt.Figure", out: str | Path, raster: bool = False) -> Path:
    """Write a figure without embedded timestamps; returns the path used.

    Vector SVG by default; ``raster`` forces PNG whatever the suffix
    says.  PDF is honored when asked for by suffix.
    """
    path = _resolve_output(str(out), raster)
    suffix = path.suffix
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".png":
        metadata = {"Software": None}
    else:
        metadata = {"CreationDate": None}
    fig.savefig(path, metadata=metadata)
    return path


def render(job: PlotJob) -> Path:
    """Build the figure a job describes and save it; returns the path."""
    if job.kind == KIND_NORMALIZED_MEANS:
        fig = build_normalized_means(job.inputs, job.normalizer)
    elif job.kind == KIND_FIXED_TARGET:
        fig = build_fixed_target(job.inputs, cap=job.cap)
    elif job.kind == KIND_GRADIENTS:
        fig = build_gradients(job.inputs, window=job.window)
    else:
        fig = build_lo_fixed_target(job.inputs, cap=job.cap)
    try:
        return save(fig, job.out, raster=job.raster)
    finally:
        plt.close(fig)
