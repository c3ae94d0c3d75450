"""Plotting companion for the dbbo benchmark suite.

Consumes the suite's documented CSV files and renders the standard
exhibit figures.  The coupling is the text schemas alone: nothing here
imports the suite.
"""

from .io import (
    FixedTargetCurve,
    GradientSeries,
    NormalizedRow,
    PlotInputError,
    SummaryRow,
    read_fixed_target,
    read_gradients,
    read_normalized,
    read_summary,
)
from .render import (
    KINDS,
    PlotJob,
    build_fixed_target,
    build_gradients,
    build_lo_fixed_target,
    build_normalized_means,
    relative_gap,
    render,
    rolling_means,
    save,
)

__all__ = [
    "FixedTargetCurve",
    "GradientSeries",
    "NormalizedRow",
    "PlotInputError",
    "SummaryRow",
    "read_fixed_target",
    "read_gradients",
    "read_normalized",
    "read_summary",
    "KINDS",
    "PlotJob",
    "build_fixed_target",
    "build_gradients",
    "build_lo_fixed_target",
    "build_normalized_means",
    "relative_gap",
    "render",
    "rolling_means",
    "save",
]

__version__ = "0.1.0"
