"""Flat key=value experiment configs.

The on-disk format is plain text, one assignment per line:

    # comment lines and blank lines are ignored
    runs_per_cell = 100
    master_seed = 881310257
    budget = 5000000
    algorithm = ea_gt0,lambda=50,p=1/n
    algorithm = rls
    problem = onemax,n=500|1000,id=0

`algorithm=` lines repeat, one per variant, and take the same
descriptors the CSV outputs use. `problem=` lines repeat as well; their
`n=` and `id=` fields accept `|`-separated value lists that are crossed
into cells. Every parse failure names the offending file line.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from .algorithms import ConfigurationError, parse_algorithm
from .profiler import DEFAULT_MASTER_SEED, ExperimentConfig, ProblemSet

__all__ = ["ConfigError", "apply_overrides", "parse_config", "parse_problem_line", "read_config"]

_MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """Malformed config text; message carries file and line context."""


def _parse_int(text: str, key: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: {key} needs an integer, got {text!r}") from None


def parse_problem_line(text: str, where: str = "problem") -> ProblemSet:
    """`family,n=500|1000,id=0|1` -> ProblemSet; id defaults to 0."""
    parts = [p.strip() for p in text.split(",")]
    family = parts[0]
    dimensions: Tuple[int, ...] = ()
    instance_ids: Tuple[int, ...] = (0,)
    for part in parts[1:]:
        if "=" not in part:
            raise ConfigError(f"{where}: expected key=value in problem field {part!r}")
        key, _, value = part.partition("=")
        values = tuple(_parse_int(v, key, where) for v in value.split("|"))
        if key == "n":
            dimensions = values
        elif key == "id":
            instance_ids = values
        else:
            raise ConfigError(f"{where}: unknown problem field {key!r}")
    if not dimensions:
        raise ConfigError(f"{where}: problem line needs an n= field")
    try:
        return ProblemSet(family=family, dimensions=dimensions, instance_ids=instance_ids)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    algorithms: List = []
    problems: List[ProblemSet] = []
    scalars = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{line_no}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not value:
            raise ConfigError(f"{where}: empty value for {key!r}")
        if key == "algorithm":
            try:
                algorithms.append(parse_algorithm(value))
            except ConfigurationError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        elif key == "problem":
            problems.append(parse_problem_line(value, where))
        elif key in ("runs_per_cell", "master_seed", "budget"):
            scalars[key] = _parse_int(value, key, where)
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    if not algorithms:
        raise ConfigError(f"{source}: no algorithm= lines")
    if not problems:
        raise ConfigError(f"{source}: no problem= lines")
    seed = scalars.get("master_seed", DEFAULT_MASTER_SEED)
    if not 0 <= seed <= _MAX_SEED:
        raise ConfigError(f"{source}: master_seed must fit in 64 bits, got {seed}")
    try:
        return ExperimentConfig(
            algorithms=tuple(algorithms),
            problems=tuple(problems),
            runs_per_cell=scalars.get("runs_per_cell", 100),
            master_seed=seed,
            budget=scalars.get("budget"),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def read_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc})") from None
    return parse_config(text, source=str(path))


def apply_overrides(config: ExperimentConfig, overrides: Sequence[str]) -> ExperimentConfig:
    """Apply `KEY=VALUE` strings on top of a parsed config.

    Supported keys: runs_per_cell, master_seed, budget (budget=none
    lifts a configured cap).
    """
    changes = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected KEY=VALUE")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if key == "budget" and value.lower() == "none":
            changes[key] = None
        elif key in ("runs_per_cell", "master_seed", "budget"):
            changes[key] = _parse_int(value, key, f"override {item!r}")
        else:
            raise ConfigError(f"override {item!r}: unknown key {key!r}")
    if not changes:
        return config
    try:
        return dataclasses.replace(config, **changes)
    except ValueError as exc:
        raise ConfigError(f"override: {exc}") from None
