"""The (1+lambda) EA>0 family, two self-adjusting controllers, and RLS.

All variants share one generational skeleton: create offspring by
flipping a Bin>0(n, p)-distributed number of uniformly chosen bits of
the parent, then make the next parent a uniform draw from the argmax of
{parent, offspring...} (plus selection, so fitness never decreases).
The variants differ only in how the rate p, the two-rate parameter r,
or the offspring count lambda evolve between generations:

  ea           static lambda and rate; `resampling=False` gives the
               classical algorithm whose strength may be zero
  two_rate     half the offspring at rate r/(2n), half at 2r/n; r then
               follows the winning half or a random halving/doubling,
               clamped to [2, n/4]
  adapt_lambda success-based lambda control (double on failure; divide
               by successes / reset to one / halve on success)
  rls          always flips exactly one bit

Two engines execute runs. The pure-Python step functions below are the
readable reference, testable one generation at a time; the compiled
kernels in `_kernels` replay whole runs at speed. Both consume one
RngStream per run and implement identical sampling laws, but are not
draw-for-draw identical since they organize random calls differently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .core import BitString, RngStream, as_generator, random_bitstring
from .problems import ProblemInstance, evaluate
from .variation import mutate, sample_binomial, sample_conditional_binomial

__all__ = [
    "AlgorithmSpec",
    "ConfigurationError",
    "ENGINES",
    "GenerationState",
    "RatePolicy",
    "init_state",
    "next_lambda",
    "next_two_rate_r",
    "parse_algorithm",
    "run",
    "step_adaptive_lambda",
    "step_rls",
    "step_static",
    "step_two_rate",
]

KIND_EA = "ea"
KIND_TWO_RATE = "two_rate"
KIND_ADAPT_LAMBDA = "adapt_lambda"
KIND_RLS = "rls"
KINDS = (KIND_EA, KIND_TWO_RATE, KIND_ADAPT_LAMBDA, KIND_RLS)

RULE_DIV_S = "div_s"
RULE_RESET = "reset"
RULE_HALVE = "halve"
LAMBDA_RULES = (RULE_DIV_S, RULE_RESET, RULE_HALVE)

RATE_FIXED = "fixed"
RATE_OVER_N = "over_n"
RATE_PSTAR = "pstar"

LAMBDA_MAX_DEFAULT = 2**30

ENGINE_KERNEL = "kernel"
ENGINE_PYTHON = "python"
ENGINES = (ENGINE_KERNEL, ENGINE_PYTHON)

# p* = ln(lambda)/(2n) degenerates to 0 at lambda = 1; rates are clamped
# into [PSTAR_FLOOR, 0.5], where the floor is small enough that Bin>0 is
# indistinguishable from "always one flip"
PSTAR_FLOOR = 1e-12

_UNLIMITED = 2**62


class ConfigurationError(ValueError):
    """An algorithm spec that cannot be run as configured."""


@dataclass(frozen=True)
class RatePolicy:
    """How the mutation rate is obtained from (n, lambda_current).

    mode "over_n" resolves value/n (the usual c/n parametrization),
    "fixed" uses the value verbatim, and "pstar" computes
    ln(lambda)/(2n), re-evaluated whenever lambda changes.
    """

    mode: str = RATE_OVER_N
    value: float = 1.0

    def __post_init__(self):
        if self.mode not in (RATE_FIXED, RATE_OVER_N, RATE_PSTAR):
            raise ConfigurationError(f"unknown rate mode {self.mode!r}")
        if self.mode == RATE_FIXED and not 0.0 < self.value < 1.0:
            raise ConfigurationError(f"fixed rate must lie in (0, 1), got {self.value}")
        if self.mode == RATE_OVER_N and self.value <= 0.0:
            raise ConfigurationError(f"over-n rate numerator must be positive, got {self.value}")

    def resolve(self, n: int, lam: int) -> float:
        if self.mode == RATE_FIXED:
            p = self.value
        elif self.mode == RATE_OVER_N:
            p = self.value / n
        else:
            p = math.log(lam) / (2.0 * n) if lam > 1 else 0.0
        return min(max(p, PSTAR_FLOOR), 0.5)

    def token(self) -> str:
        if self.mode == RATE_PSTAR:
            return "pstar"
        if self.mode == RATE_OVER_N:
            return f"{self.value:g}/n"
        return f"{self.value:g}"


def _parse_rate_token(token: str) -> RatePolicy:
    token = token.strip()
    if token == "pstar":
        return RatePolicy(RATE_PSTAR, 0.0)
    if token.endswith("/n"):
        return RatePolicy(RATE_OVER_N, float(token[:-2]))
    return RatePolicy(RATE_FIXED, float(token))


@dataclass(frozen=True)
class AlgorithmSpec:
    """Algorithm identity plus every (hyper-)parameter needed to run it.

    `lam` is the static offspring count, or the initial one for the
    adaptive-lambda variants. `resampling` selects Bin>0 over Bin for
    the static EA (the self-adjusting variants always resample; RLS has
    no rate at all).
    """

    kind: str
    lam: int = 1
    rate: RatePolicy = field(default_factory=RatePolicy)
    resampling: bool = True
    r_init: float = 2.0
    lambda_rule: str = RULE_DIV_S
    lambda_max: int = LAMBDA_MAX_DEFAULT

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown algorithm kind {self.kind!r}")
        if self.lam < 1:
            raise ConfigurationError(f"lambda must be at least 1, got {self.lam}")
        if self.kind == KIND_TWO_RATE:
            if self.lam < 2:
                raise ConfigurationError("the two-rate EA needs lambda >= 2")
            if self.r_init < 2.0:
                raise ConfigurationError(f"r_init must be at least 2, got {self.r_init}")
            if not self.resampling:
                raise ConfigurationError("the two-rate EA is defined with resampling only")
        if self.kind == KIND_ADAPT_LAMBDA:
            if self.lambda_rule not in LAMBDA_RULES:
                raise ConfigurationError(f"unknown lambda rule {self.lambda_rule!r}")
            if not self.resampling:
                raise ConfigurationError("adaptive-lambda variants are defined with resampling only")
        if self.lambda_max < 1:
            raise ConfigurationError("lambda_max must be at least 1")

    def validate_for(self, inst: ProblemInstance) -> None:
        """Instance-dependent checks, raised before any evaluation happens."""
        if self.kind == KIND_TWO_RATE:
            if inst.n < 8:
                raise ConfigurationError(
                    "the two-rate EA needs n >= 8 so that its clamp interval [2, n/4] is nonempty"
                )
            if self.r_init > inst.n / 4.0:
                raise ConfigurationError(
                    f"r_init={self.r_init} exceeds the upper clamp n/4={inst.n / 4.0}"
                )

    def descriptor(self) -> str:
        if self.kind == KIND_RLS:
            return "rls"
        if self.kind == KIND_EA:
            name = "ea_gt0" if self.resampling else "ea"
            return f"{name},lambda={self.lam},p={self.rate.token()}"
        if self.kind == KIND_TWO_RATE:
            return f"two_rate,lambda={self.lam},r0={self.r_init:g}"
        return f"adaptlambda,rule={self.lambda_rule},lambda0={self.lam}"


_KIND_ALIASES = {
    "ea_gt0": (KIND_EA, True),
    "ea": (KIND_EA, False),
    "two_rate": (KIND_TWO_RATE, True),
    "adaptlambda": (KIND_ADAPT_LAMBDA, True),
    "rls": (KIND_RLS, True),
}


def parse_algorithm(text: str) -> AlgorithmSpec:
    """Parse a text descriptor, the inverse of AlgorithmSpec.descriptor().

    Examples: "ea_gt0,lambda=50,p=1/n", "ea_gt0,lambda=50,p=pstar",
    "two_rate,lambda=50,r0=2", "adaptlambda,rule=div_s,lambda0=50", "rls".
    """
    parts = [p.strip() for p in text.strip().split(",") if p.strip()]
    if not parts:
        raise ConfigurationError("empty algorithm descriptor")
    head = parts[0]
    if head not in _KIND_ALIASES:
        raise ConfigurationError(f"unknown algorithm {head!r} in descriptor {text!r}")
    kind, resampling = _KIND_ALIASES[head]
    kwargs: dict = {"kind": kind, "resampling": resampling}
    try:
        for part in parts[1:]:
            if "=" not in part:
                raise ConfigurationError(f"expected key=value, got {part!r} in {text!r}")
            key, value = (s.strip() for s in part.split("=", 1))
            if key == "lambda" and kind in (KIND_EA, KIND_TWO_RATE):
                kwargs["lam"] = int(value)
            elif key == "lambda0" and kind == KIND_ADAPT_LAMBDA:
                kwargs["lam"] = int(value)
            elif key == "p" and kind in (KIND_EA, KIND_ADAPT_LAMBDA):
                kwargs["rate"] = _parse_rate_token(value)
            elif key == "r0" and kind == KIND_TWO_RATE:
                kwargs["r_init"] = float(value)
            elif key == "rule" and kind == KIND_ADAPT_LAMBDA:
                kwargs["lambda_rule"] = value
            elif key == "lambda_max" and kind == KIND_ADAPT_LAMBDA:
                kwargs["lambda_max"] = int(value)
            else:
                raise ConfigurationError(f"key {key!r} is not valid for {head!r}")
    except ValueError as exc:
        raise ConfigurationError(f"malformed algorithm descriptor {text!r}: {exc}") from exc
    return AlgorithmSpec(**kwargs)


@dataclass
class GenerationState:
    """Mutable per-run state threaded through the step functions."""

    parent: BitString
    parent_fitness: int
    lam_current: int
    r_current: float
    evaluations_used: int
    done: bool = False  # optimum queried; runs stop mid-generation


Recorder = Callable[[int, int], None]


def init_state(
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
) -> GenerationState:
    """Sample and evaluate the initial parent (this is evaluation 1)."""
    spec.validate_for(inst)
    parent = random_bitstring(inst.n, rng)
    fitness = evaluate(inst, parent)
    if recorder is not None:
        recorder(1, fitness)
    return GenerationState(
        parent=parent,
        parent_fitness=fitness,
        lam_current=spec.lam,
        r_current=spec.r_init,
        evaluations_used=1,
        done=fitness == inst.optimum_value,
    )


class _Selection:
    """Uniform draw over the argmax of everything offered, via reservoir.

    The parent is offered first, then each offspring as it is evaluated,
    so duplicates of the maximum each count once per individual and no
    offspring list is ever materialized.
    """

    __slots__ = ("g", "best", "best_fitness", "count")

    def __init__(self, g: np.random.Generator, parent: BitString, parent_fitness: int):
        self.g = g
        self.best = parent
        self.best_fitness = parent_fitness
        self.count = 1

    def offer(self, y: BitString, fy: int) -> None:
        if fy > self.best_fitness:
            self.best = y
            self.best_fitness = fy
            self.count = 1
        elif fy == self.best_fitness:
            self.count += 1
            if self.g.random() < 1.0 / self.count:
                self.best = y


def _finish_generation(state: GenerationState, sel: _Selection) -> GenerationState:
    assert sel.best_fitness >= state.parent_fitness, "plus selection lost fitness"
    state.parent = sel.best
    state.parent_fitness = sel.best_fitness
    return state


def _sample_strength(n: int, p: float, resampling: bool, g: np.random.Generator) -> int:
    if resampling:
        l = sample_conditional_binomial(n, p, g)
        assert l >= 1
        return l
    return sample_binomial(n, p, g)


def step_static(
    state: GenerationState,
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
    budget: Optional[int] = None,
) -> GenerationState:
    """One generation of the static (1+lambda) EA (resampling or classic)."""
    g = as_generator(rng)
    n = inst.n
    p = spec.rate.resolve(n, spec.lam)
    cap = _UNLIMITED if budget is None else budget
    sel = _Selection(g, state.parent, state.parent_fitness)
    for _ in range(spec.lam):
        if state.evaluations_used >= cap:
            break
        l = _sample_strength(n, p, spec.resampling, g)
        y = mutate(state.parent, l, g)
        fy = evaluate(inst, y)
        state.evaluations_used += 1
        if recorder is not None:
            recorder(state.evaluations_used, fy)
        sel.offer(y, fy)
        if fy == inst.optimum_value:
            state.done = True
            break
    return _finish_generation(state, sel)


def next_two_rate_r(
    r: float,
    n: int,
    best_group: int,
    parent_beats_all: bool,
    rng: Union[RngStream, np.random.Generator],
) -> float:
    """The two-rate update: adopt the winning half's value or move randomly.

    best_group is 0 if the best offspring came from the r/(2n) half and
    1 for the 2r/n half (cross-group fitness ties already broken
    uniformly by the caller). With probability 1/2 the winner's value
    (r/2 or 2r) is adopted; otherwise the direction is chosen uniformly.
    When the parent strictly beat every offspring there is no winning
    offspring value to adopt, so only the random branch applies. The
    result is clamped to [2, n/4].

    `rng` may be anything exposing random() -> float in [0, 1), which
    lets branch tests script the draws.
    """
    g = rng.generator if isinstance(rng, RngStream) else rng
    adopt = (not parent_beats_all) and g.random() < 0.5
    if adopt:
        r_new = r / 2.0 if best_group == 0 else 2.0 * r
    else:
        r_new = r / 2.0 if g.random() < 0.5 else 2.0 * r
    return min(max(r_new, 2.0), n / 4.0)


def step_two_rate(
    state: GenerationState,
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
    budget: Optional[int] = None,
) -> GenerationState:
    """One generation of the two-rate EA with self-adjusting r.

    ceil(lambda/2) offspring use rate r/(2n) and floor(lambda/2) use
    2r/n, all with resampled strengths; then r is updated through
    next_two_rate_r. Odd lambda gives the extra offspring to the low
    half.
    """
    if state.lam_current < 2:
        raise ConfigurationError("the two-rate EA needs lambda >= 2")
    g = as_generator(rng)
    n = inst.n
    r = state.r_current
    assert 2.0 <= r <= n / 4.0, "r escaped its clamp interval"
    low_count = (state.lam_current + 1) // 2
    p_low = r / (2.0 * n)
    p_high = 2.0 * r / n
    cap = _UNLIMITED if budget is None else budget
    old_fitness = state.parent_fitness
    sel = _Selection(g, state.parent, state.parent_fitness)
    best_off_fitness = -1
    best_off_group = 0
    best_off_count = 0
    stopped = False
    for i in range(state.lam_current):
        if state.evaluations_used >= cap:
            stopped = True
            break
        group = 0 if i < low_count else 1
        l = sample_conditional_binomial(n, p_low if group == 0 else p_high, g)
        assert l >= 1
        y = mutate(state.parent, l, g)
        fy = evaluate(inst, y)
        state.evaluations_used += 1
        if recorder is not None:
            recorder(state.evaluations_used, fy)
        sel.offer(y, fy)
        if fy > best_off_fitness:
            best_off_fitness = fy
            best_off_group = group
            best_off_count = 1
        elif fy == best_off_fitness:
            best_off_count += 1
            if g.random() < 1.0 / best_off_count:
                best_off_group = group
        if fy == inst.optimum_value:
            state.done = True
            stopped = True
            break
    if not stopped and best_off_count > 0:
        state.r_current = next_two_rate_r(
            r, n, best_off_group, parent_beats_all=best_off_fitness < old_fitness, rng=g
        )
        assert 2.0 <= state.r_current <= n / 4.0
    return _finish_generation(state, sel)


def next_lambda(rule: str, lam: int, successes: int, strictly_better: bool, lambda_max: int) -> int:
    """Success-based lambda update shared by the three adaptive variants.

    div_s doubles on a generation with no offspring at least as good as
    the parent and divides by the count of such offspring otherwise;
    reset and halve double when no strictly better offspring appeared
    and otherwise reset to one / halve (never below one). The result is
    clamped to [1, lambda_max].
    """
    if rule == RULE_DIV_S:
        lam_new = 2 * lam if successes == 0 else lam // successes
    elif rule == RULE_RESET:
        lam_new = 1 if strictly_better else 2 * lam
    elif rule == RULE_HALVE:
        lam_new = max(1, lam // 2) if strictly_better else 2 * lam
    else:
        raise ConfigurationError(f"unknown lambda rule {rule!r}")
    return min(max(lam_new, 1), lambda_max)


def step_adaptive_lambda(
    state: GenerationState,
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
    budget: Optional[int] = None,
) -> GenerationState:
    """One generation with success-based offspring population control.

    div_s counts offspring whose fitness reaches the parent's (before
    selection); reset and halve look for one strictly better. The rate
    policy is re-resolved every generation, so pstar tracks lambda.
    """
    g = as_generator(rng)
    n = inst.n
    lam = state.lam_current
    p = spec.rate.resolve(n, lam)
    cap = _UNLIMITED if budget is None else budget
    old_fitness = state.parent_fitness
    sel = _Selection(g, state.parent, state.parent_fitness)
    successes = 0
    strictly_better = False
    stopped = False
    for _ in range(lam):
        if state.evaluations_used >= cap:
            stopped = True
            break
        l = sample_conditional_binomial(n, p, g)
        assert l >= 1
        y = mutate(state.parent, l, g)
        fy = evaluate(inst, y)
        state.evaluations_used += 1
        if recorder is not None:
            recorder(state.evaluations_used, fy)
        sel.offer(y, fy)
        if fy >= old_fitness:
            successes += 1
        if fy > old_fitness:
            strictly_better = True
        if fy == inst.optimum_value:
            state.done = True
            stopped = True
            break
    if not stopped:
        state.lam_current = next_lambda(
            spec.lambda_rule, lam, successes, strictly_better, spec.lambda_max
        )
        assert state.lam_current >= 1
    return _finish_generation(state, sel)


def step_rls(
    state: GenerationState,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
    budget: Optional[int] = None,
) -> GenerationState:
    """One RLS generation: flip exactly one uniformly chosen bit."""
    g = as_generator(rng)
    cap = _UNLIMITED if budget is None else budget
    if state.evaluations_used >= cap:
        return state
    sel = _Selection(g, state.parent, state.parent_fitness)
    y = mutate(state.parent, 1, g)
    fy = evaluate(inst, y)
    state.evaluations_used += 1
    if recorder is not None:
        recorder(state.evaluations_used, fy)
    sel.offer(y, fy)
    if fy == inst.optimum_value:
        state.done = True
    return _finish_generation(state, sel)


def step(
    state: GenerationState,
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    rng: Union[RngStream, np.random.Generator],
    recorder: Optional[Recorder] = None,
    budget: Optional[int] = None,
) -> GenerationState:
    """Dispatch one generation of whichever variant spec names."""
    if spec.kind == KIND_EA:
        return step_static(state, spec, inst, rng, recorder, budget)
    if spec.kind == KIND_TWO_RATE:
        return step_two_rate(state, spec, inst, rng, recorder, budget)
    if spec.kind == KIND_ADAPT_LAMBDA:
        return step_adaptive_lambda(state, spec, inst, rng, recorder, budget)
    return step_rls(state, inst, rng, recorder, budget)


def run(
    spec: AlgorithmSpec,
    inst: ProblemInstance,
    budget: Optional[int] = None,
    rng: Union[RngStream, int, None] = None,
    run_index: int = 0,
    engine: str = ENGINE_KERNEL,
):
    """Execute one run and return its RunRecord (see `profiler`).

    The run stops at the exact evaluation where the optimum is first
    queried, even mid-generation, or when the budget is exhausted
    (flagged unsuccessful, never an exception). `rng` is an RngStream
    or a bare 64-bit seed; the record stores the seed, so any run can
    be replayed from its results row.
    """
    from .profiler import RunRecord, record_evaluation

    if engine not in ENGINES:
        raise ConfigurationError(f"unknown engine {engine!r}, expected one of {ENGINES}")
    if budget is not None and budget < 1:
        raise ConfigurationError(f"budget must be at least 1, got {budget}")
    if rng is None:
        rng = RngStream(0)
    elif isinstance(rng, (int, np.integer)):
        rng = RngStream(int(rng))
    if not isinstance(rng, RngStream):
        raise TypeError("run() needs an RngStream or a seed so the record stays replayable")
    spec.validate_for(inst)

    record = RunRecord.fresh(
        algorithm=spec.descriptor(),
        problem=inst.descriptor(),
        run_index=run_index,
        seed=rng.seed,
        n=inst.n,
    )
    if engine == ENGINE_PYTHON:
        recorder = lambda count, fitness: record_evaluation(record, count, fitness)
        state = init_state(spec, inst, rng, recorder)
        cap = _UNLIMITED if budget is None else budget
        while not state.done and state.evaluations_used < cap:
            step(state, spec, inst, rng, recorder, cap)
        success = state.done
        total = state.evaluations_used
    else:
        from . import _kernels

        total, success = _kernels.run_kernel(spec, inst, budget, rng, record.first_hit)
        # first_hit is defined contiguously on 0..final_fitness
        record.final_fitness = int(np.flatnonzero(record.first_hit >= 0)[-1])
    record.success = bool(success)
    record.total_evaluations = int(total)
    return record
