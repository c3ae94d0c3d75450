"""Mutation-strength samplers and the uniform l-subset flip operator.

Standard bit mutation with rate p factorizes into two stages: draw a
strength l ~ Bin(n, p), then flip a uniformly chosen set of l distinct
positions. The resampling variants instead draw l from Bin(n, p)
conditioned on l > 0, so an offspring always differs from its parent.

These are the reference operators used by the pure-Python engine and by
all distribution tests; the compiled whole-run kernels implement the
same laws independently.
"""

from __future__ import annotations

import math
from typing import Optional, Union

import numpy as np

from .core import BitString, RngStream, as_generator

__all__ = [
    "mutate",
    "sample_binomial",
    "sample_conditional_binomial",
]

Rng = Union[RngStream, np.random.Generator]

# Below this expected count the zero-rejection loop is replaced by an
# exact inversion walk: the rejection rate 1 - (1-p)^n ~ n*p would make
# resampling arbitrarily slow as p -> 0.
_REJECTION_FLOOR = 1e-6


def _check_np(n: int, p: float) -> None:
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must lie strictly in (0, 1), got {p}")


def sample_binomial(n: int, p: float, rng: Rng, size: Optional[int] = None):
    """Draw l ~ Bin(n, p); a scalar int, or an int64 array when size is given."""
    _check_np(n, p)
    g = as_generator(rng)
    if size is None:
        return int(g.binomial(n, p))
    return g.binomial(n, p, size=size).astype(np.int64)


def sample_conditional_binomial(n: int, p: float, rng: Rng, size: Optional[int] = None):
    """Draw l ~ Bin(n, p) conditioned on l > 0 (resample-on-zero semantics).

    The distribution assigns C(n,l) p^l (1-p)^(n-l) / (1 - (1-p)^n) to
    each l in [1..n]. Rejection is the reference implementation; for
    vanishingly small n*p it switches to an exact inversion walk on the
    conditional pmf, which is the same law without the unbounded loop.
    """
    _check_np(n, p)
    g = as_generator(rng)
    if n * p < _REJECTION_FLOOR:
        if size is None:
            return _conditional_inversion(n, p, g)
        return np.array([_conditional_inversion(n, p, g) for _ in range(size)], dtype=np.int64)
    if size is None:
        while True:
            draw = int(g.binomial(n, p))
            if draw > 0:
                return draw
    draws = g.binomial(n, p, size=size).astype(np.int64)
    zeros = np.flatnonzero(draws == 0)
    while zeros.size:
        draws[zeros] = g.binomial(n, p, size=zeros.size)
        zeros = zeros[draws[zeros] == 0]
    return draws


def _conditional_inversion(n: int, p: float, g: np.random.Generator) -> int:
    # inversion on the conditional pmf starting at l=1; the l=1 mass is
    # computed through log1p/expm1 so the (1-p)^n terms never underflow
    denom = -math.expm1(n * math.log1p(-p))
    pmf = n * p * math.exp((n - 1) * math.log1p(-p)) / denom
    u = g.random()
    acc = pmf
    l = 1
    while u > acc and l < n:
        pmf *= (n - l) / (l + 1) * p / (1.0 - p)
        l += 1
        acc += pmf
    return l


def mutate(x: BitString, strength: int, rng: Rng) -> BitString:
    """Flip a uniform random set of `strength` distinct positions of x.

    Returns a new point with hamming_distance(x, result) == strength
    exactly; x itself is never modified. strength = 0 is allowed (the
    identity, needed by the non-resampling variants) and strength = n
    yields the complement.
    """
    n = len(x)
    strength = int(strength)
    if not 0 <= strength <= n:
        raise ValueError(f"mutation strength must lie in [0, {n}], got {strength}")
    if strength == 0:
        return x
    g = as_generator(rng)
    if strength == n:
        positions = slice(None)
    elif n <= 64:
        positions = g.permutation(n)[:strength]
    else:
        positions = g.choice(n, size=strength, replace=False)
    out = x.bits.copy()
    out[positions] ^= 1
    return BitString._wrap(out)
