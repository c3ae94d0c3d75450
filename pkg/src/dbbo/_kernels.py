"""Compiled whole-run engines for every algorithm variant.

One numba kernel per family replays an entire run: it samples the
initial point, loops generations, fills the caller's first-hit array in
place, and stops at the exact evaluation where the optimum is queried
(or the budget runs out). Kernels consume the run's numpy Generator
directly, so replaying a seed reproduces a run bit for bit.

The sampling laws mirror `variation` exactly but are reimplemented here
in kernel form: an inversion walk on the (conditional) binomial pmf
while n*p is small enough for its first term to be representable, and a
Bernoulli sum (with zero-rejection where required) otherwise. Mutation
never copies the parent per offspring: candidates are built by flipping
a partial-Fisher-Yates subset in a scratch buffer and undoing it after
evaluation, with only the eventual winner's flip set replayed onto the
parent. Selection is a reservoir draw over the argmax of parent and
offspring, which is distributionally the same uniform tie-breaking as
the reference engine without materializing the offspring.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .algorithms import (
    KIND_ADAPT_LAMBDA,
    KIND_EA,
    KIND_RLS,
    KIND_TWO_RATE,
    RATE_FIXED,
    RATE_OVER_N,
    RULE_DIV_S,
    RULE_HALVE,
    RULE_RESET,
    AlgorithmSpec,
)
from .core import RngStream
from .problems import ProblemInstance

__all__ = ["run_kernel"]

_UNLIMITED = 2**62

# above this n*p the inversion walk's leading pmf term risks underflow
# (e^-25 ~ 1.4e-11) and the Bernoulli-sum path is used instead
_INVERSION_LIMIT = 25.0

_RULE_CODE = {RULE_DIV_S: 0, RULE_RESET: 1, RULE_HALVE: 2}
_RATE_CODE = {RATE_FIXED: 0, RATE_OVER_N: 1}  # pstar -> 2


@njit(inline="always")
def _eval_point(family, y, zvec, sigma, n):
    if family == 0:
        c = 0
        for i in range(n):
            if y[i] == zvec[i]:
                c += 1
        return c
    j = 0
    while j < n and y[sigma[j]] == zvec[j]:
        j += 1
    return j


@njit(inline="always")
def _binom(g, n, p):
    if n * p <= _INVERSION_LIMIT:
        # inversion from k=0; pmf(0) = (1-p)^n stays representable here
        pmf = math.exp(n * math.log1p(-p))
        u = g.random()
        acc = pmf
        k = 0
        while u > acc and k < n:
            pmf *= (n - k) / (k + 1.0) * (p / (1.0 - p))
            k += 1
            acc += pmf
        return k
    c = 0
    for _ in range(n):
        if g.random() < p:
            c += 1
    return c


@njit(inline="always")
def _binom_pos(g, n, p):
    if n * p <= _INVERSION_LIMIT:
        # inversion from k=1 on the conditional pmf, expm1-stable for tiny p
        denom = -math.expm1(n * math.log1p(-p))
        pmf = n * p * math.exp((n - 1.0) * math.log1p(-p)) / denom
        u = g.random()
        acc = pmf
        k = 1
        while u > acc and k < n:
            pmf *= (n - k) / (k + 1.0) * (p / (1.0 - p))
            k += 1
            acc += pmf
        return k
    while True:
        # rejection is effectively free: P(zero) <= e^-25
        c = 0
        for _ in range(n):
            if g.random() < p:
                c += 1
        if c > 0:
            return c


@njit(inline="always")
def _flip_subset(g, y, idx, flips, l, n):
    # partial Fisher-Yates on the persistent index array; any start
    # permutation yields a uniform l-subset, so idx is never reset
    for j in range(l):
        k = j + g.integers(0, n - j)
        tmp = idx[j]
        idx[j] = idx[k]
        idx[k] = tmp
        pos = idx[j]
        flips[j] = pos
        y[pos] ^= np.uint8(1)


@njit(inline="always")
def _undo_flips(y, flips, l):
    for j in range(l):
        y[flips[j]] ^= np.uint8(1)


@njit(inline="always")
def _record_init(g, family, zvec, sigma, n, fh, x):
    for i in range(n):
        x[i] = np.uint8(g.integers(0, 2))
    fx = _eval_point(family, x, zvec, sigma, n)
    for v in range(fx + 1):
        fh[v] = 1
    return fx


@njit(cache=True)
def _run_static(g, family, zvec, sigma, n, lam, p, resampling, budget, fh):
    x = np.empty(n, np.uint8)
    fx = _record_init(g, family, zvec, sigma, n, fh, x)
    t = 1
    if fx == n:
        return t, True
    y = x.copy()
    idx = np.arange(n)
    flips = np.empty(n, np.int64)
    best_flips = np.empty(n, np.int64)
    best_seen = fx
    while t < budget:
        best_f = fx
        nbest = 1
        chose = False
        best_l = 0
        for _ in range(lam):
            if t >= budget:
                break
            if resampling:
                l = _binom_pos(g, n, p)
            else:
                l = _binom(g, n, p)
            _flip_subset(g, y, idx, flips, l, n)
            fy = _eval_point(family, y, zvec, sigma, n)
            t += 1
            if fy > best_seen:
                for v in range(best_seen + 1, fy + 1):
                    fh[v] = t
                best_seen = fy
            if fy > best_f:
                best_f = fy
                nbest = 1
                chose = True
                best_l = l
                for j in range(l):
                    best_flips[j] = flips[j]
            elif fy == best_f:
                nbest += 1
                if g.random() * nbest < 1.0:
                    chose = True
                    best_l = l
                    for j in range(l):
                        best_flips[j] = flips[j]
            _undo_flips(y, flips, l)
            if fy == n:
                return t, True
        if chose:
            for j in range(best_l):
                x[best_flips[j]] ^= np.uint8(1)
                y[best_flips[j]] ^= np.uint8(1)
            fx = best_f
    return t, False


@njit(cache=True)
def _run_rls(g, family, zvec, sigma, n, budget, fh):
    x = np.empty(n, np.uint8)
    fx = _record_init(g, family, zvec, sigma, n, fh, x)
    t = 1
    if fx == n:
        return t, True
    while t < budget:
        pos = g.integers(0, n)
        x[pos] ^= np.uint8(1)
        fy = _eval_point(family, x, zvec, sigma, n)
        t += 1
        if fy > fx:
            for v in range(fx + 1, fy + 1):
                fh[v] = t
        if fy == n:
            return t, True
        if fy > fx or (fy == fx and g.random() < 0.5):
            fx = fy  # keep the offspring
        else:
            x[pos] ^= np.uint8(1)  # revert to the parent
    return t, False


@njit(cache=True)
def _run_two_rate(g, family, zvec, sigma, n, lam, r0, budget, fh):
    x = np.empty(n, np.uint8)
    fx = _record_init(g, family, zvec, sigma, n, fh, x)
    t = 1
    if fx == n:
        return t, True
    y = x.copy()
    idx = np.arange(n)
    flips = np.empty(n, np.int64)
    best_flips = np.empty(n, np.int64)
    best_seen = fx
    r = r0
    low_count = (lam + 1) // 2
    while t < budget:
        p_low = r / (2.0 * n)
        p_high = 2.0 * r / n
        old_fx = fx
        best_f = fx
        nbest = 1
        chose = False
        best_l = 0
        off_best_f = -1
        off_best_group = 0
        off_best_n = 0
        stopped = False
        for i in range(lam):
            if t >= budget:
                stopped = True
                break
            group = 0 if i < low_count else 1
            l = _binom_pos(g, n, p_low if group == 0 else p_high)
            _flip_subset(g, y, idx, flips, l, n)
            fy = _eval_point(family, y, zvec, sigma, n)
            t += 1
            if fy > best_seen:
                for v in range(best_seen + 1, fy + 1):
                    fh[v] = t
                best_seen = fy
            if fy > best_f:
                best_f = fy
                nbest = 1
                chose = True
                best_l = l
                for j in range(l):
                    best_flips[j] = flips[j]
            elif fy == best_f:
                nbest += 1
                if g.random() * nbest < 1.0:
                    chose = True
                    best_l = l
                    for j in range(l):
                        best_flips[j] = flips[j]
            if fy > off_best_f:
                off_best_f = fy
                off_best_group = group
                off_best_n = 1
            elif fy == off_best_f:
                off_best_n += 1
                if g.random() * off_best_n < 1.0:
                    off_best_group = group
            _undo_flips(y, flips, l)
            if fy == n:
                return t, True
        if chose:
            for j in range(best_l):
                x[best_flips[j]] ^= np.uint8(1)
                y[best_flips[j]] ^= np.uint8(1)
            fx = best_f
        if not stopped and off_best_n > 0:
            parent_beats_all = off_best_f < old_fx
            adopt = (not parent_beats_all) and (g.random() < 0.5)
            if adopt:
                r_new = r / 2.0 if off_best_group == 0 else 2.0 * r
            else:
                r_new = r / 2.0 if g.random() < 0.5 else 2.0 * r
            r = min(max(r_new, 2.0), n / 4.0)
            assert 2.0 <= r <= n / 4.0
    return t, False


@njit(cache=True)
def _run_adapt(g, family, zvec, sigma, n, lam0, rule, rate_mode, rate_value, lambda_max, budget, fh):
    x = np.empty(n, np.uint8)
    fx = _record_init(g, family, zvec, sigma, n, fh, x)
    t = 1
    if fx == n:
        return t, True
    y = x.copy()
    idx = np.arange(n)
    flips = np.empty(n, np.int64)
    best_flips = np.empty(n, np.int64)
    best_seen = fx
    lam = lam0
    while t < budget:
        if rate_mode == 0:
            p = rate_value
        elif rate_mode == 1:
            p = rate_value / n
        else:
            p = math.log(lam) / (2.0 * n) if lam > 1 else 0.0
        p = min(max(p, 1e-12), 0.5)
        old_fx = fx
        best_f = fx
        nbest = 1
        chose = False
        best_l = 0
        successes = 0
        strictly_better = False
        stopped = False
        for _ in range(lam):
            if t >= budget:
                stopped = True
                break
            l = _binom_pos(g, n, p)
            _flip_subset(g, y, idx, flips, l, n)
            fy = _eval_point(family, y, zvec, sigma, n)
            t += 1
            if fy > best_seen:
                for v in range(best_seen + 1, fy + 1):
                    fh[v] = t
                best_seen = fy
            if fy > best_f:
                best_f = fy
                nbest = 1
                chose = True
                best_l = l
                for j in range(l):
                    best_flips[j] = flips[j]
            elif fy == best_f:
                nbest += 1
                if g.random() * nbest < 1.0:
                    chose = True
                    best_l = l
                    for j in range(l):
                        best_flips[j] = flips[j]
            if fy >= old_fx:
                successes += 1
            if fy > old_fx:
                strictly_better = True
            _undo_flips(y, flips, l)
            if fy == n:
                return t, True
        if chose:
            for j in range(best_l):
                x[best_flips[j]] ^= np.uint8(1)
                y[best_flips[j]] ^= np.uint8(1)
            fx = best_f
        if not stopped:
            if rule == 0:
                lam_new = 2 * lam if successes == 0 else lam // successes
            elif rule == 1:
                lam_new = 1 if strictly_better else 2 * lam
            else:
                lam_new = max(1, lam // 2) if strictly_better else 2 * lam
            lam = min(max(lam_new, 1), lambda_max)
            assert lam >= 1
    return t, False


# distribution probes for tests: draw many strengths with kernel samplers
@njit(cache=True)
def _sample_binom_many(g, n, p, count, positive):
    out = np.empty(count, np.int64)
    for i in range(count):
        out[i] = _binom_pos(g, n, p) if positive else _binom(g, n, p)
    return out


def sample_strengths(n: int, p: float, count: int, rng: RngStream, positive: bool = True):
    """Draw `count` mutation strengths with the kernel-side sampler."""
    return _sample_binom_many(rng.generator, n, p, count, positive)


def run_kernel(spec: AlgorithmSpec, inst: ProblemInstance, budget, rng: RngStream, fh: np.ndarray):
    """Dispatch one whole run to the matching kernel; fills fh in place."""
    g = rng.generator
    cap = _UNLIMITED if budget is None else int(budget)
    family = inst.family_code
    zvec = inst._z_in_order
    sigma = inst.sigma
    n = inst.n
    if spec.kind == KIND_RLS:
        total, success = _run_rls(g, family, zvec, sigma, n, cap, fh)
    elif spec.kind == KIND_EA:
        p = spec.rate.resolve(n, spec.lam)
        total, success = _run_static(
            g, family, zvec, sigma, n, spec.lam, p, spec.resampling, cap, fh
        )
    elif spec.kind == KIND_TWO_RATE:
        total, success = _run_two_rate(g, family, zvec, sigma, n, spec.lam, spec.r_init, cap, fh)
    elif spec.kind == KIND_ADAPT_LAMBDA:
        rate_code = _RATE_CODE.get(spec.rate.mode, 2)
        total, success = _run_adapt(
            g,
            family,
            zvec,
            sigma,
            n,
            spec.lam,
            _RULE_CODE[spec.lambda_rule],
            rate_code,
            spec.rate.value,
            spec.lambda_max,
            cap,
            fh,
        )
    else:
        raise ValueError(f"no kernel for algorithm kind {spec.kind!r}")
    return int(total), bool(success)
