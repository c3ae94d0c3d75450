"""Generalized OneMax and LeadingOnes instances.

OneMax_z scores a point by the number of positions agreeing with a
hidden target string z. LeadingOnes_{z,sigma} scores it by the longest
prefix, in the order given by a hidden permutation sigma, on which the
point agrees with z. Both families share the optimum value n, attained
exactly by z (among others for LeadingOnes).

Instance id 0 is the canonical function of each family: z all ones and
sigma the identity, i.e. plain "count the ones" / "count the leading
ones". Positive ids draw z (and sigma, for LeadingOnes) uniformly at
random, deterministically in (master_seed, family, n, instance_id), so
instances are reproducible from their text descriptor alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BitString, DimensionMismatchError

__all__ = [
    "FAMILIES",
    "LEADINGONES",
    "ONEMAX",
    "ProblemInstance",
    "evaluate",
    "generate_instance",
    "parse_instance",
]

ONEMAX = "onemax"
LEADINGONES = "leadingones"
FAMILIES = (ONEMAX, LEADINGONES)

# spawn-key tags keeping OneMax/LeadingOnes draws disjoint for equal seeds
_FAMILY_CODE = {ONEMAX: 0, LEADINGONES: 1}


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A concrete OM_z or LO_{z,sigma} function with known optimum.

    Immutable after generation; safe to share across concurrent runs.
    `sigma` holds the evaluation order as 0-based positions (identity
    for OneMax, where order is irrelevant).
    """

    family: str
    n: int
    instance_id: int
    master_seed: int
    z: BitString
    sigma: np.ndarray
    optimum_value: int

    def __post_init__(self):
        sigma = np.ascontiguousarray(self.sigma, dtype=np.int64)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        # z in evaluation order, the only array the inner loops touch
        zvec = np.ascontiguousarray(self.z.bits[sigma])
        zvec.setflags(write=False)
        object.__setattr__(self, "_z_in_order", zvec)

    def descriptor(self) -> str:
        return f"{self.family},{self.n},{self.instance_id},{self.master_seed}"

    @property
    def family_code(self) -> int:
        return _FAMILY_CODE[self.family]

    def evaluate_bits(self, bits: np.ndarray) -> int:
        """Fitness of a raw uint8 vector (length checked by callers)."""
        zvec = self._z_in_order
        if self.family == ONEMAX:
            return int(np.count_nonzero(bits == self.z.bits))
        disagree = bits[self.sigma] != zvec
        return int(np.argmax(disagree)) if disagree.any() else self.n

    def __repr__(self) -> str:
        return f"ProblemInstance({self.descriptor()})"


def generate_instance(family: str, n: int, instance_id: int, master_seed: int) -> ProblemInstance:
    """Materialize the instance named by (family, n, instance_id, master_seed)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}, expected one of {FAMILIES}")
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")
    if instance_id < 0:
        raise ValueError(f"instance_id must be non-negative, got {instance_id}")
    if instance_id == 0:
        z = BitString(np.ones(n, dtype=np.uint8))
        sigma = np.arange(n, dtype=np.int64)
    else:
        ss = np.random.SeedSequence(
            int(master_seed), spawn_key=(_FAMILY_CODE[family], int(n), int(instance_id))
        )
        g = np.random.default_rng(ss)
        z = BitString(g.integers(0, 2, size=n, dtype=np.uint8))
        if family == LEADINGONES:
            sigma = g.permutation(n).astype(np.int64)
        else:
            sigma = np.arange(n, dtype=np.int64)
    return ProblemInstance(
        family=family,
        n=n,
        instance_id=instance_id,
        master_seed=int(master_seed),
        z=z,
        sigma=sigma,
        optimum_value=n,
    )


def parse_instance(descriptor: str) -> ProblemInstance:
    """Rebuild an instance from its "family,n,instance_id,master_seed" text."""
    parts = descriptor.strip().split(",")
    if len(parts) != 4:
        raise ValueError(f"malformed instance descriptor: {descriptor!r}")
    family = parts[0].strip()
    try:
        n, instance_id, master_seed = (int(p) for p in parts[1:])
    except ValueError as exc:
        raise ValueError(f"malformed instance descriptor: {descriptor!r}") from exc
    return generate_instance(family, n, instance_id, master_seed)


def evaluate(inst: ProblemInstance, x: BitString) -> int:
    """Fitness of x under the instance; an integer in [0..n]."""
    if len(x) != inst.n:
        raise DimensionMismatchError(f"point has length {len(x)}, instance needs {inst.n}")
    return inst.evaluate_bits(x.bits)
