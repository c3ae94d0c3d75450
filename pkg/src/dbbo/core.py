"""Bit-string search points and seeded random streams.

Every run owns exactly one random stream. Streams are PCG64 generators
tagged with the 64-bit seed that created them, so that a results table
storing only the seed column is enough to replay any individual run.
Per-run seeds are derived from an experiment master seed through
`derive_seed`, which keeps runs independent and makes cell scheduling
order irrelevant to the output.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Union

import numpy as np

__all__ = [
    "BitString",
    "DimensionMismatchError",
    "RngStream",
    "as_generator",
    "derive_seed",
    "hamming_distance",
    "random_bitstring",
]

_UINT64_MAX = 2**64 - 1


class DimensionMismatchError(ValueError):
    """Two bit strings (or a string and a problem) disagree on length."""


class BitString:
    """Immutable fixed-length vector over {0, 1}.

    Accepts an iterable of 0/1 integers, a numpy array, or a text string
    of '0'/'1' characters. The underlying storage is one uint8 per bit;
    `bits` exposes it as a read-only numpy view for vectorized work.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[str, Iterable[int], np.ndarray]):
        if isinstance(bits, str):
            if not bits or any(c not in "01" for c in bits):
                raise ValueError(f"not a nonempty 0/1 string: {bits!r}")
            arr = (np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")).astype(np.uint8)
        else:
            raw = np.asarray(bits)
            if raw.ndim != 1:
                raise ValueError("bit strings are one-dimensional")
            if raw.size == 0:
                raise ValueError("dimension must be at least 1")
            if not np.isin(raw, (0, 1)).all():
                raise ValueError("every element must be exactly 0 or 1")
            arr = raw.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitString":
        # trusted constructor for hot paths: arr must be a fresh 1-d uint8
        # array of 0/1 values that no caller retains a writable view of
        obj = object.__new__(cls)
        arr.setflags(write=False)
        obj._bits = arr
        return obj

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return self._bits.size

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, i: int) -> int:
        return int(self._bits[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._bits.size == other._bits.size and bool(
            np.array_equal(self._bits, other._bits)
        )

    def __hash__(self) -> int:
        return hash((self._bits.size, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitString('{self.to01()}')"

    def __reduce__(self):
        return (BitString, (self.to01(),))

    def to01(self) -> str:
        return "".join("01"[b] for b in self._bits)

    def complement(self) -> "BitString":
        return BitString._wrap((1 - self._bits).astype(np.uint8))


class RngStream:
    """A PCG64 stream together with the 64-bit seed that created it.

    Single-owner by convention: one stream per run, never shared across
    threads or processes. Equal seeds produce identical draw sequences.
    """

    __slots__ = ("seed", "generator")

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed <= _UINT64_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.generator = np.random.default_rng(seed)

    @classmethod
    def for_run(cls, master_seed: int, cell_key: str, run_index: int) -> "RngStream":
        return cls(derive_seed(master_seed, cell_key, run_index))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


def derive_seed(master_seed: int, cell_key: str, run_index: int) -> int:
    """Derive the 64-bit seed of run `run_index` in the cell named `cell_key`.

    The cell key (any string; experiments use "algorithm|instance"
    descriptors) is hashed to a 64-bit integer and fed, together with
    the run index, into a SeedSequence spawn key. Distinct cells or run
    indices therefore get statistically independent streams, and the
    mapping is stable across platforms and process layouts.
    """
    if run_index < 0:
        raise ValueError("run_index must be non-negative")
    digest = hashlib.blake2b(cell_key.encode("utf-8"), digest_size=8).digest()
    key64 = int.from_bytes(digest, "little")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(key64, int(run_index)))
    return int(ss.generate_state(1, np.uint64)[0])


def as_generator(rng: Union[RngStream, np.random.Generator]) -> np.random.Generator:
    """Unwrap an RngStream (or pass a bare numpy Generator through)."""
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def hamming_distance(x: BitString, y: BitString) -> int:
    """Number of positions in which x and y differ."""
    if len(x) != len(y):
        raise DimensionMismatchError(f"lengths differ: {len(x)} vs {len(y)}")
    return int(np.count_nonzero(x.bits != y.bits))


def random_bitstring(n: int, rng: Union[RngStream, np.random.Generator]) -> BitString:
    """Uniform random point of {0,1}^n (each bit fair and independent)."""
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")
    g = as_generator(rng)
    return BitString._wrap(g.integers(0, 2, size=n, dtype=np.uint8))
