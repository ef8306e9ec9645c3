"""Shared data model: items, bin types, bins, packings and frequency vectors."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

FREQ_TOL = 1e-9


class Provenance(enum.Enum):
    """Which bin space a bin belongs to."""

    PP = "pp"  # profile-packing bin
    A = "a"  # robust-algorithm bin (Hybrid)
    SPECIAL = "special"  # FirstFit space for unpredicted sizes
    PLAIN = "plain"  # prediction-free algorithms, Adaptive warm-up
    FRACTIONAL = "fractional"  # real-valued FirstFit space


def check_item(x: int, k: int) -> int:
    if not isinstance(x, (int, np.integer)) or isinstance(x, bool):
        raise TypeError(f"item size must be an integer, got {x!r}")
    if not 1 <= x <= k:
        raise ValueError(f"item size {x} outside [1, {k}]")
    return int(x)


@dataclass(frozen=True)
class FractionalItem:
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"item size must be positive, got {self.value}")

    @property
    def is_integral(self) -> bool:
        return float(self.value).is_integer()

    def __float__(self):
        return float(self.value)


def is_integral(v) -> bool:
    return float(v).is_integer()


@dataclass(frozen=True, order=True)
class BinType:
    """A partition of the capacity into placeholders plus empty space.

    Placeholders are stored in non-increasing order so that equal types
    compare and hash equal.
    """

    placeholders: tuple[int, ...]
    empty: int

    @classmethod
    def from_items(cls, items: Iterable[int], k: int) -> "BinType":
        ph = tuple(sorted((int(s) for s in items), reverse=True))
        used = sum(ph)
        if used > k:
            raise ValueError(f"placeholders {ph} exceed capacity {k}")
        return cls(ph, k - used)

    @property
    def capacity(self) -> int:
        return sum(self.placeholders) + self.empty

    def slots(self) -> Counter:
        return Counter(self.placeholders)

    def sort_key(self) -> tuple:
        # more placeholders first, then lexicographic
        return (-len(self.placeholders), self.placeholders)


class Bin:
    """One bin of a packing.

    ``free`` is only used for bins with placeholder structure: it maps a
    size to the number of still unoccupied placeholders of that size.
    """

    __slots__ = ("index", "items", "load", "provenance", "bin_type", "free")

    def __init__(self, index, provenance, bin_type=None):
        self.index = index
        self.items = []
        self.load = 0
        self.provenance = provenance
        self.bin_type = bin_type
        self.free = dict(bin_type.slots()) if bin_type is not None else None

    def add(self, x):
        self.items.append(x)
        self.load += x

    def __repr__(self):
        return f"Bin({self.index}, {self.provenance.value}, items={self.items})"


class Packing:
    """The output of a packing algorithm.

    Bins from every bin space of an algorithm are kept in one ordered list;
    a bin is only materialised here once it receives its first item, so
    virtually opened bins never count towards :meth:`cost`.
    """

    def __init__(self, capacity):
        self.capacity = capacity
        self.bins: list[Bin] = []
        self.meta: dict = {}

    def new_bin(self, provenance, bin_type=None) -> Bin:
        b = Bin(len(self.bins), provenance, bin_type)
        self.bins.append(b)
        return b

    def cost(self) -> int:
        return sum(1 for b in self.bins if b.items)

    def __len__(self):
        return self.cost()

    def cost_by_provenance(self) -> dict[Provenance, int]:
        out = Counter(b.provenance for b in self.bins if b.items)
        return dict(out)

    def items(self) -> list:
        return [x for b in self.bins for x in b.items]

    def validate(self, served: Sequence | None = None, tol: float = 1e-9) -> None:
        """Raise AssertionError if a capacity, placeholder or conservation rule is broken."""
        for b in self.bins:
            assert b.load <= self.capacity + tol, f"bin {b.index} overfull: {b.load}"
            assert abs(b.load - sum(b.items)) <= tol
            if b.bin_type is not None:
                slots = b.bin_type.slots()
                used = Counter(b.items)
                for x, c in used.items():
                    assert c <= slots.get(x, 0), f"bin {b.index}: {c} items of size {x}"
        if served is not None:
            assert Counter(self.items()) == Counter(served), "items not conserved"


@dataclass
class FrequencyVector:
    """Per-size frequencies for sizes 1..k; ``values[x - 1]`` is the entry for x."""

    values: np.ndarray
    k: int = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("frequency vector must be one-dimensional")
        if np.any(self.values < 0) or np.any(self.values > 1 + FREQ_TOL):
            raise ValueError("frequency entries must lie in [0, 1]")
        self.k = len(self.values)

    @classmethod
    def from_dict(cls, d: dict[int, float], k: int) -> "FrequencyVector":
        v = np.zeros(k)
        for x, f in d.items():
            v[x - 1] = f
        return cls(v)

    def __getitem__(self, x: int) -> float:
        if not 1 <= x <= self.k:
            raise IndexError(x)
        return float(self.values[x - 1])

    def total(self) -> float:
        return float(self.values.sum())

    def support(self) -> list[int]:
        return [int(i) + 1 for i in np.flatnonzero(self.values)]


def frequencies(sequence: Sequence[int], k: int) -> FrequencyVector:
    """Empirical frequency of every size in ``sequence``."""
    seq = np.asarray(sequence)
    if seq.size == 0:
        raise ValueError("undefined frequencies: empty sequence")
    if seq.min() < 1 or seq.max() > k:
        raise ValueError(f"item sizes must lie in [1, {k}]")
    counts = np.bincount(seq.astype(np.int64), minlength=k + 1)[1:]
    return FrequencyVector(counts / seq.size)


def l1_error(f: FrequencyVector, f_pred: FrequencyVector) -> float:
    if f.k != f_pred.k:
        raise ValueError(f"mismatched capacities: {f.k} vs {f_pred.k}")
    return float(np.abs(f.values - f_pred.values).sum())


def deviation_hat(sequence) -> float:
    """Share of the total size carried by non-integral items."""
    vals = [float(v) for v in sequence]
    if not vals:
        raise ValueError("deviation undefined for an empty sequence")
    if min(vals) <= 0:
        raise ValueError("item sizes must be positive")
    total = math.fsum(vals)
    frac = math.fsum(v for v in vals if not v.is_integer())
    return frac / total


def split_fractional(sequence) -> tuple[list[int], list]:
    """Order-preserving split into integral items (as ints) and the rest."""
    integral, fractional = [], []
    for v in sequence:
        if is_integral(v):
            integral.append(int(float(v)))
        else:
            fractional.append(v)
    return integral, fractional


def consolidation_ratio(sequence: Sequence[int], k: int) -> int:
    """Largest number of items of the workload that can share a bin, ``k // min size``."""
    if len(sequence) == 0:
        raise ValueError("consolidation ratio undefined for an empty sequence")
    return int(k // min(sequence))
