"""ProfilePacking: serve items into placeholders of lazily opened profile groups.

A profile is a multiset holding ``ceil(f'_x * m)`` items of each size x. Its
packing (FirstFitDecreasing by default, optionally exact) fixes a set of bin
types; every time a size runs out of placeholders a new copy of those bins,
a profile group, is opened virtually. Virtual bins are only counted once they
receive an item.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .classic import EXACT_CAP, FirstFit, RealFirstFit, exact_opt_or_ffd, first_fit_decreasing
from .core import BinType, FrequencyVector, Packing, Provenance, check_item, is_integral

DEFAULT_M = 5000
CEIL_GUARD = 1e-12


@dataclass(frozen=True)
class ProfileSet:
    counts: tuple[int, ...]  # counts[x - 1] items of size x
    m: int

    @property
    def k(self) -> int:
        return len(self.counts)

    def __len__(self):
        return sum(self.counts)

    def items(self) -> list[int]:
        """Profile items in non-increasing size order."""
        out = []
        for x in range(self.k, 0, -1):
            out.extend([x] * self.counts[x - 1])
        return out


@dataclass
class ProfilePlan:
    bin_types: dict  # BinType -> multiplicity
    p: int
    k: int
    sizes: frozenset = field(init=False)

    def __post_init__(self):
        self.sizes = frozenset(x for t in self.bin_types for x in t.placeholders)

    def has_slot(self, x: int) -> bool:
        return x in self.sizes

    def slot_counts(self) -> Counter:
        c = Counter()
        for t, mult in self.bin_types.items():
            for x, n in t.slots().items():
                c[x] += n * mult
        return c


def _ceil_product(f: float, m: int) -> int:
    if f <= 0:
        return 0
    prod = f * m
    return max(1, math.ceil(prod - CEIL_GUARD * max(1.0, prod)))


def build_profile(f_pred: FrequencyVector, m: int, k: int) -> ProfileSet:
    if m < 1:
        raise ValueError("profile size m must be at least 1")
    if f_pred.k != k:
        raise ValueError(f"prediction has {f_pred.k} entries, expected {k}")
    return ProfileSet(tuple(_ceil_product(float(f), m) for f in f_pred.values), m)


def profile_from_counts(counts, w: int, m: int) -> ProfileSet:
    """Profile for ``f'_x = counts[x-1] / w`` computed in exact integer arithmetic."""
    return ProfileSet(tuple(-(-int(c) * m // w) for c in counts), m)


def plan_profile(profile: ProfileSet, k: int, packer: str = "ffd", cap: int = EXACT_CAP) -> ProfilePlan:
    items = profile.items()
    if packer == "ffd":
        packing = first_fit_decreasing(items, k)
    elif packer == "exact":
        packing = exact_opt_or_ffd(items, k, cap)
    else:
        raise ValueError(f"unknown profile packer {packer!r}")
    types = Counter(BinType.from_items(b.items, k) for b in packing.bins if b.items)
    # deterministic iteration order
    ordered = dict(sorted(types.items(), key=lambda kv: kv[0].sort_key()))
    return ProfilePlan(ordered, sum(ordered.values()), k)


class PPState:
    """Empty and NonEmpty bookkeeping for placeholder bins.

    Empty bins are stored as counts per bin type; for every size x a heap
    orders the types holding an x-placeholder (more placeholders first, then
    lexicographic). Non-empty bins with a free x-placeholder are bucketed by
    how many free x-placeholders they still have, so the tightest bin is
    used first, lowest index among equals.
    """

    def __init__(self, k: int, packing: Packing, provenance=Provenance.PP):
        self.k = k
        self.packing = packing
        self.provenance = provenance
        self.empty_count: dict[BinType, int] = {}
        self.empty_heaps = [[] for _ in range(k + 1)]
        self.nonempty = [[[] for _ in range(k // x + 1)] if x else [] for x in range(k + 1)]
        self.nonempty_size = [0] * (k + 1)
        self.groups_opened = 0

    def open_group(self, plan: ProfilePlan) -> None:
        counts = self.empty_count
        heaps = self.empty_heaps
        for t, mult in plan.bin_types.items():
            c = counts.get(t, 0)
            if c == 0:
                key = t.sort_key()
                for y in set(t.placeholders):
                    heapq.heappush(heaps[y], (key, t))
            counts[t] = c + mult
        self.groups_opened += 1

    def virtual_bins(self) -> int:
        return sum(self.empty_count.values())

    def take_nonempty(self, x: int):
        if not self.nonempty_size[x]:
            return None
        buckets = self.nonempty[x]
        for c in range(1, len(buckets)):
            if buckets[c]:
                idx = heapq.heappop(buckets[c])
                break
        b = self.packing.bins[idx]
        b.items.append(x)
        b.load += x
        c -= 1
        b.free[x] = c
        if c:
            heapq.heappush(buckets[c], idx)
        else:
            self.nonempty_size[x] -= 1
        return b

    def take_empty(self, x: int):
        heap = self.empty_heaps[x]
        counts = self.empty_count
        while heap:
            t = heap[0][1]
            if counts[t] > 0:
                break
            heapq.heappop(heap)
        else:
            return None
        counts[t] -= 1
        b = self.packing.new_bin(self.provenance, t)
        b.items.append(x)
        b.load += x
        b.free[x] -= 1
        for y, c in b.free.items():
            if c:
                heapq.heappush(self.nonempty[y][c], b.index)
                self.nonempty_size[y] += 1
        return b


class ProfilePacker:
    """Online ProfilePacking for a fixed prediction."""

    def __init__(self, f_pred: FrequencyVector, m: int = DEFAULT_M, k: int = 100,
                 packer: str = "ffd", packing: Packing | None = None):
        self.k = k
        self.packing = packing if packing is not None else Packing(k)
        self.profile = build_profile(f_pred, m, k)
        self.plan = plan_profile(self.profile, k, packer)
        self.has_slot = [False] + [self.plan.has_slot(x) for x in range(1, k + 1)]
        self.state = PPState(k, self.packing)
        self.special = FirstFit(k, self.packing, Provenance.SPECIAL)

    def place(self, x: int):
        if not self.has_slot[x]:
            return self.special.place(x)
        return self.place_pp(x)

    def place_pp(self, x: int):
        st = self.state
        b = st.take_nonempty(x)
        if b is None:
            b = st.take_empty(x)
            if b is None:
                st.open_group(self.plan)
                b = st.take_empty(x)
        return b

    @property
    def groups_opened(self) -> int:
        return self.state.groups_opened


def profile_packing(stream: Iterable[int], f_pred: FrequencyVector, m: int = DEFAULT_M,
                    k: int = 100, packer: str = "ffd") -> Packing:
    pp = ProfilePacker(f_pred, m, k, packer)
    for x in stream:
        pp.place(check_item(x, k))
    pp.packing.meta.update(groups_opened=pp.groups_opened, p=pp.plan.p)
    return pp.packing


def profile_packing_fractional(stream, f_pred: FrequencyVector, m: int = DEFAULT_M,
                               k: int = 100, packer: str = "ffd") -> Packing:
    """ProfilePacking on integral items, FirstFit in a separate space on the rest."""
    pp = ProfilePacker(f_pred, m, k, packer)
    frac = RealFirstFit(k, pp.packing, Provenance.FRACTIONAL)
    for v in stream:
        fv = float(v)
        if not 0 < fv <= k:
            raise ValueError(f"item size {fv} outside (0, {k}]")
        if is_integral(fv):
            pp.place(int(fv))
        else:
            frac.place(fv)
    packing = pp.packing
    packing.meta.update(
        groups_opened=pp.groups_opened,
        p=pp.plan.p,
        integral_cost=packing.cost() - frac.cost(),
        fractional_cost=frac.cost(),
    )
    return packing

