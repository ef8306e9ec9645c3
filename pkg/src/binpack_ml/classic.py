"""Prediction-free baselines and bounds.

FirstFit keeps, for every size x, a pointer to the first bin whose residual
capacity is at least x. Residuals never grow, so pointers only move forward;
they are advanced lazily when a size is queried, which keeps the total
pointer movement below ``k * (number of bins)``.
"""

from __future__ import annotations

import heapq
import logging
from typing import Iterable

import numpy as np

from .core import BinType, Packing, Provenance, check_item

log = logging.getLogger(__name__)

EXACT_CAP = 24


class FirstFit:
    """Online FirstFit over integer sizes in its own bin space."""

    def __init__(self, k, packing=None, provenance=Provenance.PLAIN):
        self.k = k
        self.packing = packing if packing is not None else Packing(k)
        self.provenance = provenance
        self.bins = []
        self.residual = []
        self.pointer = [0] * (k + 1)
        self.advances = 0

    def first_bin(self, x: int) -> int:
        """Index (within this space) of the first bin that fits ``x``."""
        ptr = self.pointer
        residual = self.residual
        p = ptr[x]
        nb = len(residual)
        start = p
        while p < nb and residual[p] < x:
            p += 1
        if p != start:
            self.advances += p - start
            ptr[x] = p
        return p

    def place(self, x: int):
        j = self.first_bin(x)
        if j == len(self.residual):
            self.bins.append(self.packing.new_bin(self.provenance))
            self.residual.append(self.k)
        b = self.bins[j]
        b.items.append(x)
        b.load += x
        self.residual[j] -= x
        return b

    def cost(self) -> int:
        return len(self.bins)


class BestFit:
    """Online BestFit; ties between equally full bins go to the lowest index."""

    def __init__(self, k, packing=None, provenance=Provenance.PLAIN):
        self.k = k
        self.packing = packing if packing is not None else Packing(k)
        self.provenance = provenance
        self.bins = []
        self.residual = []
        # by_residual[r]: heap of local indices of bins with residual r
        self.by_residual = [[] for _ in range(k + 1)]

    def place(self, x: int):
        by_res = self.by_residual
        for r in range(x, self.k):
            if by_res[r]:
                j = heapq.heappop(by_res[r])
                break
        else:
            j = len(self.bins)
            self.bins.append(self.packing.new_bin(self.provenance))
            self.residual.append(self.k)
        b = self.bins[j]
        b.items.append(x)
        b.load += x
        r = self.residual[j] - x
        self.residual[j] = r
        if r > 0:
            heapq.heappush(by_res[r], j)
        return b

    def cost(self) -> int:
        return len(self.bins)


class RealFirstFit:
    """FirstFit over real-valued sizes, using a max segment tree on residuals."""

    def __init__(self, k, packing=None, provenance=Provenance.FRACTIONAL, tol=1e-9):
        self.k = float(k)
        self.packing = packing if packing is not None else Packing(k)
        self.provenance = provenance
        self.tol = tol
        self.bins = []
        self.size = 1
        self.tree = [self.k] * 2  # leaves hold residuals; unused leaves are fresh bins

    def _grow(self):
        old_leaves = self.tree[self.size:]
        self.size *= 2
        self.tree = [self.k] * (2 * self.size)
        self.tree[self.size:self.size + len(old_leaves)] = old_leaves
        for i in range(self.size - 1, 0, -1):
            self.tree[i] = max(self.tree[2 * i], self.tree[2 * i + 1])

    def place(self, v: float):
        v = float(v)
        if not 0 < v <= self.k + self.tol:
            raise ValueError(f"item size {v} outside (0, {self.k}]")
        if len(self.bins) == self.size:
            self._grow()
        tree = self.tree
        need = v - self.tol
        i = 1
        while i < self.size:
            i = 2 * i if tree[2 * i] >= need else 2 * i + 1
        j = i - self.size
        if j == len(self.bins):
            self.bins.append(self.packing.new_bin(self.provenance))
        b = self.bins[j]
        b.items.append(v)
        b.load += v
        tree[i] -= v
        i //= 2
        while i:
            tree[i] = max(tree[2 * i], tree[2 * i + 1])
            i //= 2
        return b

    def cost(self) -> int:
        return len(self.bins)


def _run_online(algo, stream, k):
    for x in stream:
        algo.place(check_item(x, k))
    return algo.packing


def first_fit(stream: Iterable[int], k: int) -> Packing:
    return _run_online(FirstFit(k), stream, k)


def best_fit(stream: Iterable[int], k: int) -> Packing:
    return _run_online(BestFit(k), stream, k)


def first_fit_real(stream, k) -> Packing:
    ff = RealFirstFit(k)
    for v in stream:
        ff.place(v)
    return ff.packing


def first_fit_decreasing(items: Iterable[int], k: int) -> Packing:
    """FirstFit on the items sorted by non-increasing size (stable)."""
    items = [check_item(x, k) for x in items]
    return _run_online(FirstFit(k), sorted(items, reverse=True), k)


def l2_bound(items: Iterable[int], k: int) -> int:
    """Martello-Toth L2 lower bound on the optimal number of bins."""
    items = [check_item(x, k) for x in items]
    if not items:
        return 0
    counts = np.bincount(items, minlength=k + 1).astype(np.int64)
    sums = counts * np.arange(k + 1)
    # cumulative counts/sizes over sizes <= s
    ccount = np.cumsum(counts)
    csum = np.cumsum(sums)

    def rng(lo, hi):
        # items with lo <= s <= hi
        if hi < lo:
            return 0, 0
        lo = max(lo, 0)
        hi = min(hi, k)
        c = ccount[hi] - (ccount[lo - 1] if lo > 0 else 0)
        s = csum[hi] - (csum[lo - 1] if lo > 0 else 0)
        return int(c), int(s)

    half = k // 2  # s > k/2  <=>  s >= half + 1
    best = 0
    for alpha in range(0, k // 2 + 1):
        n1, _ = rng(k - alpha + 1, k)
        n2, s2 = rng(half + 1, k - alpha)
        _, s3 = rng(max(alpha, 1), half)
        extra = s3 - (n2 * k - s2)
        bound = n1 + n2 + max(0, -(-extra // k))
        best = max(best, bound)
    return best


def exact_opt(items: Iterable[int], k: int, cap: int = EXACT_CAP) -> Packing:
    """Minimum-cardinality packing by depth-first branch and bound.

    Seeded with the FirstFitDecreasing solution and stopped as soon as the
    incumbent meets the L2 bound.
    """
    items = [check_item(x, k) for x in items]
    if len(items) > cap:
        raise ValueError(f"instance too large for exact solver ({len(items)} > {cap} items)")
    order = sorted(items, reverse=True)
    ffd = first_fit_decreasing(order, k)
    lower = l2_bound(order, k)
    best = [[list(b.items) for b in ffd.bins]]
    if len(best[0]) <= lower:
        return ffd

    n = len(order)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + order[i]
    bins: list[list[int]] = []
    loads: list[int] = []
    dead = set()

    def search(i):
        if len(best[0]) <= lower:
            return
        if i == n:
            if len(bins) < len(best[0]):
                best[0] = [list(b) for b in bins]
            return
        free = len(bins) * k - sum(loads)
        need = len(bins) + max(0, -(-(suffix[i] - free) // k))
        if need >= len(best[0]):
            return
        state = (i, tuple(sorted(loads)))
        if state in dead:
            return
        x = order[i]
        tried = set()
        for j in range(len(bins)):
            if loads[j] + x <= k and loads[j] not in tried:
                tried.add(loads[j])
                bins[j].append(x)
                loads[j] += x
                search(i + 1)
                loads[j] -= x
                bins[j].pop()
        if len(bins) + 1 < len(best[0]):
            bins.append([x])
            loads.append(x)
            search(i + 1)
            loads.pop()
            bins.pop()
        # any later visit faces an incumbent at least as good
        dead.add(state)

    search(0)
    packing = Packing(k)
    for content in best[0]:
        b = packing.new_bin(Provenance.PLAIN)
        for x in content:
            b.add(x)
    return packing


def bin_types(packing: Packing) -> list[BinType]:
    return [BinType.from_items(b.items, packing.capacity) for b in packing.bins if b.items]


def exact_opt_or_ffd(items, k, cap=EXACT_CAP) -> Packing:
    items = list(items)
    if len(items) > cap:
        log.warning("profile of %d items exceeds exact cap %d; using FirstFitDecreasing", len(items), cap)
        return first_fit_decreasing(items, k)
    return exact_opt(items, k, cap)

