"""Adaptive(w): ProfilePacking driven by frequencies seen in a sliding window."""

from __future__ import annotations

from typing import Iterable

from .classic import FirstFit
from .core import Packing, Provenance, check_item
from .profile import DEFAULT_M, PPState, plan_profile, profile_from_counts


class SlidingWindow:
    """Counts of each size among the last ``w`` items."""

    def __init__(self, w: int, k: int):
        if w < 1:
            raise ValueError("window length must be at least 1")
        self.w = w
        self.k = k
        self.ring = [0] * w
        self.counts = [0] * (k + 1)
        self.seen = 0

    def push(self, x: int) -> None:
        slot = self.seen % self.w
        if self.seen >= self.w:
            self.counts[self.ring[slot]] -= 1
        self.ring[slot] = x
        self.counts[x] += 1
        self.seen += 1

    def __len__(self):
        return min(self.seen, self.w)

    def contents(self) -> list[int]:
        """Window items, oldest first."""
        if self.seen < self.w:
            return self.ring[:self.seen]
        s = self.seen % self.w
        return self.ring[s:] + self.ring[:s]


class AdaptivePacker:
    """Online Adaptive(w).

    The first ``w`` items go to FirstFit. Afterwards items fill placeholders
    of any group opened so far; when none is free, a profile is rebuilt from
    the window (``replan="on-demand"``) and a group of its plan is opened.
    With ``replan="epoch"`` the plan is refreshed only after every w-th item
    and reused for later groups of the same epoch.
    """

    def __init__(self, w: int, m: int = DEFAULT_M, k: int = 100, packer: str = "ffd",
                 replan: str = "on-demand"):
        if m < 1:
            raise ValueError("profile size m must be at least 1")
        if replan not in ("on-demand", "epoch"):
            raise ValueError(f"unknown replan mode {replan!r}")
        self.w, self.m, self.k = w, m, k
        self.packer = packer
        self.replan = replan
        self.window = SlidingWindow(w, k)
        self.packing = Packing(k)
        self.warmup = FirstFit(k, self.packing, Provenance.PLAIN)
        self.state = PPState(k, self.packing)
        self.plans_built = 0
        self._plans = {}
        self._epoch_counts = None

    def _plan_for(self, counts):
        plan = self._plans.get(counts)
        if plan is None:
            if len(self._plans) >= 4:
                self._plans.clear()
            plan = plan_profile(profile_from_counts(counts, self.w, self.m), self.k, self.packer)
            self._plans[counts] = plan
            self.plans_built += 1
        return plan

    def _current_plan(self, x: int):
        if self.replan == "epoch":
            plan = self._plan_for(self._epoch_counts)
            if plan.has_slot(x):
                return plan
        plan = self._plan_for(tuple(self.window.counts[1:]))
        # the triggering item is in the window, so its size always has a slot
        assert plan.has_slot(x), "window plan lacks the triggering size"
        return plan

    def place(self, x: int):
        win = self.window
        win.push(x)
        if self.replan == "epoch" and win.seen % self.w == 0:
            self._epoch_counts = tuple(win.counts[1:])
        if win.seen <= self.w:
            return self.warmup.place(x)
        st = self.state
        b = st.take_nonempty(x)
        if b is None:
            b = st.take_empty(x)
            if b is None:
                st.open_group(self._current_plan(x))
                b = st.take_empty(x)
        return b


def adaptive(stream: Iterable[int], w: int, m: int = DEFAULT_M, k: int = 100, packer: str = "ffd",
             replan: str = "on-demand") -> Packing:
    a = AdaptivePacker(w, m, k, packer, replan)
    for x in stream:
        a.place(check_item(x, k))
    a.packing.meta.update(groups_opened=a.state.groups_opened, plans_built=a.plans_built,
                          warmup_cost=a.warmup.cost())
    return a.packing
