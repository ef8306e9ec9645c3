"""Hybrid(lambda) and H-Aware: ProfilePacking combined with a robust online algorithm."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .classic import BestFit, FirstFit
from .core import FrequencyVector, Packing, Provenance, check_item
from .profile import DEFAULT_M, ProfilePacker

ROBUST = {"firstfit": FirstFit, "bestfit": BestFit}


def as_fraction(value) -> Fraction:
    """Exact rational from a Fraction, ``(num, den)`` pair, string or number.

    Floats go through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, tuple):
        num, den = value
        return Fraction(int(num), int(den))
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


class HybridPacker:
    """Online Hybrid(lambda).

    PP-items and A-items live in disjoint bin spaces. Hybrid(0) never uses
    the profile machinery and is exactly the robust algorithm.
    """

    def __init__(self, f_pred: FrequencyVector, lam=Fraction(1, 2), m: int = DEFAULT_M,
                 k: int = 100, robust: str = "firstfit", packer: str = "ffd"):
        lam = as_fraction(lam)
        if not 0 <= lam <= 1:
            raise ValueError(f"lambda must lie in [0, 1], got {lam}")
        self.lam = lam
        self.k = k
        self.pp = ProfilePacker(f_pred, m, k, packer)
        self.packing = self.pp.packing
        try:
            self.robust = ROBUST[robust](k, self.packing, Provenance.A)
        except KeyError:
            raise ValueError(f"unknown robust algorithm {robust!r}") from None
        self.count = [0] * (k + 1)
        self.ppcount = [0] * (k + 1)
        self.a_count = [0] * (k + 1)

    def place(self, x: int):
        self.count[x] += 1
        pp = self.pp
        b = pp.state.take_nonempty(x)
        if b is not None:
            self.ppcount[x] += 1
            return b
        lam = self.lam
        if lam.numerator and lam.denominator * self.ppcount[x] <= lam.numerator * self.count[x]:
            self.ppcount[x] += 1
            if not pp.has_slot[x]:
                return pp.special.place(x)
            st = pp.state
            b = st.take_empty(x)
            if b is None:
                st.open_group(pp.plan)
                b = st.take_empty(x)
            return b
        self.a_count[x] += 1
        return self.robust.place(x)


def hybrid(stream: Iterable[int], f_pred: FrequencyVector, lam=Fraction(1, 2), m: int = DEFAULT_M,
           k: int = 100, robust: str = "firstfit", packer: str = "ffd") -> Packing:
    h = HybridPacker(f_pred, lam, m, k, robust, packer)
    for x in stream:
        h.place(check_item(x, k))
    h.packing.meta.update(lam=h.lam, groups_opened=h.pp.groups_opened)
    return h.packing


def h_aware_threshold(eps, c_a, k: int) -> Fraction:
    """Error bound below which H-Aware trusts the prediction: (c_A - 1 - eps) / (k (2 + 5 eps))."""
    eps = as_fraction(eps)
    c_a = as_fraction(c_a)
    return (c_a - 1 - eps) / (k * (2 + 5 * eps))


def h_aware(stream: Iterable[int], f_pred: FrequencyVector, H, eps=0.1, c_a=1.7, m: int = DEFAULT_M,
            k: int = 100, robust: str = "firstfit", packer: str = "ffd") -> Packing:
    eps_q = as_fraction(eps)
    if not 0 < eps_q < Fraction(1, 5):
        raise ValueError(f"epsilon out of admissible range (0, 0.2): {eps}")
    H = as_fraction(H)
    if H < 0:
        raise ValueError("error bound H must be nonnegative")
    if as_fraction(c_a) <= 1:
        raise ValueError("robust competitive ratio c_A must exceed 1")
    threshold = h_aware_threshold(eps_q, c_a, k)
    if H < threshold:
        algo = ProfilePacker(f_pred, m, k, packer)
        branch = "profilepacking"
    else:
        algo = ROBUST[robust](k)
        branch = robust
    for x in stream:
        algo.place(check_item(x, k))
    algo.packing.meta.update(branch=branch, threshold=threshold)
    return algo.packing
