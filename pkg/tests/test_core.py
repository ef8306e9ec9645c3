import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from binpack_ml.core import (
    BinType,
    FractionalItem,
    FrequencyVector,
    Packing,
    Provenance,
    check_item,
    consolidation_ratio,
    deviation_hat,
    frequencies,
    l1_error,
    split_fractional,
)
from binpack_ml.workload import WeibullSpec, sample_weibull, scale_to_capacity


class TestFrequencies:
    def test_counts_over_length(self):
        f = frequencies([5, 5, 10], 10)
        assert f[5] == pytest.approx(2 / 3) and f[10] == pytest.approx(1 / 3)
        assert [x for x in range(1, 11) if f[x]] == [5, 10]

    def test_single_size(self):
        f = frequencies([1] * 7, 2)
        assert (f[1], f[2]) == (1.0, 0.0)

    def test_weibull_sample_sums_to_one(self):
        vals = sample_weibull(WeibullSpec(3.0, 1000.0, seed=4), 1000)
        seq = scale_to_capacity(vals, 1000.0, 100)
        f = frequencies(seq, 100)
        assert math.fsum(f.values) == pytest.approx(1.0, abs=1e-9)
        assert math.fsum(float(v) for v in oracles.frequencies(seq.tolist(), 100)) == pytest.approx(1.0, abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(ValueError, match="undefined frequencies"):
            frequencies([], 10)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            frequencies([11], 10)

    @given(st.lists(st.integers(1, 12), min_size=1, max_size=60))
    def test_matches_rational_oracle(self, seq):
        f = frequencies(seq, 12)
        exact = oracles.frequencies(seq, 12)
        assert np.allclose(f.values, [float(q) for q in exact], atol=1e-12)


class TestL1Error:
    def test_identity(self):
        f = frequencies([1, 2, 3], 5)
        assert l1_error(f, f) == 0

    def test_full_displacement(self):
        k = 10
        a = FrequencyVector.from_dict({1: 1.0}, k)
        b = FrequencyVector.from_dict({k - 1: 1.0}, k)
        assert l1_error(a, b) == 2

    def test_hand_sum(self):
        a = FrequencyVector.from_dict({1: 0.5, 2: 0.5}, 5)
        b = FrequencyVector.from_dict({1: 0.25, 2: 0.25, 3: 0.5}, 5)
        assert l1_error(a, b) == pytest.approx(1.0)

    def test_mismatched_k(self):
        with pytest.raises(ValueError):
            l1_error(FrequencyVector(np.zeros(3)), FrequencyVector(np.zeros(4)))

    vec = st.lists(st.floats(0, 1), min_size=6, max_size=6).map(FrequencyVector)

    @given(vec, vec, vec)
    def test_metric_laws(self, a, b, c):
        assert l1_error(a, b) == pytest.approx(l1_error(b, a))
        assert l1_error(a, a) == 0
        if l1_error(a, b) == 0:
            assert np.array_equal(a.values, b.values)
        assert l1_error(a, c) <= l1_error(a, b) + l1_error(b, c) + 1e-12

    @given(st.lists(st.integers(1, 8), min_size=1, max_size=30), st.lists(st.integers(1, 8), min_size=1, max_size=30))
    def test_bounded_by_two(self, s1, s2):
        assert 0 <= l1_error(frequencies(s1, 8), frequencies(s2, 8)) <= 2 + 1e-12


class TestFrequencyVector:
    def test_rejects_entries_above_one(self):
        with pytest.raises(ValueError):
            FrequencyVector([0.5, 1.5])

    def test_prediction_need_not_sum_to_one(self):
        assert FrequencyVector([0.9, 0.9]).total() == pytest.approx(1.8)

    def test_support_is_one_based(self):
        assert FrequencyVector.from_dict({3: 0.2, 7: 0.8}, 10).support() == [3, 7]


class TestFractional:
    def test_deviation_all_integral(self):
        assert deviation_hat([1, 2.0, 3]) == 0

    def test_deviation_single_fractional(self):
        assert deviation_hat([2.5]) == 1.0

    def test_deviation_hand_value(self):
        assert deviation_hat([1, 2, 1.5]) == pytest.approx(1 / 3)

    def test_deviation_empty(self):
        with pytest.raises(ValueError):
            deviation_hat([])

    def test_split_examples(self):
        assert split_fractional([1.0, 2.5, 3.0]) == ([1, 3], [2.5])
        assert split_fractional([4, 5]) == ([4, 5], [])
        assert split_fractional([0.5, 1.5]) == ([], [0.5, 1.5])

    def test_fractional_item_flag(self):
        assert FractionalItem(3.0).is_integral and not FractionalItem(3.25).is_integral
        with pytest.raises(ValueError):
            FractionalItem(0)

    @given(st.lists(st.one_of(st.integers(1, 20), st.floats(0.01, 20).filter(lambda v: not v.is_integer())),
                    max_size=40))
    def test_split_then_merge_is_identity(self, seq):
        integral, fractional = split_fractional(seq)
        it, fr = iter(integral), iter(fractional)
        merged = [next(it) if float(v).is_integer() else next(fr) for v in seq]
        assert merged == [int(v) if float(v).is_integer() else v for v in seq]
        assert len(integral) + len(fractional) == len(seq)

    @given(st.lists(st.floats(0.01, 50), min_size=1, max_size=30))
    def test_deviation_in_unit_interval(self, seq):
        d = deviation_hat(seq)
        assert 0 <= d <= 1 + 1e-12
        frac = math.fsum(v for v in seq if not v.is_integer())
        assert d == pytest.approx(frac / math.fsum(seq))


class TestConsolidation:
    @pytest.mark.parametrize("seq,expected", [([15, 40, 90], 6), ([1, 50], 100), (list(range(15, 21)), 6)])
    def test_ratio(self, seq, expected):
        assert consolidation_ratio(seq, 100) == expected

    def test_empty(self):
        with pytest.raises(ValueError):
            consolidation_ratio([], 100)


class TestModel:
    def test_bin_type_normalizes_order(self):
        a = BinType.from_items([3, 6], 10)
        assert a == BinType.from_items([6, 3], 10) and a.placeholders == (6, 3) and a.empty == 1
        assert a.capacity == 10

    def test_bin_type_overfull(self):
        with pytest.raises(ValueError):
            BinType.from_items([6, 6], 10)

    def test_sort_key_prefers_more_placeholders(self):
        types = [BinType.from_items(t, 10) for t in ([9], [5, 5], [3, 3, 3], [5, 4])]
        assert sorted(types, key=BinType.sort_key)[0].placeholders == (3, 3, 3)

    def test_cost_counts_only_nonempty(self):
        p = Packing(10)
        b = p.new_bin(Provenance.PP, BinType.from_items([5, 5], 10))
        p.new_bin(Provenance.PP, BinType.from_items([5, 5], 10))
        assert p.cost() == 0
        b.add(5)
        assert p.cost() == 1
        assert p.cost_by_provenance() == {Provenance.PP: 1}

    def test_validate_catches_overfull_and_loss(self):
        p = Packing(10)
        b = p.new_bin(Provenance.PLAIN)
        b.add(6)
        b.add(6)
        with pytest.raises(AssertionError):
            p.validate()
        p2 = Packing(10)
        p2.new_bin(Provenance.PLAIN).add(3)
        with pytest.raises(AssertionError):
            p2.validate(served=[3, 4])

    @pytest.mark.parametrize("bad", [0, 11, 2.0, True])
    def test_check_item(self, bad):
        with pytest.raises((ValueError, TypeError)):
            check_item(bad, 10)

    def test_check_item_accepts_numpy(self):
        assert check_item(np.int64(4), 10) == 4


def test_frequencies_are_exact_ratios():
    seq = [3] * 7 + [4] * 3
    f = frequencies(seq, 5)
    assert Fraction(f[3]).limit_denominator(100) == Fraction(7, 10)
    assert Counter(seq)[4] / len(seq) == f[4]
