import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favardlab.errors import MalformedIntervalError
from favardlab.intervals import (
    FloatIntervalSet,
    Interval,
    IntervalSet,
    MERGE_EPSILON,
    merge_float_arrays,
    merge_int64_arrays,
    normalize,
    rational_str,
    to_fraction,
)

from oracles import union_components, union_measure


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


@st.composite
def interval_lists(draw, max_size=12):
    n = draw(st.integers(min_value=0, max_value=max_size))
    out = []
    for _ in range(n):
        a = draw(rationals)
        b = draw(rationals)
        lo, hi = (a, b) if a <= b else (b, a)
        out.append((lo, hi))
    return out


class TestScalars:
    def test_to_fraction_forms(self):
        assert to_fraction("3/4") == Fraction(3, 4)
        assert to_fraction("-7") == -7
        assert to_fraction("0.25") == Fraction(1, 4)
        assert to_fraction(5) == 5
        assert to_fraction(Fraction(2, 3)) == Fraction(2, 3)
        # floats convert exactly, not by decimal approximation
        assert to_fraction(0.1) == Fraction(0.1)

    def test_to_fraction_rejects(self):
        for bad in (math.inf, math.nan, "abc", "1/0"):
            with pytest.raises((ValueError, ZeroDivisionError)):
                to_fraction(bad)

    def test_rational_str_round_trip(self):
        for f in (Fraction(3, 4), Fraction(-5), Fraction(0), Fraction(22, 7)):
            assert to_fraction(rational_str(f)) == f
        assert rational_str(Fraction(6, 1)) == "6"
        assert rational_str(Fraction(1, 2)) == "1/2"


class TestInterval:
    def test_orders_endpoints_strictly(self):
        with pytest.raises(MalformedIntervalError):
            Interval(Fraction(1), Fraction(0))

    def test_rejects_non_finite(self):
        with pytest.raises((MalformedIntervalError, ValueError)):
            Interval(0.0, math.inf)

    def test_length(self):
        assert Interval(Fraction(1, 4), Fraction(3, 4)).length == Fraction(1, 2)


class TestExactSet:
    def test_touching_intervals_merge(self):
        s = IntervalSet.from_intervals([(0, 1), (1, 2)])
        assert s.count == 1
        assert s.measure == 2

    def test_overlap_and_containment(self):
        s = IntervalSet.from_intervals([(0, 2), (1, 3), (Fraction(1, 2), 1)])
        assert s.count == 1
        assert s.measure == 3

    def test_degenerates_dropped(self):
        s = IntervalSet.from_intervals([(1, 1), (2, 2), (0, Fraction(1, 2))])
        assert s.count == 1
        assert s.measure == Fraction(1, 2)

    def test_from_points_keeps_degenerates(self):
        s = IntervalSet.from_points([0, Fraction(1, 2), Fraction(1, 2), 3])
        assert s.count == 3
        assert s.measure == 0

    def test_empty(self):
        s = IntervalSet.from_intervals([])
        assert s.count == 0
        assert s.measure == 0
        assert s.bounds is None

    def test_equality_is_canonical(self):
        a = IntervalSet.from_intervals([(0, Fraction(1, 2))])
        b = IntervalSet.from_scaled(4, [0], [2], canonical=True)
        c = IntervalSet.from_scaled(8, [0], [4], canonical=True)
        assert a == b == c
        assert len({a, b, c}) == 1

    def test_expand_point_set(self):
        s = IntervalSet.from_points([0]).expand(Fraction(1, 4))
        assert s.intervals == (Interval(Fraction(-1, 4), Fraction(1, 4)),)

    def test_expand_merges_near_neighbors(self):
        s = IntervalSet.from_intervals([(0, 1), (Fraction(3, 2), 2)])
        grown = s.expand(Fraction(1, 4))
        assert grown.count == 1
        assert grown.bounds == (Fraction(-1, 4), Fraction(9, 4))

    def test_expand_requires_positive(self):
        s = IntervalSet.from_intervals([(0, 1)])
        with pytest.raises(ValueError):
            s.expand(0)

    def test_affine(self):
        s = IntervalSet.from_intervals([(0, 1), (2, 3)])
        t = s.affine(Fraction(1, 2), Fraction(5))
        assert t.intervals == (
            Interval(Fraction(5), Fraction(11, 2)),
            Interval(Fraction(6), Fraction(13, 2)),
        )
        with pytest.raises(ValueError):
            s.affine(0)
        with pytest.raises(ValueError):
            s.affine(-1)

    def test_issuperset(self):
        big = IntervalSet.from_intervals([(0, 4)])
        small = IntervalSet.from_intervals([(1, 2), (3, 4)])
        assert big.issuperset(small)
        assert not small.issuperset(big)
        assert small.issuperset(IntervalSet.from_intervals([]))

    def test_min_length(self):
        s = IntervalSet.from_intervals([(0, 1), (2, Fraction(9, 4))])
        assert s.min_length() == Fraction(1, 4)

    @given(interval_lists())
    @settings(max_examples=300, deadline=None)
    def test_measure_count_match_oracle(self, items):
        s = IntervalSet.from_intervals(items)
        assert s.measure == union_measure(items)
        assert s.count == len(union_components(items))

    @given(interval_lists())
    @settings(max_examples=200, deadline=None)
    def test_idempotent_and_order_free(self, items):
        s = IntervalSet.from_intervals(items)
        again = IntervalSet.from_intervals([(iv.lo, iv.hi) for iv in s.intervals])
        assert again == s
        shuffled = list(items)
        random.Random(0).shuffle(shuffled)
        assert IntervalSet.from_intervals(shuffled) == s

    @given(interval_lists(), st.fractions(min_value="1/64", max_value=4,
                                          max_denominator=64))
    @settings(max_examples=200, deadline=None)
    def test_expand_bounds(self, items, r):
        s = IntervalSet.from_intervals(items)
        if s.count == 0:
            return
        grown = s.expand(r)
        assert grown.issuperset(s)
        assert grown.measure >= s.measure + 2 * r
        assert grown.measure <= s.measure + 2 * r * s.count
        assert grown.count <= s.count
        lo, hi = s.bounds
        assert grown.bounds == (lo - r, hi + r)

    @given(interval_lists(),
           st.fractions(min_value="1/8", max_value=8, max_denominator=16),
           rationals)
    @settings(max_examples=200, deadline=None)
    def test_affine_equivariance(self, items, scale, offset):
        s = IntervalSet.from_intervals(items)
        t = s.affine(scale, offset)
        assert t.measure == scale * s.measure
        assert t.count == s.count
        mapped = [(scale * a + offset, scale * b + offset) for a, b in items]
        assert t == IntervalSet.from_intervals(mapped)


class TestMergeKernels:
    @given(st.lists(st.tuples(st.integers(-10**6, 10**6),
                              st.integers(0, 10**5)), max_size=40))
    def test_int64_matches_python(self, raws):
        pairs = [(a, a + w) for a, w in raws]
        lo = np.array([a for a, _ in pairs], dtype=np.int64)
        hi = np.array([b for _, b in pairs], dtype=np.int64)
        klo, khi = merge_int64_arrays(lo, hi)
        comp = union_components(pairs)
        comp = [(a, b) for a, b in comp]
        got = [(int(a), int(b)) for a, b in zip(klo, khi) if b > a]
        want = [(int(a), int(b)) for a, b in comp]
        assert got == want

    def test_float_merge_uses_epsilon(self):
        lo = np.array([0.0, 1.0 + 1e-13])
        hi = np.array([1.0, 2.0])
        mlo, mhi = merge_float_arrays(lo, hi, 1e-12)
        assert len(mlo) == 1
        mlo, mhi = merge_float_arrays(lo, hi, 1e-14)
        assert len(mlo) == 2

    def test_empty_kernels(self):
        mlo, mhi = merge_int64_arrays(np.array([], dtype=np.int64),
                                      np.array([], dtype=np.int64))
        assert len(mlo) == 0
        flo, fhi = merge_float_arrays(np.array([]), np.array([]))
        assert len(flo) == 0


class TestFloatSet:
    def test_basic(self):
        s = FloatIntervalSet.from_intervals([(0.0, 0.5), (0.5, 1.0), (2.0, 2.5)])
        assert s.count == 2
        assert s.measure == pytest.approx(1.5)
        assert s.min_length() == pytest.approx(0.5)

    def test_immutable_arrays(self):
        s = FloatIntervalSet.from_intervals([(0.0, 1.0)])
        lo, _ = s.arrays()
        with pytest.raises((ValueError, RuntimeError)):
            lo[0] = 5.0

    def test_expand_and_affine(self):
        s = FloatIntervalSet.from_intervals([(0.0, 1.0), (3.0, 4.0)])
        grown = s.expand(0.25)
        assert grown.count == 2
        assert grown.measure == pytest.approx(3.0)
        scaled = s.affine(2.0, 1.0)
        assert scaled.bounds == (1.0, 9.0)

    def test_issuperset_with_slack(self):
        big = FloatIntervalSet.from_intervals([(0.0, 1.0)])
        small = FloatIntervalSet.from_intervals([(-1e-15, 0.5)])
        assert big.issuperset(small, slack=1e-12)
        assert not big.issuperset(FloatIntervalSet.from_intervals([(2.0, 3.0)]),
                                  slack=1e-12)

    @given(interval_lists())
    @settings(max_examples=200, deadline=None)
    def test_agrees_with_exact(self, items):
        exact = IntervalSet.from_intervals(items)
        approx = FloatIntervalSet.from_intervals(
            [(float(a), float(b)) for a, b in items])
        assert approx.measure == pytest.approx(float(exact.measure), abs=1e-9)
        # float merge may glue across sub-epsilon gaps, never split
        assert approx.count <= exact.count


class TestNormalizeFactory:
    def test_dispatch(self):
        assert isinstance(normalize([(0, 1)]), IntervalSet)
        assert isinstance(normalize([(0.0, 1.0)], backend="float"),
                          FloatIntervalSet)
        with pytest.raises(ValueError):
            normalize([(0, 1)], backend="symbolic")

    def test_merge_eps_forwarded(self):
        s = normalize([(0.0, 1.0), (1.0 + 1e-13, 2.0)], backend="float",
                      merge_eps=1e-12)
        assert s.count == 1
        assert s.merge_eps == 1e-12

    def test_default_epsilon_constant(self):
        assert MERGE_EPSILON == 1e-12
