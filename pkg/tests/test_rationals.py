import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultrametry import INF, InputError, Interval, IntervalShape, interval_contains, intervals_disjoint
from ultrametry.rationals import (
    approx_decimal,
    format_rational,
    greatest_n_with_pow_le,
    int_kth_root_floor,
    least_n_with_pow_ge,
    parse_rational,
    singleton,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=997)


@given(rationals)
def test_parse_format_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@given(rationals, rationals)
def test_addition_cancels_exactly(p, q):
    assert (p + q) - q == p


@pytest.mark.parametrize(
    "text",
    ["1/0", "1.5", "", "3/-4", "a/b", "1 / 2"],
)
def test_parse_rejects_garbage(text):
    with pytest.raises(InputError):
        parse_rational(text)


def test_parse_accepts_signs():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("+7") == 7
    assert parse_rational(" 5/10 ") == Fraction(1, 2)


def test_infinity_ordering():
    assert Fraction(10**9) < INF
    assert INF > Fraction(10**9)
    assert not (INF < INF)
    assert INF <= INF
    assert INF == INF


def test_interval_contains_examples():
    assert interval_contains(Interval(Fraction(1), Fraction(2), True, False), Fraction(1))
    assert not interval_contains(Interval(Fraction(1), Fraction(2), True, False), Fraction(2))
    assert interval_contains(Interval(Fraction(3), INF, True, False), Fraction(1000000))


def test_intervals_disjoint_examples():
    assert intervals_disjoint(
        Interval(Fraction(0), Fraction(1), True, False),
        Interval(Fraction(1), Fraction(2), True, True),
    )
    assert not intervals_disjoint(
        Interval(Fraction(0), Fraction(1), True, True),
        Interval(Fraction(1), Fraction(2), True, True),
    )
    assert not intervals_disjoint(singleton(Fraction(1)), Interval(Fraction(0), Fraction(2), False, False))


def test_interval_invariants():
    with pytest.raises(InputError):
        Interval(Fraction(2), Fraction(1), True, True)
    with pytest.raises(InputError):
        Interval(Fraction(1), Fraction(1), True, False)  # degenerate must be closed
    with pytest.raises(InputError):
        Interval(Fraction(0), INF, True, True)  # no closed upper infinity


def test_interval_shapes():
    assert Interval(Fraction(0), Fraction(1), False, False).shape is IntervalShape.OPEN
    assert Interval(Fraction(0), Fraction(1), False, True).shape is IntervalShape.CLOSED_RIGHT
    assert Interval(Fraction(1), Fraction(2), True, False).shape is IntervalShape.CLOSED_LEFT
    assert Interval(Fraction(1), Fraction(2), True, True).shape is IntervalShape.CLOSED
    assert singleton(Fraction(3)).shape is IntervalShape.SINGLETON
    assert Interval(Fraction(2), INF, False, False).shape is IntervalShape.OPEN_RAY
    assert Interval(Fraction(2), INF, True, False).shape is IntervalShape.CLOSED_RAY
    assert str(Interval(Fraction(0), Fraction(1), False, True)) == "(0,1]"
    assert str(Interval(Fraction(2), INF, True, False)) == "[2,∞)"


def test_interval_containment_against_direct_inequalities():
    rng = random.Random(20240517)
    for _ in range(1000):
        lo = Fraction(rng.randint(0, 40), rng.randint(1, 8))
        hi = lo + Fraction(rng.randint(0, 40), rng.randint(1, 8))
        lo_closed, hi_closed = rng.random() < 0.5, rng.random() < 0.5
        if lo == hi:
            lo_closed = hi_closed = True
        if rng.random() < 0.2:
            iv = Interval(lo, INF, lo_closed, False)
            t = Fraction(rng.randint(0, 100), rng.randint(1, 8))
            expected = t > iv.lo or (t == iv.lo and lo_closed)
        else:
            iv = Interval(lo, hi, lo_closed, hi_closed)
            t = Fraction(rng.randint(0, 100), rng.randint(1, 8))
            expected = (lo < t < hi) or (t == lo and lo_closed) or (t == hi and hi_closed)
        assert iv.contains(t) == expected


def test_kth_root_helpers():
    assert int_kth_root_floor(26, 3) == 2
    assert int_kth_root_floor(27, 3) == 3
    assert least_n_with_pow_ge(Fraction(9), 2) == 3
    assert least_n_with_pow_ge(Fraction(10), 2) == 4
    assert least_n_with_pow_ge(Fraction(1, 7), 2) == 1
    assert greatest_n_with_pow_le(Fraction(9), 2) == 3
    assert greatest_n_with_pow_le(Fraction(8), 2) == 2
    assert greatest_n_with_pow_le(Fraction(1, 2), 2) is None


@given(st.fractions(min_value="1/512", max_value=10**6, max_denominator=1024), st.integers(1, 5))
def test_kth_root_brackets(r, k):
    n = least_n_with_pow_ge(r, k)
    assert Fraction(n**k) >= r
    assert n == 1 or Fraction((n - 1) ** k) < r


def test_approx_decimal():
    assert approx_decimal(Fraction(5, 3), 3) == "1.667"
    assert approx_decimal(Fraction(-1, 8), 2) == "-0.12"  # round half even
    assert approx_decimal(Fraction(7), 0) == "7"
