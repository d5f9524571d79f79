import random
from fractions import Fraction

import pytest

import ultrametry as um
from ultrametry.distsets import (
    DistanceSetDescriptor,
    SequenceFamily,
    SequenceGapFamily,
    SequencePiece,
    classify,
    component_of,
    components,
    contains,
    descriptor_from_json,
    descriptor_to_json,
    from_finite,
    is_totally_bounded_distance_set,
    supremum,
)
from ultrametry.rationals import INF, IntervalShape

F = Fraction


def power_dec(a, b=1, k=1, n_start=1):
    return SequencePiece(SequenceFamily.POWER_DECREASING, a=F(a), b=F(b), k=k, n_start=n_start)


def power_inc(a, b=1, k=1, n_start=1):
    return SequencePiece(SequenceFamily.POWER_INCREASING, a=F(a), b=F(b), k=k, n_start=n_start)


def geom_dec(a, b=1, q=F(1, 2), n_start=1):
    return SequencePiece(SequenceFamily.GEOMETRIC_DECREASING, a=F(a), b=F(b), q=F(q), n_start=n_start)


def unbounded(b=1, k=1, n_start=1):
    return SequencePiece(SequenceFamily.POWER_UNBOUNDED, b=F(b), k=k, n_start=n_start)


ONE_PLUS = DistanceSetDescriptor((F(0),), (power_dec(1),))  # {0} u {1 + 1/n}
SQUARES = DistanceSetDescriptor((F(0),), (power_dec(0, k=2),))  # {0} u {1/n^2}
BELOW_TWO = DistanceSetDescriptor((F(0),), (power_inc(2),))  # {0} u {2 - 1/n}
SHIFTED = DistanceSetDescriptor((F(0), F(1)), (power_dec(2),))  # {0,1} u {2 + 1/n}
FINITE = DistanceSetDescriptor((F(0), F(1), F(2)))


class TestSequencePiece:
    def test_terms(self):
        assert power_dec(1).term(2) == F(3, 2)
        assert power_inc(2).term(1) == 1
        assert geom_dec(0).term(3) == F(1, 8)
        assert unbounded(b=F(1, 2), k=2).term(3) == F(9, 2)

    def test_contains_term_exactly(self):
        assert power_dec(1).contains_term(F(3, 2)) == 2
        assert power_dec(1).contains_term(F(1)) is None  # the limit is not a term
        assert power_dec(0, k=2).contains_term(F(1, 49)) == 7
        assert power_dec(0, k=2).contains_term(F(1, 50)) is None
        assert geom_dec(0).contains_term(F(1, 64)) == 6
        assert geom_dec(0).contains_term(F(1, 3)) is None
        assert unbounded(k=3).contains_term(F(27)) == 3

    def test_invariants(self):
        with pytest.raises(um.InputError):
            SequencePiece(SequenceFamily.POWER_DECREASING, a=F(0), b=F(0))
        with pytest.raises(um.InputError):
            SequencePiece(SequenceFamily.POWER_INCREASING, a=F(1, 2), b=F(1))  # negative first term
        with pytest.raises(um.InputError):
            SequencePiece(SequenceFamily.GEOMETRIC_DECREASING, a=F(0), b=F(1), q=F(2))


class TestDescriptor:
    def test_rejects_point_equal_to_term(self):
        with pytest.raises(um.InputError):
            DistanceSetDescriptor((F(0), F(3, 2)), (power_dec(1),))

    def test_rejects_overlapping_sequences(self):
        with pytest.raises(um.InputError):
            DistanceSetDescriptor((F(0),), (power_dec(0), geom_dec(0, q=F(2, 5))))

    def test_requires_zero(self):
        with pytest.raises(um.InputError):
            DistanceSetDescriptor((F(1),))

    def test_touching_limits_allowed(self):
        d = DistanceSetDescriptor((F(0),), (power_inc(1, n_start=2), power_dec(1, n_start=2)))
        assert contains(d, F(1, 2))
        assert not contains(d, F(1))


class TestContains:
    def test_sequence_member(self):
        assert contains(ONE_PLUS, F(3, 2))

    def test_limit_not_attained(self):
        assert not contains(ONE_PLUS, F(1))

    def test_zero_always(self):
        assert contains(ONE_PLUS, F(0))
        assert contains(FINITE, F(0))


class TestSupremum:
    def test_unattained(self):
        assert supremum(BELOW_TWO) == (F(2), False)

    def test_finite(self):
        assert supremum(FINITE) == (F(2), True)

    def test_unbounded(self):
        assert supremum(DistanceSetDescriptor((F(0),), (unbounded(),))) == (INF, False)

    def test_point_attains_limit(self):
        d = DistanceSetDescriptor((F(0), F(2)), (power_inc(2),))
        assert supremum(d) == (F(2), True)


def shapes_of(d):
    return [(str(iv), iv.shape) for iv in components(d).intervals]


class TestComponents:
    def test_one_plus_family(self):
        decomp = components(ONE_PLUS)
        assert shapes_of(ONE_PLUS) == [
            ("(0,1]", IntervalShape.CLOSED_RIGHT),
            ("(2,∞)", IntervalShape.OPEN_RAY),
        ]
        assert len(decomp.families) == 1 and not decomp.families[0].excluded_gaps

    def test_squares(self):
        assert shapes_of(SQUARES) == [("(1,∞)", IntervalShape.OPEN_RAY)]
        fam = components(SQUARES).families[0]
        assert fam.contains(F(1, 2)) and not fam.contains(F(1, 4))

    def test_finite(self):
        assert shapes_of(FINITE) == [
            ("(0,1)", IntervalShape.OPEN),
            ("(1,2)", IntervalShape.OPEN),
            ("(2,∞)", IntervalShape.OPEN_RAY),
        ]

    def test_interior_point_splits_a_gap(self):
        # 7/5 sits between the terms 4/3 and 3/2
        d = DistanceSetDescriptor((F(0), F(7, 5)), (power_dec(1),))
        decomp = components(d)
        fam = decomp.families[0]
        assert fam.excluded_gaps == (2,)
        split = [str(iv) for iv in decomp.intervals]
        assert "(4/3,7/5)" in split and "(7/5,3/2)" in split
        assert not fam.contains(F(29, 20))  # inside the split gap
        assert fam.contains(F(9, 5))  # ordinary gap (5/3, 2)

    def test_singleton_between_two_limits(self):
        d = DistanceSetDescriptor((F(0),), (power_inc(1, n_start=2), power_dec(1, n_start=2)))
        singles = [iv for iv in components(d).intervals if iv.shape is IntervalShape.SINGLETON]
        assert [str(iv) for iv in singles] == ["{1}"]

    def test_closed_component_between_two_limits(self):
        # {1 - 1/n} accumulates at 1 from below, {2 + 1/n} at 2 from above
        d = DistanceSetDescriptor((F(0),), (power_inc(1, n_start=2), power_dec(2),))
        shapes = shapes_of(d)
        assert ("[1,2]", IntervalShape.CLOSED) in shapes

    def test_unbounded_sequence_has_no_ray(self):
        d = DistanceSetDescriptor((F(0),), (unbounded(),))
        assert shapes_of(d) == [("(0,1)", IntervalShape.OPEN)]


class TestComponentOf:
    def test_gap_lookup(self):
        iv = component_of(ONE_PLUS, F(7, 5))
        assert str(iv) == "(4/3,3/2)"

    def test_member_has_no_component(self):
        assert component_of(ONE_PLUS, F(3, 2)) is None

    def test_ray(self):
        assert str(component_of(ONE_PLUS, F(10))) == "(2,∞)"


class TestClassify:
    def test_pseudo_blocked(self):
        regime = classify(BELOW_TWO)
        assert regime.tag is um.RegimeTag.PSEUDO_BLOCKED
        assert str(regime.witness) == "[2,∞)"

    def test_ultra_blocked(self):
        regime = classify(ONE_PLUS)
        assert regime.tag is um.RegimeTag.ULTRA_BLOCKED
        assert str(regime.witness) == "(0,1]"

    def test_all_extend(self):
        assert classify(SQUARES).tag is um.RegimeTag.ALL_EXTEND
        assert classify(SQUARES).witness is None

    def test_strict_blocked(self):
        regime = classify(SHIFTED)
        assert regime.tag is um.RegimeTag.STRICT_BLOCKED
        assert str(regime.witness) == "(1,2]"

    def test_closed_component_blocks_strict(self):
        d = DistanceSetDescriptor((F(0),), (power_inc(1, n_start=2), power_dec(2),))
        assert classify(d).tag is um.RegimeTag.STRICT_BLOCKED

    def test_finite_descriptors_all_extend(self):
        rng = random.Random(5)
        for _ in range(50):
            values = sorted({F(0)} | {F(rng.randint(1, 30), rng.randint(1, 6)) for _ in range(rng.randint(0, 6))})
            assert classify(DistanceSetDescriptor(tuple(values))).tag is um.RegimeTag.ALL_EXTEND

    def test_pseudo_blocked_iff_sup_unattained(self):
        fixtures = [ONE_PLUS, SQUARES, BELOW_TWO, SHIFTED, FINITE,
                    DistanceSetDescriptor((F(0),), (unbounded(),))]
        for d in fixtures:
            sup, attained = supremum(d)
            expect = (not attained) and sup is not INF
            assert (classify(d).tag is um.RegimeTag.PSEUDO_BLOCKED) == expect


class TestTotallyBounded:
    def test_decreasing_to_zero(self):
        assert is_totally_bounded_distance_set(DistanceSetDescriptor((F(0),), (power_dec(0),)))

    def test_positive_floor(self):
        assert not is_totally_bounded_distance_set(ONE_PLUS)

    def test_finite(self):
        assert not is_totally_bounded_distance_set(FINITE)

    def test_totally_bounded_classifies_all_extend(self):
        for piece in (power_dec(0), power_dec(0, k=3), geom_dec(0), geom_dec(0, q=F(3, 7))):
            d = DistanceSetDescriptor((F(0),), (piece,))
            assert is_totally_bounded_distance_set(d)
            assert classify(d).tag is um.RegimeTag.ALL_EXTEND


class TestFromFinite:
    def test_values(self):
        assert from_finite([F(0), F(1), F(2)]).points == (F(0), F(1), F(2))

    def test_zero_only(self):
        assert from_finite([F(0)]).points == (F(0),)

    def test_ex530_truncation_set(self):
        d = from_finite([F(0), F(1, 9), F(1, 4), F(1)])
        assert not d.sequences
        assert classify(d).tag is um.RegimeTag.ALL_EXTEND


def membership_via_components(d, t):
    """Count how many decomposition entries claim t."""
    decomp = components(d)
    hits = sum(1 for iv in decomp.intervals if iv.contains(t))
    hits += sum(1 for fam in decomp.families if fam.contains(t))
    return hits


@pytest.mark.parametrize(
    "descriptor",
    [ONE_PLUS, SQUARES, BELOW_TWO, SHIFTED, FINITE,
     DistanceSetDescriptor((F(0), F(7, 5)), (power_dec(1),)),
     DistanceSetDescriptor((F(0),), (power_inc(1, n_start=2), power_dec(1, n_start=2))),
     DistanceSetDescriptor((F(0), F(5)), (geom_dec(0, q=F(2, 3)),)),
     DistanceSetDescriptor((F(0), F(13, 4)), (unbounded(b=F(1, 2)),))],
    ids=lambda d: str(d),
)
def test_membership_xor_components(descriptor):
    rng = random.Random(str(descriptor))
    sup, _ = supremum(descriptor)
    cap = F(20) if sup is INF else sup + 1
    for _ in range(1000):
        t = F(rng.randint(0, cap.numerator * 12), cap.denominator * 12) % cap
        if t == 0:
            continue
        inside = contains(descriptor, t)
        hits = membership_via_components(descriptor, t)
        assert hits == (0 if inside else 1), f"t={t}: inside={inside}, hits={hits}"


def test_descriptor_json_round_trip():
    for d in (ONE_PLUS, SHIFTED, DistanceSetDescriptor((F(0),), (geom_dec(1),))):
        assert descriptor_from_json(descriptor_to_json(d)) == d
