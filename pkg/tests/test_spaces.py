import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import ultrametry as um
from ultrametry.spaces import load_space, save_space, space_from_json, space_to_json

from conftest import brute_force_verdict, random_pool, seeded_space


def three_point(a=1, b=2):
    a, b = Fraction(a), Fraction(b)
    return um.make_space(["x1", "x2", "x3"], [[0, a, b], [a, 0, b], [b, b, 0]])


def ex530_truncation_4():
    """Points 1, 1/2, 1/3, 1/4 with distance max(x^2, y^2)."""
    pts = [Fraction(1, k) for k in range(1, 5)]
    rows = [
        [Fraction(0) if i == j else max(pts[i], pts[j]) ** 2 for j in range(4)]
        for i in range(4)
    ]
    return um.make_space([str(p) for p in pts], rows)


class TestValidate:
    def test_isoceles_is_ultrametric(self):
        assert um.validate(three_point()).verdict is um.Verdict.ULTRAMETRIC

    def test_single_point(self):
        s = um.make_space(["p"], [[0]])
        assert um.validate(s).verdict is um.Verdict.ULTRAMETRIC

    def test_triangle_violation_witness(self):
        s = um.make_space(["x1", "x2", "x3"], [[0, 1, 1], [1, 0, 3], [1, 3, 0]])
        report = um.validate(s)
        assert report.verdict is um.Verdict.NOT_PSEUDOULTRAMETRIC
        assert report.witness == ("x2", "x3", "x1")

    def test_zero_off_diagonal_is_pseudo_only(self):
        s = um.make_space(["a", "b"], [[0, 0], [0, 0]])
        report = um.validate(s)
        assert report.verdict is um.Verdict.PSEUDOULTRAMETRIC_ONLY
        assert report.witness == ("a", "b")

    def test_asymmetry_and_diagonal(self):
        s = um.make_space(["a", "b"], [[0, 1], [2, 0]])
        assert um.validate(s).reason == "asymmetric entries"
        s = um.make_space(["a", "b"], [[1, 1], [1, 0]])
        assert um.validate(s).reason == "nonzero diagonal entry"

    def test_container_input_errors(self):
        with pytest.raises(um.InputError):
            um.make_space(["a", "b"], [[0, 1]])  # not square
        with pytest.raises(um.InputError):
            um.make_space(["a", "b"], [[0, -1], [-1, 0]])  # negative
        with pytest.raises(um.InputError):
            um.make_space(["a", "a"], [[0, 1], [1, 0]])  # duplicate labels


class TestDistanceSet:
    def test_three_point(self):
        assert list(um.distance_set(three_point())) == [0, 1, 2]

    def test_single_point(self):
        assert list(um.distance_set(um.make_space(["p"], [[0]]))) == [0]

    def test_ex530_truncation(self):
        # six pairs by hand: larger element 1 -> 1, 1/2 -> 1/4, 1/3 -> 1/9
        expected = [Fraction(0), Fraction(1, 9), Fraction(1, 4), Fraction(1)]
        assert list(um.distance_set(ex530_truncation_4())) == expected


class TestDiameter:
    def test_three_point(self):
        assert um.diameter(three_point()) == 2

    def test_single_point(self):
        assert um.diameter(um.make_space(["p"], [[0]])) == 0

    def test_ex530_truncation(self):
        assert um.diameter(ex530_truncation_4()) == 1

    def test_diameter_is_attained(self):
        for seed in range(25):
            s = seeded_space(seed)
            assert um.diameter(s) in um.distance_set(s)


class TestDiametricalGraph:
    def test_three_point(self):
        assert um.diametrical_graph(three_point()) == [("x1", "x3"), ("x2", "x3")]

    def test_two_point(self):
        s = um.make_space(["a", "b"], [[0, 5], [5, 0]])
        assert um.diametrical_graph(s) == [("a", "b")]

    def test_single_point_empty(self):
        assert um.diametrical_graph(um.make_space(["p"], [[0]])) == []

    def test_ex530_truncation(self):
        edges = um.diametrical_graph(ex530_truncation_4())
        assert edges == [("1", "1/2"), ("1", "1/3"), ("1", "1/4")]


class TestComposeMetric:
    def test_bounding_map(self):
        composed = um.compose_metric(three_point(), um.preserving.bounding_function(Fraction(1)))
        assert composed.d("x1", "x2") == Fraction(1, 2)
        assert composed.d("x1", "x3") == Fraction(2, 3)
        assert um.validate(composed).verdict is um.Verdict.ULTRAMETRIC

    def test_identity(self):
        s = three_point()
        assert um.compose_metric(s, um.preserving.identity_function()).dist == s.dist

    def test_collapse_drops_distance_count(self):
        f = um.PiecewiseMonotone(
            (
                um.Piece(um.Interval(Fraction(0), Fraction(1), True, False), um.AffineForm(Fraction(5), Fraction(0))),
                um.Piece(um.Interval(Fraction(1), um.INF, True, False), um.AffineForm(Fraction(0), Fraction(5))),
            )
        )
        composed = um.compose_metric(three_point(), f)
        assert composed.d("x1", "x2") == 5 and composed.d("x1", "x3") == 5
        assert len(um.distance_set(composed)) == 2
        assert len(um.distance_set(three_point())) == 3

    def test_rejects_non_increasing_on_distances(self):
        f = um.PiecewiseMonotone(
            (
                um.Piece(um.Interval(Fraction(0), Fraction(2), True, False), um.AffineForm(Fraction(1), Fraction(0))),
                um.Piece(um.Interval(Fraction(2), um.INF, True, False), um.AffineForm(Fraction(1), Fraction(-1))),
            )
        )
        with pytest.raises(um.InputError):
            um.compose_metric(three_point(Fraction(3, 2), Fraction(2)), f)

    def test_rejects_undefined_distance(self):
        partial = um.preserving.unbounding_function(Fraction(3, 2))
        with pytest.raises(um.InputError):
            um.compose_metric(three_point(), partial)


small_entries = st.fractions(min_value=0, max_value=4, max_denominator=4)


@given(st.lists(small_entries, min_size=10, max_size=10))
def test_validate_matches_brute_force_oracle(upper):
    # symmetric 5x5 matrix with zero diagonal from the 10 upper entries
    n = 5
    m = [[Fraction(0)] * n for _ in range(n)]
    it = iter(upper)
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = next(it)
    s = um.make_space([f"p{i}" for i in range(n)], m)
    assert um.validate(s).verdict is brute_force_verdict(s)


def test_compose_with_preserving_function_stays_ultrametric():
    rng = random.Random(99)
    functions = [
        um.preserving.identity_function(),
        um.preserving.bounding_function(Fraction(2)),
        um.preserving.bounding_function(Fraction(7, 2)),
        um.PiecewiseMonotone(
            (
                um.Piece(um.Interval(Fraction(0), Fraction(1), True, True), um.AffineForm(Fraction(1), Fraction(0))),
                um.Piece(um.Interval(Fraction(1), um.INF, False, False), um.AffineForm(Fraction(2), Fraction(-1))),
            )
        ),
    ]
    for f in functions:
        assert um.classify_preserving(f).tag is um.PreservingTag.ULTRAMETRIC_PRESERVING
    for trial in range(500):
        s = seeded_space(("ultra", trial))
        f = functions[rng.randrange(len(functions))]
        assert um.validate(um.compose_metric(s, f)).verdict is um.Verdict.ULTRAMETRIC


def test_compose_with_pseudo_only_function_stays_pseudoultrametric():
    f = um.PiecewiseMonotone(
        (
            um.Piece(um.Interval(Fraction(0), Fraction(1), True, True), um.AffineForm(Fraction(0), Fraction(0))),
            um.Piece(um.Interval(Fraction(1), um.INF, False, False), um.AffineForm(Fraction(1), Fraction(-1))),
        )
    )
    tag = um.classify_preserving(f).tag
    assert tag is um.PreservingTag.PSEUDOULTRAMETRIC_PRESERVING_ONLY
    for trial in range(120):
        s = seeded_space(("pseudo", trial))
        verdict = um.validate(um.compose_metric(s, f)).verdict
        assert verdict is not um.Verdict.NOT_PSEUDOULTRAMETRIC


def test_space_json_round_trip(tmp_path):
    s = ex530_truncation_4()
    assert space_from_json(space_to_json(s)) == s
    path = tmp_path / "space.json"
    save_space(s, str(path))
    assert load_space(str(path)) == s


def test_loader_rejects_invalid(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"labels": ["a", "b", "c"], "matrix": [["0","1","1"],["1","0","3"],["1","3","0"]]}')
    with pytest.raises(um.InputError):
        load_space(str(path))
    assert load_space(str(path), require_valid=False).n == 3
