"""Finite (pseudo)ultrametric spaces over exact rationals.

A space is a labelled square matrix of Fractions.  The container only checks
shape (square, unique labels, nonnegative entries); the metric axioms are the
business of :func:`validate`, which reports the first violated axiom together
with a concrete witness.  That split lets invalid matrices exist as values,
so validators and similarity checks can be exercised on them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from .errors import DomainError, InputError
from .rationals import format_rational, parse_rational

if TYPE_CHECKING:  # pragma: no cover
    from .preserving import PiecewiseMonotone


class Verdict(Enum):
    ULTRAMETRIC = "Ultrametric"
    PSEUDOULTRAMETRIC_ONLY = "PseudoultrametricOnly"
    NOT_PSEUDOULTRAMETRIC = "NotPseudoultrametric"


@dataclass(frozen=True)
class ValidationReport:
    """Axiom-check outcome; non-clean verdicts carry a label witness."""

    verdict: Verdict
    witness: tuple[str, ...] | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.witness is None:
            return self.verdict.value
        return f"{self.verdict.value}: {self.reason} at ({', '.join(self.witness)})"


@dataclass(frozen=True)
class FiniteUltrametricSpace:
    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise InputError("a space needs at least one point")
        if len(set(self.labels)) != n:
            raise InputError("point labels must be unique")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise InputError("distance matrix must be square and match the labels")
        for row in self.dist:
            for v in row:
                if v < 0:
                    raise InputError("distances must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown point label {label!r}") from None

    def d(self, x: str, y: str) -> Fraction:
        return self.dist[self.index(x)][self.index(y)]


def make_space(labels: Sequence[str], rows: Sequence[Sequence[Fraction]]) -> FiniteUltrametricSpace:
    return FiniteUltrametricSpace(tuple(labels), tuple(tuple(Fraction(v) for v in row) for row in rows))


@dataclass(frozen=True)
class FiniteDistanceSet:
    """Strictly increasing distance values, always starting at 0."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.values or self.values[0] != 0:
            raise InputError("a distance set starts at 0")
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise InputError("distance set values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, t: Fraction) -> bool:
        return t in self.values

    def rank_of(self, t: Fraction) -> int:
        try:
            return self.values.index(t)
        except ValueError:
            raise InputError(f"{t} is not a distance of this space") from None


def validate(space: FiniteUltrametricSpace) -> ValidationReport:
    """Check the axioms; witnesses are lexicographically smallest by index.

    Order of checks: zero diagonal, symmetry, strong triangle inequality,
    and finally positivity off the diagonal (whose failure only demotes the
    verdict to pseudoultrametric).
    """
    m = space.dist
    labels = space.labels
    n = space.n
    for i in range(n):
        if m[i][i] != 0:
            return ValidationReport(
                Verdict.NOT_PSEUDOULTRAMETRIC, (labels[i], labels[i]), "nonzero diagonal entry"
            )
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] != m[j][i]:
                return ValidationReport(
                    Verdict.NOT_PSEUDOULTRAMETRIC, (labels[i], labels[j]), "asymmetric entries"
                )
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k == i or k == j:
                    continue
                if m[i][j] > max(m[i][k], m[k][j]):
                    return ValidationReport(
                        Verdict.NOT_PSEUDOULTRAMETRIC,
                        (labels[i], labels[j], labels[k]),
                        "strong triangle inequality violated",
                    )
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] == 0:
                return ValidationReport(
                    Verdict.PSEUDOULTRAMETRIC_ONLY,
                    (labels[i], labels[j]),
                    "zero distance between distinct points",
                )
    return ValidationReport(Verdict.ULTRAMETRIC)


def distance_set(space: FiniteUltrametricSpace) -> FiniteDistanceSet:
    values = {Fraction(0)}
    for row in space.dist:
        values.update(row)
    return FiniteDistanceSet(tuple(sorted(values)))


def diameter(space: FiniteUltrametricSpace) -> Fraction:
    return distance_set(space).values[-1]


def diametrical_graph(space: FiniteUltrametricSpace) -> list[tuple[str, str]]:
    """All unordered pairs realizing the diameter; empty for a single point."""
    if space.n < 2:
        return []
    diam = diameter(space)
    return [
        (space.labels[i], space.labels[j])
        for i in range(space.n)
        for j in range(i + 1, space.n)
        if space.dist[i][j] == diam
    ]


def compose_metric(space: FiniteUltrametricSpace, f: "PiecewiseMonotone") -> FiniteUltrametricSpace:
    """Apply f entrywise to the distance matrix.

    Requires f to be defined and (not necessarily strictly) increasing on the
    space's distance set, with f(0) = 0.  The result is then always at least
    a pseudoultrametric; it is an ultrametric exactly when f is positive at
    every nonzero distance of the space.
    """
    values = distance_set(space).values
    images = []
    for v in values:
        try:
            images.append(f.eval(v))
        except DomainError:
            raise InputError(f"function is undefined at distance {format_rational(v)}") from None
    if images[0] != 0:
        raise InputError("function must map 0 to 0")
    pairs = list(zip(values, images))
    for (v1, w1), (v2, w2) in zip(pairs, pairs[1:]):
        if w1 > w2:
            raise InputError(
                f"function is not increasing on the distance set: "
                f"f({format_rational(v1)}) > f({format_rational(v2)})"
            )
    table = dict(zip(values, images))
    rows = tuple(tuple(table[v] for v in row) for row in space.dist)
    return FiniteUltrametricSpace(space.labels, rows)


def map_distances(space: FiniteUltrametricSpace, f: "PiecewiseMonotone") -> FiniteUltrametricSpace:
    """Entrywise image with no monotonicity checks (for falsification runs)."""
    rows = tuple(tuple(f.eval(v) for v in row) for row in space.dist)
    return FiniteUltrametricSpace(space.labels, rows)


# ---------------------------------------------------------------------------
# JSON format: {"labels": [...], "matrix": [["0","1"], ["1","0"]]}
# ---------------------------------------------------------------------------


def space_to_json(space: FiniteUltrametricSpace) -> dict:
    return {
        "labels": list(space.labels),
        "matrix": [[format_rational(v) for v in row] for row in space.dist],
    }


def space_from_json(obj: dict) -> FiniteUltrametricSpace:
    try:
        labels = obj["labels"]
        matrix = obj["matrix"]
    except (KeyError, TypeError):
        raise InputError("space JSON needs 'labels' and 'matrix'") from None
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise InputError("'labels' must be a list of strings")
    rows = []
    for row in matrix:
        if not isinstance(row, list):
            raise InputError("'matrix' must be a list of rows")
        rows.append(tuple(parse_rational(v) for v in row))
    return FiniteUltrametricSpace(tuple(labels), tuple(rows))


def load_space(path: str, *, require_valid: bool = True) -> FiniteUltrametricSpace:
    """Read a space file; by default reject matrices failing the axioms."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    space = space_from_json(obj)
    if require_valid:
        report = validate(space)
        if report.verdict is Verdict.NOT_PSEUDOULTRAMETRIC:
            raise InputError(f"space file {path}: {report}")
    return space


def save_space(space: FiniteUltrametricSpace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(space_to_json(space), fh, indent=2)
        fh.write("\n")
