"""Weak similarities of finite spaces.

A weak similarity from X to Y is a bijection of points under which the
distance comparison order is the same in both spaces; it determines a unique
strictly increasing bijection of the two distance sets (the scaling
function, mapping Y-distances back to X-distances).

Enumeration exploits that a scaling function between finite distance sets
must match distances rank by rank: recolor both matrices by distance rank
and search for color-preserving bijections of edge-colored complete graphs,
pruning on per-vertex color-degree vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .errors import InputError
from .rationals import format_rational
from .spaces import FiniteUltrametricSpace, distance_set


@dataclass(frozen=True)
class Bijection:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        sources = [s for s, _ in self.pairs]
        targets = [t for _, t in self.pairs]
        if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
            raise InputError("a bijection must pair distinct labels with distinct labels")
        ordered = tuple(sorted(self.pairs))
        if ordered != self.pairs:
            object.__setattr__(self, "pairs", ordered)

    @property
    def source_labels(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.pairs)

    @property
    def target_labels(self) -> frozenset[str]:
        return frozenset(t for _, t in self.pairs)

    def apply(self, label: str) -> str:
        for s, t in self.pairs:
            if s == label:
                return t
        raise InputError(f"label {label!r} is not in the bijection's domain")

    def inverse(self) -> "Bijection":
        return Bijection(tuple((t, s) for s, t in self.pairs))

    def then(self, other: "Bijection") -> "Bijection":
        if self.target_labels != other.source_labels:
            raise InputError("bijections do not compose: label sets differ")
        return Bijection(tuple((s, other.apply(t)) for s, t in self.pairs))

    def __str__(self) -> str:
        return ", ".join(f"{s}↦{t}" for s, t in self.pairs)


def identity_bijection(labels) -> Bijection:
    return Bijection(tuple((x, x) for x in labels))


@dataclass(frozen=True)
class ScalingFunction:
    """Strictly increasing bijection between two finite distance sets,
    stored as (argument, value) pairs with 0 mapped to 0."""

    pairs: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.pairs))
        if ordered != self.pairs:
            object.__setattr__(self, "pairs", ordered)
        if not self.pairs or self.pairs[0] != (0, 0):
            raise InputError("a scaling function must map 0 to 0")
        for (t1, v1), (t2, v2) in zip(self.pairs, self.pairs[1:]):
            if t1 >= t2 or v1 >= v2:
                raise InputError("a scaling function must be strictly increasing")

    def apply(self, t: Fraction) -> Fraction:
        for arg, value in self.pairs:
            if arg == t:
                return value
        raise InputError(f"{format_rational(t)} is outside the scaling function's domain")

    def inverse(self) -> "ScalingFunction":
        return ScalingFunction(tuple((v, t) for t, v in self.pairs))

    def after(self, inner: "ScalingFunction") -> "ScalingFunction":
        """self o inner: apply inner first, then self."""
        return ScalingFunction(tuple((t, self.apply(v)) for t, v in inner.pairs))

    @property
    def is_identity(self) -> bool:
        return all(t == v for t, v in self.pairs)

    def __str__(self) -> str:
        return ", ".join(f"{format_rational(t)}↦{format_rational(v)}" for t, v in self.pairs)


@dataclass(frozen=True)
class WsimFailure:
    """Two point pairs whose distances compare differently in the two spaces."""

    pair_a: tuple[str, str]
    pair_b: tuple[str, str]
    d_a: Fraction
    d_b: Fraction
    rho_a: Fraction
    rho_b: Fraction
    reason: str

    def __str__(self) -> str:
        return (
            f"{self.reason}: pairs {self.pair_a} and {self.pair_b} have source distances "
            f"{format_rational(self.d_a)}, {format_rational(self.d_b)} but target distances "
            f"{format_rational(self.rho_a)}, {format_rational(self.rho_b)}"
        )


WeakSimilarity = tuple[Bijection, ScalingFunction]


def _check_phi(x: FiniteUltrametricSpace, y: FiniteUltrametricSpace, phi: Bijection) -> None:
    if x.n != y.n:
        raise InputError("spaces have different sizes")
    if phi.source_labels != frozenset(x.labels) or phi.target_labels != frozenset(y.labels):
        raise InputError("bijection labels do not match the two spaces")


def check_weak_similarity(
    x: FiniteUltrametricSpace, y: FiniteUltrametricSpace, phi: Bijection
) -> ScalingFunction | WsimFailure:
    """Verify phi and extract its scaling function, or explain the failure.

    The induced correspondence sends each target distance rho(phi(a), phi(b))
    to the source distance d(a, b); phi is a weak similarity iff this map is
    well defined and strictly increasing, and then the map is the unique
    scaling function.
    """
    _check_phi(x, y, phi)
    target_index = {label: y.index(label) for label in y.labels}
    seen: dict[Fraction, tuple[Fraction, tuple[str, str]]] = {
        Fraction(0): (Fraction(0), (x.labels[0], x.labels[0]))
    }
    for i in range(x.n):
        for j in range(i + 1, x.n):
            d_val = x.dist[i][j]
            rho_val = y.dist[target_index[phi.apply(x.labels[i])]][target_index[phi.apply(x.labels[j])]]
            pair = (x.labels[i], x.labels[j])
            if rho_val in seen:
                prev_d, prev_pair = seen[rho_val]
                if prev_d != d_val:
                    return WsimFailure(
                        prev_pair, pair, prev_d, d_val, rho_val, rho_val,
                        "equal target distances with unequal source distances",
                    )
            else:
                seen[rho_val] = (d_val, pair)
    ordered = sorted(seen.items())
    for (rho1, (d1, pair1)), (rho2, (d2, pair2)) in zip(ordered, ordered[1:]):
        if d1 >= d2:
            return WsimFailure(
                pair1, pair2, d1, d2, rho1, rho2,
                "distance order is not preserved",
            )
    return ScalingFunction(tuple((rho, d) for rho, (d, _) in ordered))


def check_combinatorial_similarity(
    x: FiniteUltrametricSpace, y: FiniteUltrametricSpace, phi: Bijection
) -> bool:
    """True iff phi preserves equality of distances in both directions."""
    _check_phi(x, y, phi)
    target_index = {label: y.index(label) for label in y.labels}
    rho_to_d: dict[Fraction, Fraction] = {Fraction(0): Fraction(0)}
    for i in range(x.n):
        for j in range(i + 1, x.n):
            d_val = x.dist[i][j]
            rho_val = y.dist[target_index[phi.apply(x.labels[i])]][target_index[phi.apply(x.labels[j])]]
            if rho_to_d.setdefault(rho_val, d_val) != d_val:
                return False
    values = list(rho_to_d.values())
    return len(set(values)) == len(values)


def _rank_colors(space: FiniteUltrametricSpace) -> tuple[list[list[int]], int]:
    ds = distance_set(space)
    rank = {v: r for r, v in enumerate(ds.values)}
    colors = [[rank[v] for v in row] for row in space.dist]
    return colors, len(ds)


def iter_weak_similarities(
    x: FiniteUltrametricSpace, y: FiniteUltrametricSpace
) -> Iterator[WeakSimilarity]:
    """Deterministic enumeration of all weak similarities from x to y."""
    if x.n != y.n:
        return
    dx, dy = distance_set(x), distance_set(y)
    if len(dx) != len(dy):
        return
    scaling = ScalingFunction(tuple(zip(dy.values, dx.values)))
    cx, m = _rank_colors(x)
    cy, _ = _rank_colors(y)
    n = x.n

    def degree_vector(colors: list[list[int]], v: int) -> tuple[int, ...]:
        counts = [0] * m
        for u in range(n):
            if u != v:
                counts[colors[v][u]] += 1
        return tuple(counts)

    dvx = [degree_vector(cx, v) for v in range(n)]
    dvy = [degree_vector(cy, v) for v in range(n)]
    candidates: list[list[int]] = []
    for v in range(n):
        cands = [u for u in range(n) if dvy[u] == dvx[v]]
        if not cands:
            return
        candidates.append(sorted(cands, key=lambda u: y.labels[u]))
    order = sorted(range(n), key=lambda v: (len(candidates[v]), x.labels[v]))

    assignment: dict[int, int] = {}
    used = [False] * n

    def backtrack(pos: int) -> Iterator[WeakSimilarity]:
        if pos == n:
            phi = Bijection(tuple((x.labels[v], y.labels[u]) for v, u in assignment.items()))
            yield phi, scaling
            return
        v = order[pos]
        for u in candidates[v]:
            if used[u]:
                continue
            if any(cx[v][w] != cy[u][assignment[w]] for w in assignment):
                continue
            assignment[v] = u
            used[u] = True
            yield from backtrack(pos + 1)
            used[u] = False
            del assignment[v]

    yield from backtrack(0)


def find_weak_similarities(
    x: FiniteUltrametricSpace, y: FiniteUltrametricSpace, limit: int | None = 1000
) -> list[WeakSimilarity]:
    """Up to `limit` weak similarities (None for all), deterministic order."""
    out: list[WeakSimilarity] = []
    for ws in iter_weak_similarities(x, y):
        out.append(ws)
        if limit is not None and len(out) >= limit:
            break
    return out


def compose(ws1: WeakSimilarity, ws2: WeakSimilarity) -> WeakSimilarity:
    """Compose X->Y with Y->Z; the scalings compose the other way around."""
    phi1, f = ws1
    phi2, g = ws2
    return phi1.then(phi2), f.after(g)


def invert(ws: WeakSimilarity) -> WeakSimilarity:
    phi, psi = ws
    return phi.inverse(), psi.inverse()


# ---------------------------------------------------------------------------
# Bijection JSON: {"map": {"x1": "y3", ...}}
# ---------------------------------------------------------------------------


def bijection_to_json(phi: Bijection) -> dict:
    return {"map": {s: t for s, t in phi.pairs}}


def bijection_from_json(obj: dict) -> Bijection:
    try:
        mapping = obj["map"]
    except (KeyError, TypeError):
        raise InputError("bijection JSON needs 'map'") from None
    if not isinstance(mapping, dict):
        raise InputError("'map' must be an object")
    return Bijection(tuple(mapping.items()))


def load_bijection(path: str) -> Bijection:
    with open(path, encoding="utf-8") as fh:
        return bijection_from_json(json.load(fh))
