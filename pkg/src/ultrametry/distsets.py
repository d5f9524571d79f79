"""Symbolic distance sets, their complement components, and extension regimes.

A descriptor is a finite union of rational points (always including 0) and
closed-form monotone sequences: power tails a +- b/n^k, geometric tails
a +- b*q^n (0 < q < 1), and the unbounded family b*n^k.  Membership, suprema,
and the decomposition of the complement of the set in the nonnegative
half-line are all decided in exact arithmetic.

The complement of such a set splits into finitely many explicitly listed
intervals plus, per sequence, the countable family of open gaps between
consecutive terms.  Points of the descriptor may sit inside a sequence's
range; the finitely many gaps they split are pulled out of the family and
listed explicitly.  Two sequences whose ranges overlap are rejected: their
merged gap structure has no finite description in this representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import InputError
from .rationals import (
    INF,
    Bound,
    Interval,
    IntervalShape,
    format_rational,
    greatest_n_with_pow_le,
    is_inf,
    least_n_with_pow_ge,
    parse_rational,
    singleton,
)


class SequenceFamily(Enum):
    POWER_DECREASING = "PowerDecreasing"
    POWER_INCREASING = "PowerIncreasing"
    GEOMETRIC_DECREASING = "GeometricDecreasing"
    GEOMETRIC_INCREASING = "GeometricIncreasing"
    POWER_UNBOUNDED = "PowerUnbounded"


@dataclass(frozen=True)
class IndexRange:
    """Set of term indices: none, all of [n_start, oo), a head, or a tail."""

    kind: str  # "none" | "all" | "head" | "tail"
    n: int | None = None

    def bounds(self, n_start: int) -> tuple[int, int | None] | None:
        """Concrete (first, last) indices, last None meaning unbounded."""
        if self.kind == "none":
            return None
        if self.kind == "all":
            return (n_start, None)
        if self.kind == "head":
            return (n_start, self.n)
        return (self.n, None)  # tail


@dataclass(frozen=True)
class SequencePiece:
    """One closed-form strictly monotone sequence of nonnegative rationals.

    Power families: terms a + b/n^k (decreasing to a) or a - b/n^k
    (increasing to a), b > 0.  Geometric families: a +- b*q^n with 0 < q < 1.
    PowerUnbounded: terms b*n^k, no finite limit.  Terms run over n >= n_start.
    """

    family: SequenceFamily
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(1)
    k: int = 1
    q: Fraction | None = None
    n_start: int = 1

    def __post_init__(self) -> None:
        if self.b <= 0:
            raise InputError("sequence scale b must be positive")
        if self.n_start < 1:
            raise InputError("n_start must be a positive integer")
        fam = self.family
        if fam in (SequenceFamily.POWER_DECREASING, SequenceFamily.POWER_INCREASING, SequenceFamily.POWER_UNBOUNDED):
            if self.k < 1:
                raise InputError("power exponent k must be a positive integer")
            if self.q is not None:
                raise InputError("power families take no ratio q")
        else:
            if self.q is None or not (0 < self.q < 1):
                raise InputError("geometric families need a ratio q with 0 < q < 1")
        if fam in (SequenceFamily.POWER_DECREASING, SequenceFamily.GEOMETRIC_DECREASING):
            if self.a < 0:
                raise InputError("a decreasing sequence needs a nonnegative limit")
        if fam in (SequenceFamily.POWER_INCREASING, SequenceFamily.GEOMETRIC_INCREASING):
            if self.term(self.n_start) < 0:
                raise InputError("all sequence terms must be nonnegative")

    # -- term structure ----------------------------------------------------

    def term(self, n: int) -> Fraction:
        if n < self.n_start:
            raise InputError("term index below n_start")
        fam = self.family
        if fam is SequenceFamily.POWER_DECREASING:
            return self.a + self.b / Fraction(n**self.k)
        if fam is SequenceFamily.POWER_INCREASING:
            return self.a - self.b / Fraction(n**self.k)
        if fam is SequenceFamily.GEOMETRIC_DECREASING:
            return self.a + self.b * self.q**n  # type: ignore[operator]
        if fam is SequenceFamily.GEOMETRIC_INCREASING:
            return self.a - self.b * self.q**n  # type: ignore[operator]
        return self.b * Fraction(n**self.k)

    @property
    def is_decreasing(self) -> bool:
        return self.family in (SequenceFamily.POWER_DECREASING, SequenceFamily.GEOMETRIC_DECREASING)

    @property
    def is_geometric(self) -> bool:
        return self.family in (SequenceFamily.GEOMETRIC_DECREASING, SequenceFamily.GEOMETRIC_INCREASING)

    @property
    def limit(self) -> Bound:
        """Limit of the terms: a for bounded families, INF when unbounded."""
        if self.family is SequenceFamily.POWER_UNBOUNDED:
            return INF
        return self.a

    def first_term(self) -> Fraction:
        return self.term(self.n_start)

    def hull(self) -> tuple[Fraction, bool, Bound, bool]:
        """(lo, lo_attained, hi, hi_attained) of the set of terms."""
        if self.is_decreasing:
            return (self.a, False, self.first_term(), True)
        return (self.first_term(), True, self.limit, False)

    # -- exact index solving ------------------------------------------------

    def contains_term(self, t: Fraction) -> int | None:
        """The index n with term(n) == t, if any."""
        fam = self.family
        if fam is SequenceFamily.POWER_DECREASING:
            if t <= self.a:
                return None
            r = self.b / (t - self.a)  # n^k == r
            n = least_n_with_pow_ge(r, self.k)
            return n if n >= self.n_start and Fraction(n**self.k) == r else None
        if fam is SequenceFamily.POWER_INCREASING:
            if t >= self.a:
                return None
            r = self.b / (self.a - t)
            n = least_n_with_pow_ge(r, self.k)
            return n if n >= self.n_start and Fraction(n**self.k) == r else None
        if fam is SequenceFamily.POWER_UNBOUNDED:
            r = t / self.b
            if r < 1:
                return None
            n = least_n_with_pow_ge(r, self.k)
            return n if n >= self.n_start and Fraction(n**self.k) == r else None
        # geometric: walk terms toward the limit, exactly
        if self.is_decreasing:
            if t <= self.a:
                return None
            n = self.n_start
            while self.term(n) > t:
                n += 1
            return n if self.term(n) == t else None
        if t >= self.a:
            return None
        n = self.n_start
        while self.term(n) < t:
            n += 1
        return n if self.term(n) == t else None

    def indices_le(self, t: Fraction) -> IndexRange:
        """Indices n with term(n) <= t."""
        fam = self.family
        if self.is_decreasing:
            if t <= self.a:
                return IndexRange("none")
            if t >= self.first_term():
                return IndexRange("all")
            if fam is SequenceFamily.POWER_DECREASING:
                n = least_n_with_pow_ge(self.b / (t - self.a), self.k)
            else:
                n = self.n_start
                while self.term(n) > t:
                    n += 1
            return IndexRange("tail", max(n, self.n_start))
        if fam is SequenceFamily.POWER_UNBOUNDED:
            if t < self.first_term():
                return IndexRange("none")
            n = greatest_n_with_pow_le(t / self.b, self.k)
            assert n is not None
            return IndexRange("head", n)
        # bounded increasing
        if t >= self.a:
            return IndexRange("all")
        if t < self.first_term():
            return IndexRange("none")
        if fam is SequenceFamily.POWER_INCREASING:
            n = greatest_n_with_pow_le(self.b / (self.a - t), self.k)
            assert n is not None
        else:
            n = self.n_start
            while self.term(n + 1) <= t:
                n += 1
        return IndexRange("head", n)

    def indices_ge(self, t: Fraction) -> IndexRange:
        """Indices n with term(n) >= t."""
        fam = self.family
        if self.is_decreasing:
            if t <= self.a:
                return IndexRange("all")
            if t > self.first_term():
                return IndexRange("none")
            if fam is SequenceFamily.POWER_DECREASING:
                n = greatest_n_with_pow_le(self.b / (t - self.a), self.k)
                assert n is not None
            else:
                n = self.n_start
                while self.term(n + 1) >= t:
                    n += 1
            return IndexRange("head", n)
        if fam is SequenceFamily.POWER_UNBOUNDED:
            if t <= self.first_term():
                return IndexRange("all")
            n = least_n_with_pow_ge(t / self.b, self.k)
            return IndexRange("tail", max(n, self.n_start))
        # bounded increasing
        if t >= self.a:
            return IndexRange("none")
        if t <= self.first_term():
            return IndexRange("all")
        if fam is SequenceFamily.POWER_INCREASING:
            n = least_n_with_pow_ge(self.b / (self.a - t), self.k)
        else:
            n = self.n_start
            while self.term(n) < t:
                n += 1
        return IndexRange("tail", max(n, self.n_start))

    # -- gaps ---------------------------------------------------------------
    # Gap g(n) is the open interval between term(n) and term(n+1); it exists
    # for every n >= n_start.

    def gap_bounds(self, n: int) -> tuple[Fraction, Fraction]:
        lo, hi = self.term(n), self.term(n + 1)
        return (hi, lo) if self.is_decreasing else (lo, hi)

    def gap_index_of(self, t: Fraction) -> int | None:
        """The gap strictly containing t, for t inside the hull, not a term."""
        lo, _, hi, _ = self.hull()
        if t <= lo or t >= hi:
            return None
        if self.contains_term(t) is not None:
            return None
        if self.is_decreasing:
            rng = self.indices_le(t)
            assert rng.kind == "tail" and rng.n is not None
            return rng.n - 1
        rng = self.indices_le(t)
        assert rng.kind == "head" and rng.n is not None
        return rng.n


@dataclass(frozen=True)
class DistanceSetDescriptor:
    points: tuple[Fraction, ...]
    sequences: tuple[SequencePiece, ...] = ()

    def __post_init__(self) -> None:
        pts = tuple(sorted(set(self.points)))
        if not pts or pts[0] != 0:
            raise InputError("a distance set descriptor must contain 0")
        if pts != self.points:
            object.__setattr__(self, "points", pts)
        unbounded = [s for s in self.sequences if s.family is SequenceFamily.POWER_UNBOUNDED]
        if len(unbounded) > 1:
            raise InputError("at most one unbounded sequence is allowed")
        for p in self.points:
            for s in self.sequences:
                if s.contains_term(p) is not None:
                    raise InputError(f"point {format_rational(p)} duplicates a sequence term")
        seqs = sorted(self.sequences, key=lambda s: s.hull()[0])
        for s, t in zip(seqs, seqs[1:]):
            _, _, s_hi, s_hi_att = s.hull()
            t_lo, t_lo_att, _, _ = t.hull()
            if is_inf(s_hi) or s_hi > t_lo or (s_hi == t_lo and s_hi_att and t_lo_att):
                raise InputError(
                    "sequence ranges overlap; interleaved sequences are not representable"
                )

    def __str__(self) -> str:
        parts = ["{" + ", ".join(format_rational(p) for p in self.points) + "}"]
        for s in self.sequences:
            parts.append(f"{s.family.value}(a={format_rational(s.a)}, b={format_rational(s.b)}, "
                         + (f"q={format_rational(s.q)}" if s.q is not None else f"k={s.k}")
                         + f", n>={s.n_start})")
        return " ∪ ".join(parts)


def from_finite(fd) -> DistanceSetDescriptor:
    """Wrap a finite distance set (anything iterable of Fractions)."""
    return DistanceSetDescriptor(tuple(Fraction(v) for v in fd))


def contains(d: DistanceSetDescriptor, t: Fraction) -> bool:
    if t < 0:
        raise InputError("distance sets live on the nonnegative half-line")
    if t in d.points:
        return True
    return any(s.contains_term(t) is not None for s in d.sequences)


def supremum(d: DistanceSetDescriptor) -> tuple[Bound, bool]:
    """Exact supremum with an attainment flag."""
    best: Bound = d.points[-1]
    attained = True
    for s in d.sequences:
        _, _, hi, hi_att = s.hull()
        if is_inf(hi):
            return (INF, False)
        if hi > best:
            best, attained = hi, hi_att
        elif hi == best:
            attained = attained or hi_att
    return (best, attained)


# ---------------------------------------------------------------------------
# Component decomposition of the complement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceGapFamily:
    """All open gaps of one sequence, minus the ones split by interior points.

    Split gaps are excluded here and their open fragments appear as explicit
    interval components of the decomposition.
    """

    sequence_index: int
    piece: SequencePiece
    excluded_gaps: tuple[int, ...] = ()

    def contains(self, t: Fraction) -> bool:
        n = self.piece.gap_index_of(t)
        return n is not None and n not in self.excluded_gaps

    def __str__(self) -> str:
        base = f"open gaps between consecutive terms of sequence #{self.sequence_index + 1}"
        if self.excluded_gaps:
            base += f" (excluding {len(self.excluded_gaps)} split gap(s))"
        return base


ComponentEntry = Interval | SequenceGapFamily


@dataclass(frozen=True)
class ComponentDecomposition:
    entries: tuple[ComponentEntry, ...]

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return tuple(e for e in self.entries if isinstance(e, Interval))

    @property
    def families(self) -> tuple[SequenceGapFamily, ...]:
        return tuple(e for e in self.entries if isinstance(e, SequenceGapFamily))


@dataclass(frozen=True)
class _Chunk:
    """A maximal consecutive block of the set: one free point or one sequence
    together with the descriptor points lying strictly inside its range."""

    lo: Fraction
    lo_attained: bool
    hi: Bound
    hi_attained: bool
    seq_index: int | None = None
    interior_points: tuple[Fraction, ...] = field(default=())


def _chunks(d: DistanceSetDescriptor) -> list[_Chunk]:
    hulls = [s.hull() for s in d.sequences]
    interior: dict[int, list[Fraction]] = {i: [] for i in range(len(d.sequences))}
    free_points: list[Fraction] = []
    for p in d.points:
        host = None
        for i, (lo, _, hi, _) in enumerate(hulls):
            if lo < p and (is_inf(hi) or p < hi):
                host = i
                break
        if host is None:
            free_points.append(p)
        else:
            interior[host].append(p)
    chunks = [_Chunk(p, True, p, True) for p in free_points]
    for i, (lo, lo_att, hi, hi_att) in enumerate(hulls):
        chunks.append(_Chunk(lo, lo_att, hi, hi_att, seq_index=i, interior_points=tuple(sorted(interior[i]))))
    # attained lower ends sort first among equals: their value is an element
    chunks.sort(key=lambda c: (c.lo, not c.lo_attained))
    return chunks


def components(d: DistanceSetDescriptor) -> ComponentDecomposition:
    """Decompose the complement of the set within the nonnegative reals.

    Walk the chunks in order.  Between consecutive chunks lies one interval
    component whose endpoints are included exactly when they are not in the
    set (an unattained limit).  Equal unattained boundaries meet in a
    singleton component.  Inside a sequence chunk the gaps form the family,
    except gaps holding interior points, which split into open fragments.
    Above the last chunk sits a ray: open if the supremum is attained,
    closed at an unattained finite supremum, absent when the set is
    unbounded.
    """
    entries: list[ComponentEntry] = []
    chunks = _chunks(d)
    prev_hi: Bound = Fraction(0)
    prev_att = True  # 0 is always in the set
    first = chunks[0]
    if not (first.lo == 0 and first.lo_attained):
        raise InputError("descriptor invariant broken: 0 must open the set")
    for idx, c in enumerate(chunks):
        if idx > 0:
            u, u_att, v, v_att = prev_hi, prev_att, c.lo, c.lo_attained
            assert not is_inf(u)
            if u == v:
                if not u_att and not v_att:
                    entries.append(singleton(u))  # type: ignore[arg-type]
                elif u_att and v_att:
                    raise InputError("descriptor invariant broken: duplicated element")
            elif u < v:
                entries.append(Interval(u, v, not u_att, not v_att))  # type: ignore[arg-type]
            else:
                raise InputError("descriptor invariant broken: chunks out of order")
        if c.seq_index is not None:
            piece = d.sequences[c.seq_index]
            split: dict[int, list[Fraction]] = {}
            for p in c.interior_points:
                g = piece.gap_index_of(p)
                assert g is not None
                split.setdefault(g, []).append(p)
            entries.append(SequenceGapFamily(c.seq_index, piece, tuple(sorted(split))))
            for g in sorted(split):
                lo, hi = piece.gap_bounds(g)
                cuts = [lo, *sorted(split[g]), hi]
                for x, y in zip(cuts, cuts[1:]):
                    entries.append(Interval(x, y, False, False))
        prev_hi, prev_att = c.hi, c.hi_attained
    if not is_inf(prev_hi):
        entries.append(Interval(prev_hi, INF, not prev_att, False))  # type: ignore[arg-type]
    return ComponentDecomposition(tuple(entries))


def component_of(d: DistanceSetDescriptor, t: Fraction) -> Interval | None:
    """The complement component containing t, as an interval; None if t is
    in the set.  Family gaps are materialized to their two adjacent terms."""
    if contains(d, t):
        return None
    decomp = components(d)
    for entry in decomp.entries:
        if isinstance(entry, Interval) and entry.contains(t):
            return entry
    for fam in decomp.families:
        if fam.contains(t):
            n = fam.piece.gap_index_of(t)
            assert n is not None
            lo, hi = fam.piece.gap_bounds(n)
            return Interval(lo, hi, False, False)
    raise AssertionError(f"no component found for {t}; decomposition is incomplete")


# ---------------------------------------------------------------------------
# Regime classification
# ---------------------------------------------------------------------------


class RegimeTag(Enum):
    ALL_EXTEND = "AllExtend"
    STRICT_BLOCKED = "StrictBlocked"
    ULTRA_BLOCKED = "UltraBlocked"
    PSEUDO_BLOCKED = "PseudoBlocked"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    witness: Interval | None = None

    def __str__(self) -> str:
        if self.witness is None:
            return self.tag.value
        return f"{self.tag.value}, witness component {self.witness}"


_HARMLESS = (IntervalShape.OPEN, IntervalShape.OPEN_RAY, IntervalShape.SINGLETON)


def classify(d: DistanceSetDescriptor) -> Regime:
    """Extension regime of a distance set, read off its components.

    A closed ray [a, oo) in the complement means the set is bounded with an
    unattained supremum (blocks every increasing extension of an unbounded
    scaling).  A component (0, a] means the nonzero part accumulates at some
    a > 0 from above (blocks ultrametric-preserving extensions).  Any other
    component carrying an endpoint blocks only strictly increasing
    extensions.  When every component is open or a single point, every
    strictly increasing scaling extends.
    """
    decomp = components(d)
    intervals = decomp.intervals
    for iv in intervals:
        if iv.shape is IntervalShape.CLOSED_RAY:
            return Regime(RegimeTag.PSEUDO_BLOCKED, iv)
    for iv in intervals:
        if iv.shape is IntervalShape.CLOSED_RIGHT and iv.lo == 0:
            return Regime(RegimeTag.ULTRA_BLOCKED, iv)
    for iv in intervals:
        if iv.shape not in _HARMLESS:
            return Regime(RegimeTag.STRICT_BLOCKED, iv)
    return Regime(RegimeTag.ALL_EXTEND)


def is_totally_bounded_distance_set(d: DistanceSetDescriptor) -> bool:
    """True only for the canonical form {0} plus one sequence decreasing to 0."""
    if d.points != (Fraction(0),) or len(d.sequences) != 1:
        return False
    s = d.sequences[0]
    return s.is_decreasing and s.a == 0


# ---------------------------------------------------------------------------
# JSON format:
# {"points": ["0", "1"],
#  "sequences": [{"family": "PowerDecreasing", "a": "1", "b": "1", "k": 1,
#                 "n_start": 1}]}
# Geometric families carry "q" instead of "k".
# ---------------------------------------------------------------------------


def sequence_to_json(s: SequencePiece) -> dict:
    obj: dict = {"family": s.family.value, "a": format_rational(s.a), "b": format_rational(s.b),
                 "n_start": s.n_start}
    if s.is_geometric:
        obj["q"] = format_rational(s.q)  # type: ignore[arg-type]
    else:
        obj["k"] = s.k
    return obj


def sequence_from_json(obj: dict) -> SequencePiece:
    try:
        family = SequenceFamily(obj["family"])
    except (KeyError, ValueError):
        raise InputError(f"unknown sequence family in {obj!r}") from None
    kwargs: dict = {"family": family, "n_start": int(obj.get("n_start", 1))}
    if "a" in obj:
        kwargs["a"] = parse_rational(obj["a"])
    if "b" in obj:
        kwargs["b"] = parse_rational(obj["b"])
    if family in (SequenceFamily.GEOMETRIC_DECREASING, SequenceFamily.GEOMETRIC_INCREASING):
        if "q" not in obj:
            raise InputError("geometric sequence needs 'q'")
        kwargs["q"] = parse_rational(obj["q"])
    else:
        kwargs["k"] = int(obj.get("k", 1))
    return SequencePiece(**kwargs)


def descriptor_to_json(d: DistanceSetDescriptor) -> dict:
    return {
        "points": [format_rational(p) for p in d.points],
        "sequences": [sequence_to_json(s) for s in d.sequences],
    }


def descriptor_from_json(obj: dict) -> DistanceSetDescriptor:
    try:
        points = tuple(parse_rational(p) for p in obj["points"])
    except (KeyError, TypeError):
        raise InputError("descriptor JSON needs 'points'") from None
    seqs = tuple(sequence_from_json(s) for s in obj.get("sequences", []))
    return DistanceSetDescriptor(points, seqs)


def load_descriptor(path: str) -> DistanceSetDescriptor:
    with open(path, encoding="utf-8") as fh:
        return descriptor_from_json(json.load(fh))
