"""Exact piecewise functions on the nonnegative half-line and their
classification as ultrametric / pseudoultrametric preserving.

Pieces carry one of three closed forms, each monotone-checkable from its
parameters alone: affine slope*t + intercept, the bounding map c*t/(1+t),
and its inverse t/(c-t).  Restricting to these forms keeps every predicate
decidable in rational arithmetic; nothing is ever sampled to decide a tag.

A function normally covers the whole half-line, but a proper initial segment
[0, T) is allowed so that t/(c-t) can exist as a standalone function; only
composition uses such partial functions, classification rejects them.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from . import generators
from .errors import DomainError, InputError
from .rationals import (
    INF,
    Bound,
    Interval,
    format_rational,
    is_inf,
    parse_rational,
)
from .spaces import (
    FiniteUltrametricSpace,
    ValidationReport,
    Verdict,
    compose_metric,
    distance_set,
    map_distances,
    validate,
)


@dataclass(frozen=True)
class AffineForm:
    slope: Fraction
    intercept: Fraction


@dataclass(frozen=True)
class MoebiusForm:
    """c*t/(1+t): strictly increasing for c > 0, bounded above by c."""

    c: Fraction


@dataclass(frozen=True)
class InverseMoebiusForm:
    """t/(c-t): strictly increasing on [0, c), unbounded near c."""

    c: Fraction


Form = Union[AffineForm, MoebiusForm, InverseMoebiusForm]


def _form_eval(form: Form, t: Fraction) -> Fraction:
    if isinstance(form, AffineForm):
        return form.slope * t + form.intercept
    if isinstance(form, MoebiusForm):
        return form.c * t / (1 + t)
    return t / (form.c - t)


def _form_direction(form: Form) -> int:
    """-1 decreasing, 0 constant, +1 strictly increasing."""
    if isinstance(form, AffineForm):
        return (form.slope > 0) - (form.slope < 0)
    if isinstance(form, MoebiusForm):
        return (form.c > 0) - (form.c < 0)
    return 1


@dataclass(frozen=True)
class Piece:
    interval: Interval
    form: Form


@dataclass(frozen=True)
class PiecewiseMonotone:
    pieces: tuple[Piece, ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise InputError("a piecewise function needs at least one piece")
        first = self.pieces[0].interval
        if first.lo != 0 or not first.lo_closed:
            raise InputError("the first piece must start closed at 0")
        for left, right in zip(self.pieces, self.pieces[1:]):
            li, ri = left.interval, right.interval
            if is_inf(li.hi) or li.hi != ri.lo or li.hi_closed == ri.lo_closed:
                raise InputError("pieces must abut with complementary endpoint flags")
        for piece in self.pieces:
            _check_piece(piece)

    @property
    def domain_end(self) -> tuple[Bound, bool]:
        """(end, closed): the covered domain is [0, end) or [0, end]."""
        last = self.pieces[-1].interval
        return last.hi, last.hi_closed

    @property
    def covers_all(self) -> bool:
        return is_inf(self.pieces[-1].interval.hi)

    def eval(self, t: Fraction) -> Fraction:
        if t < 0:
            raise InputError("piecewise functions are defined on nonnegative rationals")
        for piece in self.pieces:
            if piece.interval.contains(t):
                return _form_eval(piece.form, t)
        raise DomainError(f"function undefined at {format_rational(t)}")


def _check_piece(piece: Piece) -> None:
    iv, form = piece.interval, piece.form
    if isinstance(form, InverseMoebiusForm):
        if form.c <= 0:
            raise InputError("t/(c-t) needs c > 0")
        above = is_inf(iv.hi) or iv.hi > form.c or (iv.hi == form.c and iv.hi_closed)
        if above:
            raise InputError("t/(c-t) piece must stay strictly below c")
        return  # nonnegative and increasing on [0, c)
    if isinstance(form, MoebiusForm):
        if form.c < 0 and not (iv.is_singleton and iv.lo == 0):
            raise InputError("c*t/(1+t) with c < 0 is negative away from 0")
        return
    direction = _form_direction(form)
    if direction >= 0:
        low_value = _form_eval(form, iv.lo)
    else:
        if is_inf(iv.hi):
            raise InputError("a decreasing affine piece cannot be unbounded")
        low_value = _form_eval(form, iv.hi)  # type: ignore[arg-type]
    if low_value < 0:
        raise InputError("piece values must be nonnegative")


def identity_function() -> PiecewiseMonotone:
    return PiecewiseMonotone((Piece(Interval(Fraction(0), INF, True, False), AffineForm(Fraction(1), Fraction(0))),))


def bounding_function(d_star: Fraction) -> PiecewiseMonotone:
    """t -> d_star * t / (1 + t) on the whole half-line."""
    if d_star <= 0:
        raise InputError("the bound d* must be positive")
    return PiecewiseMonotone((Piece(Interval(Fraction(0), INF, True, False), MoebiusForm(d_star)),))


def unbounding_function(d_star: Fraction) -> PiecewiseMonotone:
    """s -> s / (d_star - s) on [0, d_star); inverse of the bounding map."""
    if d_star <= 0:
        raise InputError("the bound d* must be positive")
    return PiecewiseMonotone((Piece(Interval(Fraction(0), d_star, True, False), InverseMoebiusForm(d_star)),))


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


class PreservingTag(Enum):
    ULTRAMETRIC_PRESERVING = "UltrametricPreserving"
    PSEUDOULTRAMETRIC_PRESERVING_ONLY = "PseudoultrametricPreservingOnly"
    NOT_PRESERVING = "NotPreserving"


@dataclass(frozen=True)
class MonotoneViolation:
    """t1 < t2 with f(t1) > f(t2)."""

    t1: Fraction
    t2: Fraction

    def __str__(self) -> str:
        return f"f({format_rational(self.t1)}) > f({format_rational(self.t2)})"


@dataclass(frozen=True)
class NonzeroAtZero:
    value: Fraction

    def __str__(self) -> str:
        return f"f(0) = {format_rational(self.value)} ≠ 0"


@dataclass(frozen=True)
class PositiveZero:
    """Some t > 0 with f(t) = 0."""

    t: Fraction

    def __str__(self) -> str:
        return f"f({format_rational(self.t)}) = 0 with {format_rational(self.t)} > 0"


Witness = Union[MonotoneViolation, NonzeroAtZero, PositiveZero]


@dataclass(frozen=True)
class PreservingVerdict:
    tag: PreservingTag
    witness: Witness | None
    strictly_increasing: bool

    def __str__(self) -> str:
        if self.witness is None:
            return self.tag.value
        return f"{self.tag.value}: {self.witness}"


def _piece_interior_points(iv: Interval) -> tuple[Fraction, Fraction]:
    """Two comparison points inside the interval, first strictly below second."""
    lo = iv.lo
    if is_inf(iv.hi):
        return lo + 1, lo + 2
    span = iv.hi - lo  # type: ignore[operator]
    return lo + span / 4, lo + span / 2


def _approach_from_left(f_piece: Piece, m: Fraction, threshold: Fraction) -> Fraction:
    """A point t < m in the piece with value > threshold (exists by continuity)."""
    lo = f_piece.interval.lo
    step = (m - lo) / 2
    t = m - step
    while _form_eval(f_piece.form, t) <= threshold:
        step /= 2
        t = m - step
    return t


def _approach_from_right(f_piece: Piece, m: Fraction, threshold: Fraction) -> Fraction:
    """A point t > m in the piece with value < threshold."""
    hi = f_piece.interval.hi
    step = Fraction(1) if is_inf(hi) else (hi - m) / 2  # type: ignore[operator]
    t = m + step
    while _form_eval(f_piece.form, t) >= threshold:
        step /= 2
        t = m + step
    return t


def _monotone_analysis(f: PiecewiseMonotone) -> tuple[bool, bool, MonotoneViolation | None]:
    """(increasing, strictly_increasing, violation witness)."""
    strict = True
    for piece in f.pieces:
        if piece.interval.is_singleton:
            continue
        direction = _form_direction(piece.form)
        if direction < 0:
            t1, t2 = _piece_interior_points(piece.interval)
            return False, False, MonotoneViolation(t1, t2)
        if direction == 0:
            strict = False
    for left, right in zip(f.pieces, f.pieces[1:]):
        m = left.interval.hi
        assert not is_inf(m)
        left_val = _form_eval(left.form, m)  # one-sided limit, continuous forms
        right_val = _form_eval(right.form, m)  # type: ignore[arg-type]
        if left_val > right_val:
            if left.interval.hi_closed:
                t1 = m
                t2 = _approach_from_right(right, m, left_val)  # type: ignore[arg-type]
            else:
                t2 = m
                t1 = _approach_from_left(left, m, right_val)  # type: ignore[arg-type]
            return False, False, MonotoneViolation(t1, t2)  # type: ignore[arg-type]
    return True, strict, None


def _largest_zero(f: PiecewiseMonotone) -> tuple[Fraction, bool]:
    """(sup of the zero set, attained) for an increasing f with f(0) = 0."""
    zero_end = Fraction(0)
    attained = True
    for piece in f.pieces:
        form, iv = piece.form, piece.interval
        if isinstance(form, (MoebiusForm, InverseMoebiusForm)):
            if isinstance(form, MoebiusForm) and form.c == 0:
                if is_inf(iv.hi):
                    return INF, False  # type: ignore[return-value]
                zero_end, attained = iv.hi, iv.hi_closed  # type: ignore[assignment]
                continue
            break  # value 0 only at t = 0
        if form.slope == 0 and form.intercept == 0:
            if is_inf(iv.hi):
                return INF, False  # type: ignore[return-value]
            zero_end, attained = iv.hi, iv.hi_closed  # type: ignore[assignment]
            continue
        if form.slope > 0:
            root = -form.intercept / form.slope
            if iv.contains(root):
                zero_end, attained = root, True
        break
    return zero_end, attained


def classify_preserving(f: PiecewiseMonotone) -> PreservingVerdict:
    """Decide the preserving tag of a total piecewise function.

    The function is ultrametric preserving iff it is increasing and vanishes
    only at 0; dropping the vanishing condition leaves it pseudoultrametric
    preserving.  Both conditions are decided from the piece parameters and
    exact junction values.
    """
    if not f.covers_all:
        raise InputError("classification needs a function covering the whole half-line")
    increasing, strict, violation = _monotone_analysis(f)
    f0 = f.eval(Fraction(0))
    if f0 != 0:
        return PreservingVerdict(PreservingTag.NOT_PRESERVING, NonzeroAtZero(f0), strict)
    if not increasing:
        assert violation is not None
        return PreservingVerdict(PreservingTag.NOT_PRESERVING, violation, False)
    zero_end, attained = _largest_zero(f)
    if is_inf(zero_end) or zero_end > 0:
        t = zero_end if (not is_inf(zero_end) and attained) else (
            Fraction(1) if is_inf(zero_end) else zero_end / 2
        )
        return PreservingVerdict(
            PreservingTag.PSEUDOULTRAMETRIC_PRESERVING_ONLY, PositiveZero(t), strict
        )
    return PreservingVerdict(PreservingTag.ULTRAMETRIC_PRESERVING, None, strict)


# ---------------------------------------------------------------------------
# Empirical falsification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FalsifyResult:
    space: FiniteUltrametricSpace
    composed: FiniteUltrametricSpace
    report: ValidationReport
    trial: int


def _probe_pool(f: PiecewiseMonotone, rng) -> list[Fraction]:
    """Positive rationals biased toward piece boundaries, plus random filler."""
    probes: set[Fraction] = set()
    for piece in f.pieces:
        iv = piece.interval
        for edge in (iv.lo, iv.hi):
            if is_inf(edge) or edge <= 0:
                continue
            probes.add(edge)
            probes.add(edge + edge / 4)
            if edge - edge / 4 > 0:
                probes.add(edge - edge / 4)
        lo = iv.lo
        hi = lo + 2 if is_inf(iv.hi) else iv.hi
        mid = (lo + hi) / 2  # type: ignore[operator]
        if mid > 0:
            probes.add(mid)
    for _ in range(8):
        value = Fraction(rng.randint(1, 64), rng.randint(1, 16))
        probes.add(value)
    return sorted(probes)


def _composed_level(report: ValidationReport) -> int:
    return {
        Verdict.ULTRAMETRIC: 2,
        Verdict.PSEUDOULTRAMETRIC_ONLY: 1,
        Verdict.NOT_PSEUDOULTRAMETRIC: 0,
    }[report.verdict]


def empirical_falsify(
    f: PiecewiseMonotone,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> FalsifyResult | None:
    """Search for a space whose composed matrix beats the classified tag.

    The check on each candidate is independent of the classifier: compose the
    matrix entrywise and re-validate it by brute force.  For a NotPreserving
    verdict the candidate list starts with the three-point space built from
    the monotonicity witness, which is guaranteed to expose a strong-triangle
    violation; random spaces drawn from a boundary-biased level pool follow.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    verdict = classify_preserving(f)
    floor_level = {
        PreservingTag.ULTRAMETRIC_PRESERVING: 2,
        PreservingTag.PSEUDOULTRAMETRIC_PRESERVING_ONLY: 1,
        PreservingTag.NOT_PRESERVING: 1,
    }[verdict.tag]

    targeted: list[FiniteUltrametricSpace] = []
    if isinstance(verdict.witness, MonotoneViolation):
        # nonnegative values and f(0) = 0 force the witness pair off zero
        w = verdict.witness
        targeted.append(generators.p532_counterexample(w.t1, w.t2))

    pool_rng = random.Random(generators.stable_seed((seed, -1)))
    pool = _probe_pool(f, pool_rng)

    def run_trial(i: int) -> FalsifyResult | None:
        if i < len(targeted):
            space = targeted[i]
        else:
            rng = random.Random(generators.stable_seed((seed, i)))
            n = rng.randint(2, 6)
            levels = rng.sample(pool, min(len(pool), max(2, n)))
            space = generators.random_space(n, (seed, i, 1), levels)
        composed = map_distances(space, f)
        report = validate(composed)
        if _composed_level(report) < floor_level:
            return FalsifyResult(space, composed, report, i)
        return None

    total = trials + len(targeted)
    if threads <= 1:
        for i in range(total):
            hit = run_trial(i)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool_exec:
        for hit in pool_exec.map(run_trial, range(total)):
            if hit is not None:
                return hit
    return None


# ---------------------------------------------------------------------------
# Canonical transforms
# ---------------------------------------------------------------------------


def bounded_transform(space: FiniteUltrametricSpace, d_star: Fraction) -> FiniteUltrametricSpace:
    """Rescale distances by t -> d*t/(1+t): every new distance is below d*."""
    return compose_metric(space, bounding_function(d_star))


def unbounded_transform(space: FiniteUltrametricSpace, d_star: Fraction) -> FiniteUltrametricSpace:
    """Invert the bounded transform via s -> s/(d*-s); needs distances < d*."""
    if d_star <= 0:
        raise InputError("the bound d* must be positive")
    worst = max(max(row) for row in space.dist)
    if worst >= d_star:
        raise InputError(
            f"distance {format_rational(worst)} is not below d* = {format_rational(d_star)}"
        )
    return compose_metric(space, unbounding_function(d_star))


# ---------------------------------------------------------------------------
# JSON format:
# {"pieces": [{"lo": "0", "lo_closed": true, "hi": "1", "hi_closed": true,
#              "form": {"affine": ["0", "0"]}}, ...]}
# Forms: {"affine": [slope, intercept]}, {"moebius": [c]}, {"inv_moebius": [c]}.
# "hi" may be "inf".
# ---------------------------------------------------------------------------


def _form_to_json(form: Form) -> dict:
    if isinstance(form, AffineForm):
        return {"affine": [format_rational(form.slope), format_rational(form.intercept)]}
    if isinstance(form, MoebiusForm):
        return {"moebius": [format_rational(form.c)]}
    return {"inv_moebius": [format_rational(form.c)]}


def _form_from_json(obj: dict) -> Form:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InputError(f"bad form object: {obj!r}")
    (kind, args), = obj.items()
    if kind == "affine":
        slope, intercept = (parse_rational(a) for a in args)
        return AffineForm(slope, intercept)
    if kind == "moebius":
        (c,) = (parse_rational(a) for a in args)
        return MoebiusForm(c)
    if kind == "inv_moebius":
        (c,) = (parse_rational(a) for a in args)
        return InverseMoebiusForm(c)
    raise InputError(f"unknown form kind {kind!r}")


def function_to_json(f: PiecewiseMonotone) -> dict:
    pieces = []
    for piece in f.pieces:
        iv = piece.interval
        pieces.append(
            {
                "lo": format_rational(iv.lo),
                "lo_closed": iv.lo_closed,
                "hi": "inf" if is_inf(iv.hi) else format_rational(iv.hi),  # type: ignore[arg-type]
                "hi_closed": iv.hi_closed,
                "form": _form_to_json(piece.form),
            }
        )
    return {"pieces": pieces}


def function_from_json(obj: dict) -> PiecewiseMonotone:
    try:
        raw_pieces = obj["pieces"]
    except (KeyError, TypeError):
        raise InputError("function JSON needs 'pieces'") from None
    pieces = []
    for raw in raw_pieces:
        hi_raw = raw["hi"]
        hi: Bound = INF if hi_raw in ("inf", "+inf", None) else parse_rational(hi_raw)
        iv = Interval(parse_rational(raw["lo"]), hi, bool(raw["lo_closed"]), bool(raw["hi_closed"]))
        pieces.append(Piece(iv, _form_from_json(raw["form"])))
    return PiecewiseMonotone(tuple(pieces))


def load_function(path: str) -> PiecewiseMonotone:
    with open(path, encoding="utf-8") as fh:
        return function_from_json(json.load(fh))
