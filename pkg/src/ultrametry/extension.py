"""Extension of scaling functions from a distance set to the half-line.

A symbolic scaling assigns exact images to every member of a distance-set
descriptor: finitely many point images plus, per sequence, a closed-form
image of the n-th term (alpha + beta/n^k, alpha + beta*n^k, or
alpha + beta*q^n), optionally preceded by a tabulated head of explicit
values.  Closed forms make suprema and infima at accumulation points exactly
computable, which is what the extension rules below need.

Three extension modes, gated by the regime of the base set:

* strict   -- piecewise rule: the scaling itself on the set, linear
              interpolation across open bounded gap components, a
              proportional ray on the open unbounded component, and the
              midpoint of the admissible bracket on singleton components.
              Available exactly when every component is open or a point.
* pseudo   -- the running-supremum rule g(t) = sup of images over [0, t];
              always an increasing extension unless the scaling is unbounded
              over a bounded set.
* ultra    -- the same supremum rule, made positive off zero by a linear
              ramp below an isolated minimal distance; unavailable when the
              nonzero distances accumulate above some positive value outside
              the set, or when the supremum is finite and unattained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .distsets import (
    ComponentDecomposition,
    DistanceSetDescriptor,
    Regime,
    RegimeTag,
    SequencePiece,
    classify,
    components,
    contains,
    descriptor_from_json,
    descriptor_to_json,
)
from .errors import InputError
from .rationals import (
    INF,
    Bound,
    Interval,
    IntervalShape,
    format_rational,
    is_inf,
    parse_rational,
)


# ---------------------------------------------------------------------------
# Sequence image forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerImage:
    """n -> alpha + beta / n**k; tends to alpha."""

    alpha: Fraction
    beta: Fraction
    k: int = 1


@dataclass(frozen=True)
class GrowthImage:
    """n -> alpha + beta * n**k; unbounded when beta > 0."""

    alpha: Fraction
    beta: Fraction
    k: int = 1


@dataclass(frozen=True)
class GeometricImage:
    """n -> alpha + beta * q**n; tends to alpha."""

    alpha: Fraction
    beta: Fraction
    q: Fraction


SequenceImage = Union[PowerImage, GrowthImage, GeometricImage]


def _image_value(img: SequenceImage, n: int) -> Fraction:
    if isinstance(img, PowerImage):
        return img.alpha + img.beta / Fraction(n**img.k)
    if isinstance(img, GrowthImage):
        return img.alpha + img.beta * Fraction(n**img.k)
    return img.alpha + img.beta * img.q**n


def _image_direction(img: SequenceImage) -> int:
    """Sign of the step from n to n+1."""
    if isinstance(img, GrowthImage):
        return (img.beta > 0) - (img.beta < 0)
    return (img.beta < 0) - (img.beta > 0)


def _image_limit(img: SequenceImage) -> Bound:
    if isinstance(img, GrowthImage) and img.beta > 0:
        return INF
    return img.alpha


@dataclass(frozen=True)
class SequenceRule:
    """Image of one base sequence: explicit head values for the first few
    indices, a closed form beyond."""

    image: SequenceImage
    head: tuple[tuple[int, Fraction], ...] = ()

    def head_end(self, n_start: int) -> int:
        """Last explicitly tabulated index; n_start - 1 when no head."""
        return n_start - 1 + len(self.head)

    def value(self, n: int) -> Fraction:
        for m, v in self.head:
            if m == n:
                return v
        return _image_value(self.image, n)


_Extreme = tuple[Bound, bool]  # (value, attained)


def _better(a: _Extreme | None, b: _Extreme | None, want_max: bool) -> _Extreme | None:
    if a is None:
        return b
    if b is None:
        return a
    va, aa = a
    vb, ab = b
    if va == vb:
        return (va, aa or ab)
    if (va > vb) == want_max:
        return a
    return b


def _rule_extreme(
    piece: SequencePiece, rule: SequenceRule, bounds: tuple[int, int | None] | None, want_max: bool
) -> _Extreme | None:
    """Exact sup (or inf) of the rule over the given index range."""
    if bounds is None:
        return None
    lo_n, hi_n = bounds
    head_end = rule.head_end(piece.n_start)
    best: _Extreme | None = None
    n = max(lo_n, piece.n_start)
    while n <= head_end and (hi_n is None or n <= hi_n):
        best = _better(best, (rule.value(n), True), want_max)
        n += 1
    c_lo = max(lo_n, head_end + 1)
    if hi_n is not None and c_lo > hi_n:
        return best
    direction = _image_direction(rule.image)
    if hi_n is None:
        toward_limit = (direction > 0) == want_max and direction != 0
        if toward_limit:
            best = _better(best, (_image_limit(rule.image), False), want_max)
        else:
            best = _better(best, (_image_value(rule.image, c_lo), True), want_max)
    else:
        at_lo = (_image_value(rule.image, c_lo), True)
        at_hi = (_image_value(rule.image, hi_n), True)
        best = _better(_better(best, at_lo, want_max), at_hi, want_max)
    return best


# ---------------------------------------------------------------------------
# Symbolic scalings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolicScaling:
    base: DistanceSetDescriptor
    point_images: tuple[tuple[Fraction, Fraction], ...]
    sequence_rules: tuple[SequenceRule, ...]
    strictly_increasing: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "point_images", tuple(sorted(self.point_images)))
        strict = _verify(self)
        object.__setattr__(self, "strictly_increasing", strict)

    # -- lookups -------------------------------------------------------------

    def point_image(self, p: Fraction) -> Fraction:
        for arg, v in self.point_images:
            if arg == p:
                return v
        raise InputError(f"{format_rational(p)} is not a point of the base set")

    def image_of(self, t: Fraction) -> Fraction:
        """Image of a member of the base set."""
        for arg, v in self.point_images:
            if arg == t:
                return v
        for piece, rule in zip(self.base.sequences, self.sequence_rules):
            n = piece.contains_term(t)
            if n is not None:
                return rule.value(n)
        raise InputError(f"{format_rational(t)} is not in the base set")

    # -- exact envelope ------------------------------------------------------

    def sup_le(self, t: Fraction) -> _Extreme:
        """sup of images over base members in [0, t], with attainment."""
        best: _Extreme | None = None
        for p, v in self.point_images:
            if p <= t:
                best = _better(best, (v, True), True)
        for piece, rule in zip(self.base.sequences, self.sequence_rules):
            rng = piece.indices_le(t).bounds(piece.n_start)
            best = _better(best, _rule_extreme(piece, rule, rng, True), True)
        assert best is not None  # 0 is always a member
        return best

    def inf_ge(self, t: Fraction) -> _Extreme | None:
        """inf of images over base members in [t, oo); None when empty."""
        best: _Extreme | None = None
        for p, v in self.point_images:
            if p >= t:
                best = _better(best, (v, True), False)
        for piece, rule in zip(self.base.sequences, self.sequence_rules):
            rng = piece.indices_ge(t).bounds(piece.n_start)
            best = _better(best, _rule_extreme(piece, rule, rng, False), False)
        return best

    # -- structural predicates -------------------------------------------------

    @property
    def has_unbounded_image(self) -> bool:
        return any(
            isinstance(rule.image, GrowthImage) and rule.image.beta > 0
            for rule in self.sequence_rules
        )

    @property
    def positive_on_nonzero(self) -> bool:
        for p, v in self.point_images:
            if p > 0 and v <= 0:
                return False
        for piece, rule in zip(self.base.sequences, self.sequence_rules):
            low = _rule_extreme(piece, rule, (piece.n_start, None), False)
            assert low is not None
            value, attained = low
            if attained and value <= 0:
                return False
            if not attained and value < 0:
                return False
        return True

    def minimal_positive_member(self) -> tuple[Fraction, Fraction] | None:
        """(m, image(m)) for the least positive member, when it is attained."""
        best_val: Fraction | None = None
        best_img: Fraction | None = None
        for p, v in self.point_images:
            if p > 0 and (best_val is None or p < best_val):
                best_val, best_img = p, v
        for piece, rule in zip(self.base.sequences, self.sequence_rules):
            lo, lo_att, _, _ = piece.hull()
            if not lo_att:
                if best_val is None or lo < best_val:
                    return None  # the infimum is a limit, not attained
                continue
            if best_val is None or lo < best_val:
                best_val, best_img = lo, rule.value(piece.n_start)
        if best_val is None:
            return None
        return best_val, best_img  # type: ignore[return-value]


def _pairwise_rules(strict: bool):
    """Comparison helpers honouring attainment of suprema and infima."""

    def sup_below_value(sup: _Extreme | None, v: Fraction) -> bool:
        if sup is None:
            return True
        sv, attained = sup
        if is_inf(sv):
            return False
        if attained and strict:
            return sv < v
        return sv <= v

    def value_below_inf(v: Fraction, inf: _Extreme | None) -> bool:
        if inf is None:
            return True
        iv, attained = inf
        assert not is_inf(iv)
        if attained and strict:
            return v < iv
        return v <= iv

    def sup_below_inf(sup: _Extreme | None, inf: _Extreme | None) -> bool:
        if sup is None or inf is None:
            return True
        sv, s_att = sup
        iv, i_att = inf
        if is_inf(sv):
            return False
        if s_att and i_att and strict:
            return sv < iv
        return sv <= iv

    return sup_below_value, value_below_inf, sup_below_inf


def _piece_monotone(piece: SequencePiece, rule: SequenceRule, strict: bool) -> bool:
    """Image must move with the terms: smaller term, smaller image."""
    base_dir = -1 if piece.is_decreasing else 1
    img_dir = _image_direction(rule.image)
    if strict:
        if img_dir != base_dir:
            return False
    else:
        if img_dir not in (0, base_dir):
            return False
    head_end = rule.head_end(piece.n_start)
    for n in range(piece.n_start, head_end + 1):
        v1, v2 = rule.value(n), rule.value(n + 1)
        step = (v2 > v1) - (v2 < v1)
        if strict:
            if step != base_dir:
                return False
        else:
            if step not in (0, base_dir):
                return False
    return True


def _rule_nonnegative(piece: SequencePiece, rule: SequenceRule) -> bool:
    low = _rule_extreme(piece, rule, (piece.n_start, None), False)
    assert low is not None
    value, attained = low
    if is_inf(value):
        return False
    return value >= 0 if not attained else value >= 0


def _verify(scaling: SymbolicScaling) -> bool:
    """Check increasing-ness (raises) and return whether it is strict."""
    base = scaling.base
    if tuple(p for p, _ in scaling.point_images) != base.points:
        raise InputError("point images must cover exactly the base points")
    if len(scaling.sequence_rules) != len(base.sequences):
        raise InputError("one sequence image rule per base sequence is required")
    if scaling.point_image(Fraction(0)) != 0:
        raise InputError("a scaling maps 0 to 0")
    for _, v in scaling.point_images:
        if v < 0:
            raise InputError("images must be nonnegative")
    for piece, rule in zip(base.sequences, scaling.sequence_rules):
        expected = tuple(range(piece.n_start, piece.n_start + len(rule.head)))
        if tuple(n for n, _ in rule.head) != expected:
            raise InputError("head values must cover a contiguous index prefix")
        if any(v < 0 for _, v in rule.head):
            raise InputError("images must be nonnegative")
        if isinstance(rule.image, GrowthImage) and rule.image.beta < 0:
            raise InputError("a growth image with negative slope turns negative")
        if not _rule_nonnegative(piece, rule):
            raise InputError("images must be nonnegative")

    def consistent(strict: bool) -> bool:
        sup_below_value, value_below_inf, sup_below_inf = _pairwise_rules(strict)
        for piece, rule in zip(base.sequences, scaling.sequence_rules):
            if not _piece_monotone(piece, rule, strict):
                return False
        pts = scaling.point_images
        for (p1, v1), (p2, v2) in zip(pts, pts[1:]):
            if strict and not v1 < v2:
                return False
            if not strict and not v1 <= v2:
                return False
        for p, v in pts:
            for piece, rule in zip(base.sequences, scaling.sequence_rules):
                below = _rule_extreme(piece, rule, piece.indices_le(p).bounds(piece.n_start), True)
                if not sup_below_value(below, v):
                    return False
                above = _rule_extreme(piece, rule, piece.indices_ge(p).bounds(piece.n_start), False)
                if not value_below_inf(v, above):
                    return False
        seqs = list(zip(base.sequences, scaling.sequence_rules))
        seqs.sort(key=lambda pr: pr[0].hull()[0])
        for i in range(len(seqs)):
            for j in range(i + 1, len(seqs)):
                (pa, ra), (pb, rb) = seqs[i], seqs[j]
                sup_a = _rule_extreme(pa, ra, (pa.n_start, None), True)
                inf_b = _rule_extreme(pb, rb, (pb.n_start, None), False)
                if not sup_below_inf(sup_a, inf_b):
                    return False
        return True

    if not consistent(strict=False):
        raise InputError("the images are not increasing over the base set")
    return consistent(strict=True)


# ---------------------------------------------------------------------------
# Extension results
# ---------------------------------------------------------------------------


class ExtendedFunction:
    """Lazily evaluable extension; exact at every nonnegative rational."""

    def __init__(self, scaling: SymbolicScaling, mode: str):
        if mode not in ("strict", "sup", "sup_ultra"):
            raise InputError(f"unknown extension mode {mode!r}")
        self.scaling = scaling
        self.mode = mode
        self._decomposition: ComponentDecomposition = components(scaling.base)
        self._ramp = scaling.minimal_positive_member() if mode == "sup_ultra" else None

    def _locate(self, t: Fraction) -> Interval:
        for entry in self._decomposition.entries:
            if isinstance(entry, Interval) and entry.contains(t):
                return entry
        for fam in self._decomposition.families:
            if fam.contains(t):
                n = fam.piece.gap_index_of(t)
                assert n is not None
                lo, hi = fam.piece.gap_bounds(n)
                return Interval(lo, hi, False, False)
        raise AssertionError(f"no component contains {t}")

    def eval(self, t: Fraction) -> Fraction:
        if t < 0:
            raise InputError("extensions are defined on nonnegative rationals")
        if contains(self.scaling.base, t):
            return self.scaling.image_of(t)
        if self.mode == "strict":
            return self._eval_strict(t)
        return self._eval_sup(t)

    def _eval_strict(self, t: Fraction) -> Fraction:
        comp = self._locate(t)
        shape = comp.shape
        if shape is IntervalShape.OPEN:
            a, b = comp.lo, comp.hi
            va = self.scaling.image_of(a)
            vb = self.scaling.image_of(b)  # type: ignore[arg-type]
            return va + (vb - va) / (b - a) * (t - a)  # type: ignore[operator]
        if shape is IntervalShape.OPEN_RAY:
            a = comp.lo
            if a == 0:
                return t
            return self.scaling.image_of(a) / a * t
        if shape is IntervalShape.SINGLETON:
            below, _ = self.scaling.sup_le(t)
            above = self.scaling.inf_ge(t)
            assert above is not None and not is_inf(below)
            return (below + above[0]) / 2  # type: ignore[operator]
        raise AssertionError(f"component {comp} should have blocked strict extension")

    def _eval_sup(self, t: Fraction) -> Fraction:
        value, _ = self.scaling.sup_le(t)
        assert not is_inf(value)
        if self.mode == "sup_ultra" and value == 0 and t > 0:
            if self._ramp is None:
                return t
            m, vm = self._ramp
            return vm * t / m
        return value  # type: ignore[return-value]


@dataclass(frozen=True)
class Extended:
    g: ExtendedFunction


@dataclass(frozen=True)
class Blocked:
    regime: Regime
    reason: str

    def __str__(self) -> str:
        return f"Blocked({self.regime.tag.value}), witness component {self.regime.witness}: {self.reason}"


ExtensionResult = Union[Extended, Blocked]


def _blocked_reason(regime: Regime, mode: str) -> str:
    w = regime.witness
    if regime.tag is RegimeTag.PSEUDO_BLOCKED:
        assert w is not None
        return (
            f"the set is bounded and its supremum {format_rational(w.lo)} is not attained; "
            "scalings with unbounded image admit no increasing extension"
        )
    if regime.tag is RegimeTag.ULTRA_BLOCKED:
        assert w is not None
        return (
            f"the nonzero distances accumulate at {format_rational(w.hi)} from above with "  # type: ignore[arg-type]
            "nothing below; scalings vanishing toward that point admit no extension "
            "that is positive away from 0"
        )
    return (
        f"component {w} is neither open nor a single point; a scaling collapsing its gap "
        "admits no strictly increasing extension"
    )


def extend_strict(psi: SymbolicScaling) -> ExtensionResult:
    """Strictly increasing extension, available exactly in the open-components regime."""
    if not psi.strictly_increasing:
        raise InputError("strict extension needs a strictly increasing scaling")
    regime = classify(psi.base)
    if regime.tag is not RegimeTag.ALL_EXTEND:
        return Blocked(regime, _blocked_reason(regime, "strict"))
    return Extended(ExtendedFunction(psi, "strict"))


def extend_pseudo(psi: SymbolicScaling) -> ExtensionResult:
    """Increasing extension by the running-supremum rule.

    Fails only when the scaling is unbounded over a bounded base set: any
    increasing extension would be bounded by its value at the supremum.
    """
    regime = classify(psi.base)
    if regime.tag is RegimeTag.PSEUDO_BLOCKED and psi.has_unbounded_image:
        return Blocked(regime, _blocked_reason(regime, "pseudo"))
    return Extended(ExtendedFunction(psi, "sup"))


def extend_ultra(psi: SymbolicScaling) -> ExtensionResult:
    """Increasing extension that stays positive off zero."""
    if not psi.positive_on_nonzero:
        raise InputError("this mode needs positive images at all nonzero members")
    regime = classify(psi.base)
    if regime.tag in (RegimeTag.ULTRA_BLOCKED, RegimeTag.PSEUDO_BLOCKED):
        return Blocked(regime, _blocked_reason(regime, "ultra"))
    return Extended(ExtendedFunction(psi, "sup_ultra"))


# ---------------------------------------------------------------------------
# Gap collapse
# ---------------------------------------------------------------------------


def _identity_image(piece: SequencePiece, shift: Fraction) -> SequenceImage:
    from .distsets import SequenceFamily

    fam = piece.family
    if fam is SequenceFamily.POWER_DECREASING:
        return PowerImage(piece.a - shift, piece.b, piece.k)
    if fam is SequenceFamily.POWER_INCREASING:
        return PowerImage(piece.a - shift, -piece.b, piece.k)
    if fam is SequenceFamily.GEOMETRIC_DECREASING:
        return GeometricImage(piece.a - shift, piece.b, piece.q)  # type: ignore[arg-type]
    if fam is SequenceFamily.GEOMETRIC_INCREASING:
        return GeometricImage(piece.a - shift, -piece.b, piece.q)  # type: ignore[arg-type]
    return GrowthImage(-shift, piece.b, piece.k)


def gap_collapse_scaling(base: DistanceSetDescriptor, a: Fraction, b: Fraction) -> SymbolicScaling:
    """The strictly increasing scaling that slides everything above a
    half-open complement component [a, b) or (a, b] down by b - a.

    Members below the gap keep their value, members above lose b - a; the
    image set then accumulates exactly at the collapsed edge, which is what
    makes every strictly increasing extension impossible.
    """
    target = None
    for entry in components(base).intervals:
        if entry.lo == a and entry.hi == b and entry.shape in (
            IntervalShape.CLOSED_LEFT,
            IntervalShape.CLOSED_RIGHT,
        ):
            target = entry
            break
    if target is None:
        raise InputError(
            f"[{format_rational(a)},{format_rational(b)}) or "
            f"({format_rational(a)},{format_rational(b)}] is not a component of the complement"
        )
    offset = b - a
    point_images = []
    for p in base.points:
        point_images.append((p, p if p < b else p - offset))
    rules = []
    for piece in base.sequences:
        above = piece.indices_ge(b)
        if above.kind == "none":
            rules.append(SequenceRule(_identity_image(piece, Fraction(0))))
        elif above.kind == "all" or (above.kind == "tail" and above.n == piece.n_start):
            rules.append(SequenceRule(_identity_image(piece, offset)))
        elif above.kind == "tail":
            assert above.n is not None
            head = tuple((n, piece.term(n)) for n in range(piece.n_start, above.n))
            rules.append(SequenceRule(_identity_image(piece, offset), head))
        else:  # head: finitely many terms above the gap
            assert above.n is not None
            head = tuple((n, piece.term(n) - offset) for n in range(piece.n_start, above.n + 1))
            rules.append(SequenceRule(_identity_image(piece, Fraction(0)), head))
    return SymbolicScaling(base, tuple(point_images), tuple(rules))


# ---------------------------------------------------------------------------
# JSON format:
# {"base": <descriptor>,
#  "point_images": {"0": "0", "1": "2"},
#  "sequence_images": [{"alpha": "1", "beta": "1", "k": 1}]}
# Image forms: {"alpha","beta","k"} for alpha + beta/n^k;
# {"alpha","beta"} for alpha + beta*n; {"alpha","beta","kind":"growth","k":2}
# for alpha + beta*n^k; {"alpha","beta","q"} for alpha + beta*q^n.
# An image may carry "head": {"1": "5/2", ...} of explicit leading values.
# ---------------------------------------------------------------------------


def _image_to_json(img: SequenceImage) -> dict:
    obj: dict = {"alpha": format_rational(img.alpha), "beta": format_rational(img.beta)}
    if isinstance(img, PowerImage):
        obj["k"] = img.k
    elif isinstance(img, GrowthImage):
        if img.k != 1:
            obj["kind"] = "growth"
            obj["k"] = img.k
    else:
        obj["q"] = format_rational(img.q)
    return obj


def _image_from_json(obj: dict) -> tuple[SequenceImage, tuple[tuple[int, Fraction], ...]]:
    alpha = parse_rational(obj["alpha"])
    beta = parse_rational(obj["beta"])
    head = tuple(sorted((int(n), parse_rational(v)) for n, v in obj.get("head", {}).items()))
    if "q" in obj:
        return GeometricImage(alpha, beta, parse_rational(obj["q"])), head
    if obj.get("kind") == "growth":
        return GrowthImage(alpha, beta, int(obj.get("k", 1))), head
    if "k" in obj:
        return PowerImage(alpha, beta, int(obj["k"])), head
    return GrowthImage(alpha, beta, 1), head


def scaling_to_json(psi: SymbolicScaling) -> dict:
    images = []
    for rule in psi.sequence_rules:
        obj = _image_to_json(rule.image)
        if rule.head:
            obj["head"] = {str(n): format_rational(v) for n, v in rule.head}
        images.append(obj)
    return {
        "base": descriptor_to_json(psi.base),
        "point_images": {format_rational(p): format_rational(v) for p, v in psi.point_images},
        "sequence_images": images,
    }


def scaling_from_json(obj: dict) -> SymbolicScaling:
    try:
        base = descriptor_from_json(obj["base"])
        raw_points = obj["point_images"]
    except (KeyError, TypeError):
        raise InputError("scaling JSON needs 'base' and 'point_images'") from None
    point_images = tuple((parse_rational(p), parse_rational(v)) for p, v in raw_points.items())
    rules = []
    for raw in obj.get("sequence_images", []):
        image, head = _image_from_json(raw)
        rules.append(SequenceRule(image, head))
    return SymbolicScaling(base, point_images, tuple(rules))


def load_scaling(path: str) -> SymbolicScaling:
    with open(path, encoding="utf-8") as fh:
        return scaling_from_json(json.load(fh))
