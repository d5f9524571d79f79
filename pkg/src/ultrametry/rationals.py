"""Exact rational scalars, an infinity sentinel, and endpoint-flagged intervals.

Every numeric value in this package is a ``fractions.Fraction``: arbitrary
precision, always in lowest terms, denominator positive.  Floats never enter
any computation; they appear only in the optional decimal rendering helper,
which itself rounds with integer arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from .errors import InputError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (optional sign on p, q > 0) exactly."""
    s = text.strip()
    if not _RATIONAL_RE.match(s):
        raise InputError(f"not a rational literal: {text!r}")
    if "/" in s:
        num_s, den_s = s.split("/")
        den = int(den_s)
        if den == 0:
            raise InputError(f"zero denominator: {text!r}")
        return Fraction(int(num_s), den)
    return Fraction(int(s))


def format_rational(value: Fraction) -> str:
    """Render as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(value)


class PlusInfinity:
    """Singleton upper bound; compares strictly greater than every Fraction."""

    __slots__ = ()
    _instance: "PlusInfinity | None" = None

    def __new__(cls) -> "PlusInfinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("ultrametry.INF")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True


INF = PlusInfinity()

Bound = Union[Fraction, PlusInfinity]


def is_inf(x: object) -> bool:
    return x is INF


def format_bound(x: Bound, *, ascii_inf: bool = False) -> str:
    if is_inf(x):
        return "inf" if ascii_inf else "∞"
    return format_rational(x)  # type: ignore[arg-type]


class IntervalShape(Enum):
    OPEN = "Open"
    CLOSED_LEFT = "ClosedLeft"
    CLOSED_RIGHT = "ClosedRight"
    CLOSED = "Closed"
    SINGLETON = "Singleton"
    OPEN_RAY = "OpenRay"
    CLOSED_RAY = "ClosedRay"


@dataclass(frozen=True)
class Interval:
    """Interval on the nonnegative half-line with explicit endpoint flags.

    A singleton is encoded as lo == hi with both endpoints closed.  An
    unbounded interval has hi = INF and is necessarily open above.
    """

    lo: Fraction
    hi: Bound
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise InputError("interval endpoints must be nonnegative")
        if is_inf(self.hi):
            if self.hi_closed:
                raise InputError("an unbounded interval is open above")
        else:
            if self.lo > self.hi:  # type: ignore[operator]
                raise InputError("interval requires lo <= hi")
            if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
                raise InputError("a degenerate interval must be closed on both sides")

    @property
    def is_singleton(self) -> bool:
        return not is_inf(self.hi) and self.lo == self.hi

    @property
    def shape(self) -> IntervalShape:
        if self.is_singleton:
            return IntervalShape.SINGLETON
        if is_inf(self.hi):
            return IntervalShape.CLOSED_RAY if self.lo_closed else IntervalShape.OPEN_RAY
        if self.lo_closed and self.hi_closed:
            return IntervalShape.CLOSED
        if self.lo_closed:
            return IntervalShape.CLOSED_LEFT
        if self.hi_closed:
            return IntervalShape.CLOSED_RIGHT
        return IntervalShape.OPEN

    def contains(self, t: Fraction) -> bool:
        if t < self.lo or (t == self.lo and not self.lo_closed):
            return False
        if is_inf(self.hi):
            return True
        if t > self.hi or (t == self.hi and not self.hi_closed):  # type: ignore[operator]
            return False
        return True

    def __str__(self) -> str:
        if self.is_singleton:
            return "{%s}" % format_rational(self.lo)
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_rational(self.lo)},{format_bound(self.hi)}{right}"


def singleton(value: Fraction) -> Interval:
    return Interval(value, value, True, True)


def interval_contains(i: Interval, t: Fraction) -> bool:
    """Membership respecting endpoint flags; t must be nonnegative."""
    if t < 0:
        raise InputError("interval membership is defined on nonnegative rationals")
    return i.contains(t)


def intervals_disjoint(i: Interval, j: Interval) -> bool:
    """True iff no rational lies in both intervals."""
    if j.lo < i.lo or (j.lo == i.lo and i.lo_closed and not j.lo_closed):
        i, j = j, i
    # now i starts no later than j
    if is_inf(i.hi):
        return False
    if i.hi < j.lo:  # type: ignore[operator]
        return True
    if i.hi == j.lo:
        return not (i.hi_closed and j.lo_closed)
    return False


def int_kth_root_floor(x: int, k: int) -> int:
    """Largest n >= 0 with n**k <= x, for x >= 0 and k >= 1."""
    if x < 0 or k < 1:
        raise InputError("kth root needs x >= 0 and k >= 1")
    if x == 0:
        return 0
    if k == 1:
        return x
    n = 1 << (x.bit_length() // k + 1)
    while True:
        m = ((k - 1) * n + x // n ** (k - 1)) // k
        if m >= n:
            return n
        n = m


def least_n_with_pow_ge(r: Fraction, k: int) -> int:
    """Smallest positive integer n with n**k >= r."""
    if r <= 0:
        return 1
    n = max(1, int_kth_root_floor(r.numerator // r.denominator, k))
    while Fraction(n**k) < r:
        n += 1
    while n > 1 and Fraction((n - 1) ** k) >= r:
        n -= 1
    return n


def greatest_n_with_pow_le(r: Fraction, k: int) -> int | None:
    """Largest positive integer n with n**k <= r, or None when 1**k > r."""
    if r < 1:
        return None
    n = max(1, int_kth_root_floor(r.numerator // r.denominator, k))
    while Fraction((n + 1) ** k) <= r:
        n += 1
    while n > 1 and Fraction(n**k) > r:
        n -= 1
    if Fraction(n**k) > r:
        return None
    return n


def approx_decimal(value: Fraction, digits: int) -> str:
    """Round-half-even decimal rendering with exact integer arithmetic."""
    if digits < 0:
        raise InputError("digits must be nonnegative")
    neg = value < 0
    v = -value if neg else value
    scaled = round(v * 10**digits)
    whole, frac = divmod(scaled, 10**digits)
    body = f"{whole}.{frac:0{digits}d}" if digits else str(whole)
    return ("-" + body) if neg and scaled else body
