"""
Exact arithmetic on finite and periodic unions of half-open intervals [a, b).

Endpoints are ``Fraction`` (exact) or ``float``; float endpoints closer than
the snap tolerance are treated as equal while normalizing.
"""

import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import logging

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]
Interval = Tuple[Number, Number]

SNAP = 1e-9


class IntervalError(ValueError):
    """Raised for inverted intervals, nonpositive thickening and unbounded queries."""


def to_number(value: Union[Number, int, str]) -> Number:
    """Rationals stay exact; strings such as "0.3" or "1/3" are read as fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise IntervalError(f"cannot read endpoint {value!r}") from None
    value = float(value)
    if not math.isfinite(value):
        raise IntervalError("interval endpoints must be finite")
    return value


def _equal(a: Number, b: Number, snap: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) <= snap


def _floor_div(value: Number, period: Number) -> int:
    return math.floor(value / period)


def _merge(intervals: Iterable[Interval], snap: float) -> List[Interval]:
    ordered = sorted((a, b) for a, b in intervals if not _equal(a, b, snap) and b > a)
    merged: List[Interval] = []
    for a, b in ordered:
        if merged and (a < merged[-1][1] or _equal(a, merged[-1][1], snap)):
            if b > merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


class IntervalSet:
    """
    Sorted disjoint half-open intervals, optionally repeated with ``period``.

    A periodic set stores its template inside [0, period); the set itself is
    the union of template + n * period over all integers n.
    """

    def __init__(self, intervals: Iterable[Tuple[Union[Number, int, str], Union[Number, int, str]]] = (),
                 period: Optional[Union[Number, int, str]] = None, snap: float = SNAP):
        self.snap = snap
        raw = []
        for a, b in intervals:
            a, b = to_number(a), to_number(b)
            if b < a and not _equal(a, b, snap):
                raise IntervalError(f"inverted interval [{a}, {b})")
            raw.append((a, b))
        self.period: Optional[Number] = None
        if period is not None:
            period = to_number(period)
            if period <= 0:
                raise IntervalError("period must be positive")
            self.period = period
            raw = self._wrap(raw, period)
        self.intervals: List[Interval] = _merge(raw, snap)

    @classmethod
    def _clean(cls, intervals: List[Interval], period: Optional[Number], snap: float) -> 'IntervalSet':
        result = cls.__new__(cls)
        result.snap = snap
        result.period = period
        result.intervals = _merge(cls._wrap(intervals, period) if period is not None else intervals, snap)
        return result

    @staticmethod
    def _wrap(intervals: Iterable[Interval], period: Number) -> List[Interval]:
        wrapped: List[Interval] = []
        for a, b in intervals:
            if b - a >= period:
                return [(period * 0, period)]
            shift = _floor_div(a, period) * period
            a, b = a - shift, b - shift
            if b > period:
                wrapped.extend([(a, period), (period * 0, b - period)])
            else:
                wrapped.append((a, b))
        return wrapped

    # Inspection ----------------------------------------------------------

    @property
    def periodic(self) -> bool:
        return self.period is not None

    def is_empty(self) -> bool:
        return not self.intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.period == other.period and self.intervals == other.intervals

    def __repr__(self) -> str:
        body = ' U '.join(f"[{a}, {b})" for a, b in self.intervals) or 'empty'
        return f"IntervalSet({body}{f', period={self.period}' if self.period is not None else ''})"

    def contains(self, x: Number) -> bool:
        if self.period is not None:
            x = x - _floor_div(x, self.period) * self.period
        return any(a <= x < b for a, b in self.intervals)

    def hull(self) -> Tuple[Number, Number]:
        if self.period is not None:
            raise IntervalError("a periodic set is unbounded")
        if not self.intervals:
            raise IntervalError("the empty set has no hull")
        return self.intervals[0][0], self.intervals[-1][1]

    # Materialization --------------------------------------------------------

    def materialize(self, window: Tuple[Number, Number]) -> 'IntervalSet':
        """The part of the set inside [lo, hi) as a finite set."""
        lo, hi = to_number(window[0]), to_number(window[1])
        if hi < lo:
            raise IntervalError(f"inverted window [{lo}, {hi})")
        if self.period is None:
            pieces = self.intervals
        else:
            first, last = _floor_div(lo, self.period), _floor_div(hi, self.period)
            pieces = [(a + n * self.period, b + n * self.period)
                      for n in range(first, last + 1) for a, b in self.intervals]
        clipped = [(max(a, lo), min(b, hi)) for a, b in pieces if b > lo and a < hi]
        return IntervalSet._clean(clipped, None, self.snap)

    def measure(self, window: Optional[Tuple[Number, Number]] = None) -> Number:
        """Lebesgue measure, of the whole set or of its part inside ``window``."""
        if window is None:
            if self.period is not None:
                raise IntervalError("a nonempty periodic set has infinite measure; pass a window")
            return sum((b - a for a, b in self.intervals), Fraction(0))
        return self.materialize(window).measure()

    def density(self) -> Number:
        """Measure per period of a periodic set."""
        if self.period is None:
            raise IntervalError("density per period needs a periodic set")
        return sum((b - a for a, b in self.intervals), Fraction(0)) / self.period

    # Set algebra ----------------------------------------------------------------

    def _common_period(self, other: 'IntervalSet') -> Optional[Number]:
        p, q = self.period, other.period
        if p is None or q is None:
            return None
        if _equal(p, q, self.snap):
            return p
        if isinstance(p, Fraction) and isinstance(q, Fraction):
            numerator = math.lcm(p.numerator * q.denominator, q.numerator * p.denominator)
            return Fraction(numerator, p.denominator * q.denominator)
        return None

    def _repeated(self, period: Number) -> List[Interval]:
        assert self.period is not None
        copies = round(period / self.period)
        return [(a + n * self.period, b + n * self.period) for n in range(copies) for a, b in self.intervals]

    def _binary(self, other: 'IntervalSet', window: Optional[Tuple[Number, Number]],
                combine: str) -> 'IntervalSet':
        if window is not None:
            left, right = self.materialize(window), other.materialize(window)
            return _combine(left.intervals, right.intervals, None, combine, self.snap)
        if self.period is None and other.period is None:
            return _combine(self.intervals, other.intervals, None, combine, self.snap)
        period = self._common_period(other)
        if period is not None:
            return _combine(self._repeated(period), other._repeated(period), period, combine, self.snap)
        if combine == 'intersect' and (self.period is None or other.period is None):
            finite = self if self.period is None else other
            if finite.is_empty():
                return IntervalSet(snap=self.snap)
            return self._binary(other, finite.hull(), combine)
        raise IntervalError("periods are incommensurable or the result is unbounded; pass a window")

    def union(self, other: 'IntervalSet', window: Optional[Tuple[Number, Number]] = None) -> 'IntervalSet':
        return self._binary(other, window, 'union')

    def intersect(self, other: 'IntervalSet', window: Optional[Tuple[Number, Number]] = None) -> 'IntervalSet':
        return self._binary(other, window, 'intersect')

    def __or__(self, other: 'IntervalSet') -> 'IntervalSet':
        return self.union(other)

    def __and__(self, other: 'IntervalSet') -> 'IntervalSet':
        return self.intersect(other)

    def translate(self, v: Union[Number, int, str]) -> 'IntervalSet':
        """E + v."""
        v = to_number(v)
        return IntervalSet._clean([(a + v, b + v) for a, b in self.intervals], self.period, self.snap)

    def thicken(self, delta: Union[Number, int, str]) -> 'IntervalSet':
        """E_delta: points within distance delta of E."""
        delta = to_number(delta)
        if delta <= 0:
            raise IntervalError("thickening radius must be positive")
        return IntervalSet._clean([(a - delta, b + delta) for a, b in self.intervals], self.period, self.snap)


def _combine(left: Sequence[Interval], right: Sequence[Interval], period: Optional[Number],
             combine: str, snap: float) -> IntervalSet:
    if combine == 'union':
        return IntervalSet._clean(list(left) + list(right), period, snap)
    pieces: List[Interval] = []
    i = j = 0
    while i < len(left) and j < len(right):
        a, b = max(left[i][0], right[j][0]), min(left[i][1], right[j][1])
        if b > a:
            pieces.append((a, b))
        if left[i][1] < right[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet._clean(pieces, period, snap)


def normalize(intervals: Iterable[Tuple[Union[Number, int, str], Union[Number, int, str]]],
              period: Optional[Union[Number, int, str]] = None) -> IntervalSet:
    return IntervalSet(intervals, period)


def load_interval_set(path: Union[str, Path], snap: float = SNAP) -> IntervalSet:
    """
    Read lines "a,b" (one interval each); an optional "period=q" header marks
    a periodic set. Blank lines and '#' comments are skipped.
    """
    period = None
    intervals = []
    with open(path, 'r') as f:
        for number, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if line.startswith('period='):
                period = line.split('=', 1)[1]
                continue
            parts = line.split(',')
            if len(parts) != 2:
                raise IntervalError(f"{path}:{number}: expected 'a,b', got {line!r}")
            intervals.append((parts[0], parts[1]))
    result = IntervalSet(intervals, period, snap)
    logger.info(f"Loaded {len(result)} intervals from {path}" + (f" (period {result.period})" if period else ""))
    return result


def dump_interval_set(E: IntervalSet, path: Union[str, Path]) -> None:
    with open(path, 'w') as f:
        if E.period is not None:
            f.write(f"period={E.period}\n")
        for a, b in E:
            f.write(f"{a},{b}\n")
