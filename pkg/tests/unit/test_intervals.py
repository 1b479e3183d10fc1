"""
Unit tests for the intervals module.
"""

from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

import pytest
from hypothesis import given, settings, strategies as st

from polyflow.intervals import IntervalError, IntervalSet, dump_interval_set, load_interval_set, to_number


def _intervals() -> st.SearchStrategy:
    endpoint = st.fractions(min_value=-5, max_value=5, max_denominator=12)
    pair = st.tuples(endpoint, endpoint).map(lambda p: (min(p), max(p)))
    return st.lists(pair, max_size=5)


class TestIntervalSet:
    """Test cases for finite interval sets."""

    def test_normalization(self) -> None:
        """Test sorting, merging of touching intervals and dropping empties."""
        E = IntervalSet([(2, 3), (0, 1), (1, 2), (5, 5)])
        assert E.intervals == [(0, 3)]
        assert E.measure() == 3

    def test_string_endpoints_are_exact(self) -> None:
        """Test that decimal strings become fractions."""
        E = IntervalSet([("0.1", "0.3")])
        assert E.intervals == [(Fraction(1, 10), Fraction(3, 10))]
        assert to_number("1/3") == Fraction(1, 3)

    def test_half_open(self) -> None:
        """Test membership at the endpoints."""
        E = IntervalSet([(0, 1)])
        assert E.contains(0)
        assert not E.contains(1)

    def test_invalid(self) -> None:
        """Test inverted intervals and unreadable endpoints."""
        with pytest.raises(IntervalError):
            IntervalSet([(1, 0)])
        with pytest.raises(IntervalError):
            IntervalSet([("a", "1")])
        with pytest.raises(IntervalError):
            IntervalSet([(0, float('inf'))])

    def test_float_snap(self) -> None:
        """Test that nearly touching float intervals merge."""
        E = IntervalSet([(0.0, 0.1 + 0.2), (0.3, 0.5)])
        assert len(E) == 1

    def test_set_algebra(self) -> None:
        """Test union, intersection and translation."""
        E = IntervalSet([(0, 2), (4, 6)])
        F = IntervalSet([(1, 5)])
        assert (E & F).intervals == [(1, 2), (4, 5)]
        assert (E | F).intervals == [(0, 6)]
        assert E.translate("1/2").intervals == [(Fraction(1, 2), Fraction(5, 2)), (Fraction(9, 2), Fraction(13, 2))]

    def test_thicken(self) -> None:
        """Test E_delta and its positivity requirement."""
        E = IntervalSet([(0, 1), (2, 3)])
        assert E.thicken("1/2").intervals == [(Fraction(-1, 2), Fraction(7, 2))]
        with pytest.raises(IntervalError):
            E.thicken(0)

    def test_hull(self) -> None:
        """Test the convex hull and its failure cases."""
        assert IntervalSet([(1, 2), (5, 7)]).hull() == (1, 7)
        with pytest.raises(IntervalError):
            IntervalSet().hull()

    @settings(max_examples=50, deadline=None)
    @given(_intervals(), _intervals())
    def test_inclusion_exclusion(self, left: List[Tuple[Fraction, Fraction]],
                                 right: List[Tuple[Fraction, Fraction]]) -> None:
        """Test m(E u F) + m(E n F) = m(E) + m(F) exactly."""
        E, F = IntervalSet(left), IntervalSet(right)
        assert (E | F).measure() + (E & F).measure() == E.measure() + F.measure()

    @settings(max_examples=50, deadline=None)
    @given(_intervals(), st.fractions(min_value=Fraction(1, 100), max_value=1))
    def test_thickening_is_monotone(self, intervals: List[Tuple[Fraction, Fraction]], delta: Fraction) -> None:
        """Test E in E_delta and m(E_delta) <= m(E) + 2 delta |E|."""
        E = IntervalSet(intervals)
        thick = E.thicken(delta)
        assert (E & thick) == E
        assert thick.measure() <= E.measure() + 2 * delta * len(E)


class TestPeriodicSets:
    """Test cases for periodic interval sets."""

    def test_wrapping(self) -> None:
        """Test that the template is folded into one period."""
        E = IntervalSet([("0.8", "1.2")], period=1)
        assert E.intervals == [(0, Fraction(1, 5)), (Fraction(4, 5), 1)]
        assert E.contains(Fraction(21, 10))

    def test_full_period(self) -> None:
        """Test that an interval longer than the period covers everything."""
        assert IntervalSet([(0, 3)], period=2).density() == 1

    def test_thickened_density(self) -> None:
        """Test [0, 0.3) + Z thickened by 0.05."""
        E = IntervalSet([(0, "0.3")], period=1)
        assert E.thicken("0.05").density() == Fraction(2, 5)

    def test_materialize(self) -> None:
        """Test the finite part inside a window."""
        E = IntervalSet([(0, "0.5")], period=1)
        part = E.materialize(("0.25", 2))
        assert part.intervals == [(Fraction(1, 4), Fraction(1, 2)), (1, Fraction(3, 2))]
        assert E.measure((0, 10)) == 5

    def test_unbounded_queries(self) -> None:
        """Test that whole-set measure and hull need a window."""
        E = IntervalSet([(0, "0.5")], period=1)
        with pytest.raises(IntervalError):
            E.measure()
        with pytest.raises(IntervalError):
            E.hull()
        with pytest.raises(IntervalError):
            IntervalSet([(0, 1)]).density()

    def test_commensurable_periods(self) -> None:
        """Test intersection of sets with periods 1/2 and 1/3."""
        E = IntervalSet([(0, "1/4")], period="1/2")
        F = IntervalSet([(0, "1/6")], period="1/3")
        both = E & F
        assert both.period == 1
        assert both.measure((0, 1)) == both.density()

    def test_incommensurable_union(self) -> None:
        """Test that unbounded results without a common period are rejected."""
        E = IntervalSet([(0, "0.5")], period=1)
        F = IntervalSet([(0, 0.5)], period=2 ** 0.5)
        with pytest.raises(IntervalError):
            E | F
        assert E.union(F, window=(0, 3)).measure() > 0

    def test_periodic_and_finite(self) -> None:
        """Test intersecting a periodic set with a finite one."""
        E = IntervalSet([(0, "0.5")], period=1)
        F = IntervalSet([(0, 3)])
        assert (E & F).measure() == Fraction(3, 2)


class TestIntervalFiles:
    """Test cases for the interval file format."""

    def test_load(self, periodic_file: str) -> None:
        """Test a periodic file."""
        E = load_interval_set(periodic_file)
        assert E.period == 1
        assert E.intervals == [(0, Fraction(3, 10))]

    def test_comments_and_errors(self, temp_dir: str) -> None:
        """Test comments, blank lines and malformed lines."""
        path = Path(temp_dir) / "finite.txt"
        path.write_text("# finite set\n\n0,1  # first\n2,3\n")
        assert load_interval_set(path).measure() == 2
        path.write_text("0,1,2\n")
        with pytest.raises(IntervalError):
            load_interval_set(path)

    def test_dump_and_load(self, temp_dir: str) -> None:
        """Test that a dumped set loads back unchanged."""
        E = IntervalSet([("1/3", "1/2"), (2, "5/2")], period=3)
        path = Path(temp_dir) / "dumped.txt"
        dump_interval_set(E, path)
        assert load_interval_set(path) == E
