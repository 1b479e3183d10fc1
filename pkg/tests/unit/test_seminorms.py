"""
Unit tests for the seminorms module.
"""

import math

import numpy as np
import pytest

from polyflow.flows import ErgodicityError
from polyflow.observables import TrigPoly, random_trig_poly
from polyflow.seminorms import CLOSED_FORM, RECURSION, closed_form, hk_seminorm


class TestClosedForm:
    """Test cases for the Fourier closed form."""

    def test_character(self) -> None:
        """Test a single character: zero for k = 1, one for k >= 2."""
        f = TrigPoly.character((1,))
        assert hk_seminorm(f, 1).value == 0
        assert hk_seminorm(f, 2).value == pytest.approx(1.0)
        assert hk_seminorm(f, 3).value == pytest.approx(1.0)

    def test_k_one_is_the_mean(self) -> None:
        """Test that ||f||_1 is the absolute integral."""
        f = TrigPoly(1, {(0,): -0.3, (1,): 0.7})
        assert closed_form(f, 1) == pytest.approx(0.3)

    def test_two_terms(self) -> None:
        """Test (sum |c|^4)^(1/4) for k = 2."""
        f = TrigPoly(1, {(1,): 0.5, (2,): 0.5})
        assert closed_form(f, 2) == pytest.approx(0.125 ** 0.25)

    def test_two_terms_cube_integral(self) -> None:
        """Test k = 3, which is not the l^8 norm of the coefficients."""
        f = TrigPoly(1, {(1,): 0.5, (2,): 0.5})
        assert closed_form(f, 3) == pytest.approx(2 ** -0.625)
        assert closed_form(f, 3) > closed_form(f, 2)

    def test_constant(self) -> None:
        """Test |c| for every order."""
        f = TrigPoly.constant(1, -0.4)
        assert [closed_form(f, k) for k in range(1, 5)] == pytest.approx([0.4] * 4)

    def test_monotone_in_k(self) -> None:
        """Test ||f||_k <= ||f||_(k+1)."""
        f = TrigPoly(2, {(0, 0): 0.2, (1, 0): 0.5, (0, -1): 0.3})
        values = [hk_seminorm(f, k).value for k in range(1, 5)]
        assert values == sorted(values)

    def test_record(self) -> None:
        """Test the serialised value."""
        value = hk_seminorm(TrigPoly.character((1,)), 2)
        assert value.method == CLOSED_FORM
        assert value.to_dict() == {'k': 2, 'value': value.value, 'method': CLOSED_FORM, 'N': None}


class TestRecursion:
    """Test cases for the finite-N recursion estimate."""

    def test_agrees_with_closed_form(self) -> None:
        """Test one recursion level against the closed form."""
        f = TrigPoly(1, {(1,): 0.5, (2,): 0.5})
        estimate = hk_seminorm(f, 2, method=RECURSION, N=500)
        assert estimate.N == 500
        assert estimate.value == pytest.approx(closed_form(f, 2), abs=0.05)

    def test_two_levels(self) -> None:
        """Test a deeper recursion on T^2."""
        f = TrigPoly(2, {(1, 0): 0.6, (0, 1): 0.4})
        estimate = hk_seminorm(f, 3, method=RECURSION, N=60, levels=2)
        assert estimate.value == pytest.approx(closed_form(f, 3), abs=0.05)

    def test_zero_levels(self) -> None:
        """Test that zero levels fall back to the closed form."""
        f = TrigPoly(1, {(1,): 0.5, (3,): 0.5})
        assert hk_seminorm(f, 2, method=RECURSION, levels=0).value == pytest.approx(closed_form(f, 2))


class TestSeminormErrors:
    """Test cases for rejected inputs."""

    def test_invalid_order_and_method(self) -> None:
        """Test k < 1 and unknown methods."""
        f = TrigPoly.character((1,))
        with pytest.raises(ValueError):
            hk_seminorm(f, 0)
        with pytest.raises(ValueError):
            hk_seminorm(f, 2, method='gowers')

    def test_rational_rotation(self) -> None:
        """Test that a rational rotation of the circle is rejected."""
        with pytest.raises(ErgodicityError):
            hk_seminorm(TrigPoly.character((1,)), 2, gamma=[0.5])

    def test_rotation_with_relation(self) -> None:
        """Test that a rotation of T^2 with an integer relation is rejected."""
        f = TrigPoly.character((1, 0))
        with pytest.raises(ErgodicityError):
            hk_seminorm(f, 2, gamma=[math.sqrt(2), 2 * math.sqrt(2)])

    def test_dimension_mismatch(self) -> None:
        """Test a rotation that does not fit the observable."""
        with pytest.raises(ValueError):
            hk_seminorm(TrigPoly.character((1,)), 2, gamma=[math.sqrt(2), math.sqrt(3)])

    def test_recursion_parameters(self) -> None:
        """Test N and levels validation."""
        with pytest.raises(ValueError):
            hk_seminorm(TrigPoly.character((1,)), 2, method=RECURSION, N=0)


class TestRandomObservables:
    """Test cases over seeded random trigonometric polynomials."""

    def test_recursion_matches_closed_form(self, rng: np.random.Generator) -> None:
        """Test one recursion level at N = 500 for k = 2."""
        for _ in range(10):
            f = random_trig_poly(1, 3, rng)
            estimate = hk_seminorm(f, 2, method=RECURSION, N=500).value
            assert estimate == pytest.approx(closed_form(f, 2), abs=0.05)

    def test_monotone_in_k(self, rng: np.random.Generator) -> None:
        """Test ||f||_k <= ||f||_(k+1) for k up to three."""
        for _ in range(10):
            f = random_trig_poly(1, 3, rng)
            values = [closed_form(f, k) for k in range(1, 5)]
            assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
