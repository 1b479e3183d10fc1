"""
Exact coefficients in Q[tau, 1/tau] for a single symbolic transcendental tau.

tau is rendered as ``pi``; distinct powers of tau are treated as linearly
independent over Q, which is what makes rank and equality tests decidable.
"""

import math
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union
import logging

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


class CoefficientFieldError(ValueError):
    """Raised when a result would leave Q[tau, 1/tau]."""


def format_rational(value: Fraction) -> str:
    """Render a rational as ``a`` or ``a/b``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``a`` or ``a/b`` (also accepts decimal literals)."""
    return Fraction(text.strip())


class Coeff:
    """
    Laurent polynomial sum_e r_e * tau^e with rational r_e.

    Instances are immutable; the empty term map is zero.
    """

    __slots__ = ('_terms', '_hash')

    def __init__(self, terms: Optional[Mapping[int, Scalar]] = None):
        cleaned: Dict[int, Fraction] = {}
        if terms:
            for exponent, value in terms.items():
                value = Fraction(value)
                if value:
                    cleaned[int(exponent)] = value
        self._terms = cleaned
        self._hash: Optional[int] = None

    @classmethod
    def _raw(cls, terms: Dict[int, Fraction]) -> 'Coeff':
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, value: Scalar) -> 'Coeff':
        """Constant coefficient."""
        value = Fraction(value)
        return cls._raw({0: value} if value else {})

    @classmethod
    def monomial(cls, value: Scalar, exponent: int) -> 'Coeff':
        """value * tau^exponent."""
        value = Fraction(value)
        return cls._raw({int(exponent): value} if value else {})

    @classmethod
    def coerce(cls, value: Union['Coeff', Scalar]) -> 'Coeff':
        if isinstance(value, Coeff):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"Cannot use {type(value).__name__} as an exact coefficient")

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(sorted(self._terms.items(), reverse=True))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def is_unit(self) -> bool:
        """Single-term coefficients r*tau^e are the units of the ring."""
        return len(self._terms) == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise CoefficientFieldError(f"{self} is not rational")
        return self._terms.get(0, Fraction(0))

    def exponent_range(self) -> Tuple[int, int]:
        if not self._terms:
            return (0, 0)
        return (min(self._terms), max(self._terms))

    # Arithmetic ---------------------------------------------------------

    def __add__(self, other: Union['Coeff', Scalar]) -> 'Coeff':
        if not isinstance(other, Coeff):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Coeff.rational(other)
        terms = dict(self._terms)
        for exponent, value in other._terms.items():
            total = terms.get(exponent, 0) + value
            if total:
                terms[exponent] = total
            else:
                terms.pop(exponent, None)
        return Coeff._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> 'Coeff':
        return Coeff._raw({e: -v for e, v in self._terms.items()})

    def __sub__(self, other: Union['Coeff', Scalar]) -> 'Coeff':
        if not isinstance(other, (Coeff, int, Fraction)):
            return NotImplemented
        return self + (-Coeff.coerce(other))

    def __rsub__(self, other: Scalar) -> 'Coeff':
        return Coeff.coerce(other) - self

    def __mul__(self, other: Union['Coeff', Scalar]) -> 'Coeff':
        if not isinstance(other, Coeff):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            factor = Fraction(other)
            if not factor:
                return Coeff()
            return Coeff._raw({e: v * factor for e, v in self._terms.items()})
        if len(other._terms) == 1:
            (oe, ov), = other._terms.items()
            return Coeff._raw({e + oe: v * ov for e, v in self._terms.items()})
        terms: Dict[int, Fraction] = {}
        for e1, v1 in self._terms.items():
            for e2, v2 in other._terms.items():
                exponent = e1 + e2
                total = terms.get(exponent, 0) + v1 * v2
                if total:
                    terms[exponent] = total
                else:
                    terms.pop(exponent, None)
        return Coeff._raw(terms)

    __rmul__ = __mul__

    def inverse(self) -> 'Coeff':
        if not self.is_unit():
            raise CoefficientFieldError(f"Cannot invert non-unit coefficient {self}")
        (exponent, value), = self._terms.items()
        return Coeff._raw({-exponent: 1 / value})

    def __truediv__(self, other: Union['Coeff', Scalar]) -> 'Coeff':
        if not isinstance(other, (Coeff, int, Fraction)):
            return NotImplemented
        other = Coeff.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero coefficient")
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> 'Coeff':
        return Coeff.coerce(other) / self

    def __pow__(self, exponent: int) -> 'Coeff':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Coeff.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def exact_div(self, other: 'Coeff') -> 'Coeff':
        """
        Divide when the quotient stays in Q[tau, 1/tau].

        Raises:
            CoefficientFieldError: if the division is not exact
        """
        other = Coeff.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero coefficient")
        if not self:
            return Coeff()
        if other.is_unit():
            return self / other

        n_lo, n_hi = self.exponent_range()
        d_lo, d_hi = other.exponent_range()
        remainder = [self._terms.get(e, Fraction(0)) for e in range(n_hi, n_lo - 1, -1)]
        divisor = [other._terms.get(e, Fraction(0)) for e in range(d_hi, d_lo - 1, -1)]
        if len(remainder) < len(divisor):
            raise CoefficientFieldError(f"{self} is not divisible by {other}")

        lead = divisor[0]
        quotient = []
        for i in range(len(remainder) - len(divisor) + 1):
            factor = remainder[i] / lead
            quotient.append(factor)
            if factor:
                for j, value in enumerate(divisor):
                    remainder[i + j] -= factor * value
        if any(remainder[len(quotient):]):
            raise CoefficientFieldError(f"{self} is not divisible by {other} in Q[pi, 1/pi]")

        top = n_hi - d_hi
        return Coeff({top - i: q for i, q in enumerate(quotient)})

    # Comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Coeff):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.as_fraction() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sort_key(self) -> Tuple[Tuple[int, Fraction], ...]:
        return tuple(self.items())

    # Numerics and rendering --------------------------------------------

    def evaluate(self, tau: float = math.pi) -> float:
        """Lower to a double with tau bound to a real value."""
        return float(sum(float(v) * tau ** e for e, v in self._terms.items()))

    def __float__(self) -> float:
        return self.evaluate()

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exponent, value in self.items():
            if exponent == 0:
                body = format_rational(abs(value))
            else:
                power = "pi" if exponent == 1 else f"pi^{exponent}"
                magnitude = abs(value)
                body = power if magnitude == 1 else f"{format_rational(magnitude)}*{power}"
            sign = "-" if value < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Coeff({self})"


ZERO = Coeff()
ONE = Coeff.rational(1)
TAU = Coeff.monomial(1, 1)
