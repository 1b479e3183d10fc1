"""
Sparse multivariate polynomials with coefficients in Q[pi, 1/pi].
"""

import math
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from .coeff import Coeff, CoefficientFieldError, Scalar

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
NEG_INF = float('-inf')


def default_names(d: int) -> Tuple[str, ...]:
    return tuple(f"u{i + 1}" for i in range(d))


class MultiPoly:
    """
    Immutable sparse polynomial in d variables.

    ``names`` only affects printing; equality and hashing use the term map.
    """

    __slots__ = ('d', '_terms', 'names', '_hash')

    def __init__(self, d: int, terms: Optional[Mapping[Exponent, Union[Coeff, Scalar]]] = None,
                 names: Optional[Sequence[str]] = None):
        if d < 0:
            raise ValueError("variable count must be nonnegative")
        cleaned: Dict[Exponent, Coeff] = {}
        for exponent, value in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != d or any(e < 0 for e in exponent):
                raise ValueError(f"exponent {exponent} does not fit {d} variables")
            value = Coeff.coerce(value)
            if value:
                cleaned[exponent] = cleaned.get(exponent, Coeff()) + value
                if not cleaned[exponent]:
                    del cleaned[exponent]
        self.d = d
        self._terms = cleaned
        self.names = tuple(names) if names is not None else default_names(d)
        if len(self.names) != d:
            raise ValueError("one name per variable is required")
        self._hash: Optional[int] = None

    @classmethod
    def constant(cls, d: int, value: Union[Coeff, Scalar], names: Optional[Sequence[str]] = None) -> 'MultiPoly':
        return cls(d, {(0,) * d: value}, names)

    @classmethod
    def variable(cls, d: int, index: int, names: Optional[Sequence[str]] = None) -> 'MultiPoly':
        exponent = [0] * d
        exponent[index] = 1
        return cls(d, {tuple(exponent): 1}, names)

    @classmethod
    def linear(cls, coefficients: Sequence[Union[Coeff, Scalar]], names: Optional[Sequence[str]] = None) -> 'MultiPoly':
        """Build sum_i c_i * u_i."""
        d = len(coefficients)
        terms = {}
        for i, value in enumerate(coefficients):
            exponent = [0] * d
            exponent[i] = 1
            terms[tuple(exponent)] = value
        return cls(d, terms, names)

    @property
    def terms(self) -> Mapping[Exponent, Coeff]:
        return dict(self._terms)

    def with_names(self, names: Sequence[str]) -> 'MultiPoly':
        return MultiPoly._from_clean(self.d, self._terms, names)

    @classmethod
    def _from_clean(cls, d: int, terms: Dict[Exponent, Coeff], names: Optional[Sequence[str]]) -> 'MultiPoly':
        obj = cls.__new__(cls)
        obj.d = d
        obj._terms = terms
        obj.names = tuple(names) if names is not None else default_names(d)
        obj._hash = None
        return obj

    # Structure ----------------------------------------------------------

    @property
    def degree(self) -> Union[int, float]:
        """Total degree; the zero polynomial has degree -inf."""
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def is_linear(self) -> bool:
        """True when every term has degree exactly one (no constant)."""
        return all(sum(e) == 1 for e in self._terms)

    @property
    def constant_term(self) -> Coeff:
        return self._terms.get((0,) * self.d, Coeff())

    def without_constant(self) -> 'MultiPoly':
        zero = (0,) * self.d
        return MultiPoly._from_clean(self.d, {e: c for e, c in self._terms.items() if e != zero}, self.names)

    def linear_coefficients(self) -> List[Coeff]:
        """Coefficients of u_1..u_d; requires a linear polynomial."""
        if not self.without_constant().is_linear():
            raise ValueError(f"{self} is not linear")
        coefficients = []
        for i in range(self.d):
            exponent = tuple(1 if j == i else 0 for j in range(self.d))
            coefficients.append(self._terms.get(exponent, Coeff()))
        return coefficients

    def monomials(self) -> List[Exponent]:
        return sorted(self._terms, key=graded_lex_key)

    def coefficient(self, exponent: Exponent) -> Coeff:
        return self._terms.get(tuple(exponent), Coeff())

    # Arithmetic ---------------------------------------------------------

    def _check(self, other: 'MultiPoly') -> None:
        if other.d != self.d:
            raise ValueError(f"mismatched variable counts: {self.d} and {other.d}")

    def __add__(self, other: Union['MultiPoly', Coeff, Scalar]) -> 'MultiPoly':
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.d, other, self.names)
        self._check(other)
        terms = dict(self._terms)
        for exponent, value in other._terms.items():
            total = terms.get(exponent, Coeff()) + value
            if total:
                terms[exponent] = total
            else:
                terms.pop(exponent, None)
        return MultiPoly._from_clean(self.d, terms, self.names)

    __radd__ = __add__

    def __neg__(self) -> 'MultiPoly':
        return MultiPoly._from_clean(self.d, {e: -c for e, c in self._terms.items()}, self.names)

    def __sub__(self, other: Union['MultiPoly', Coeff, Scalar]) -> 'MultiPoly':
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.d, other, self.names)
        return self + (-other)

    def __rsub__(self, other: Union[Coeff, Scalar]) -> 'MultiPoly':
        return MultiPoly.constant(self.d, other, self.names) - self

    def __mul__(self, other: Union['MultiPoly', Coeff, Scalar]) -> 'MultiPoly':
        if not isinstance(other, MultiPoly):
            factor = Coeff.coerce(other)
            if not factor:
                return MultiPoly(self.d, {}, self.names)
            return MultiPoly._from_clean(self.d, {e: c * factor for e, c in self._terms.items()}, self.names)
        self._check(other)
        terms: Dict[Exponent, Coeff] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                total = terms.get(exponent, Coeff()) + c1 * c2
                if total:
                    terms[exponent] = total
                else:
                    terms.pop(exponent, None)
        return MultiPoly._from_clean(self.d, terms, self.names)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'MultiPoly':
        if exponent < 0:
            raise ValueError("negative powers of polynomials are not polynomials")
        result = MultiPoly.constant(self.d, 1, self.names)
        for _ in range(exponent):
            result = result * self
        return result

    def divide_by_coefficient(self, divisor: Coeff) -> 'MultiPoly':
        """Divide every coefficient by a unit coefficient."""
        if not divisor.is_unit():
            raise CoefficientFieldError(f"division by non-unit coefficient {divisor}")
        inverse = divisor.inverse()
        return self * inverse

    # Evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence[Union[Coeff, Scalar]]) -> Coeff:
        """Exact evaluation at a point with entries in Q[pi, 1/pi]."""
        if len(point) != self.d:
            raise ValueError(f"point has {len(point)} entries, expected {self.d}")
        values = [Coeff.coerce(v) for v in point]
        total = Coeff()
        for exponent, coefficient in self._terms.items():
            term = coefficient
            for value, power in zip(values, exponent):
                if power:
                    term = term * value ** power
            total = total + term
        return total

    def lambdify(self, tau: float = math.pi) -> Callable[[np.ndarray], np.ndarray]:
        """
        Vectorised float evaluation.

        The returned callable maps an (n, d) array of parameters to n values.
        """
        exponents = np.array(list(self._terms.keys()), dtype=np.int64).reshape(-1, self.d)
        coefficients = np.array([c.evaluate(tau) for c in self._terms.values()], dtype=np.float64)

        def evaluate(points: np.ndarray) -> np.ndarray:
            points = np.asarray(points, dtype=np.float64).reshape(-1, self.d)
            if coefficients.size == 0:
                return np.zeros(points.shape[0])
            result = np.zeros(points.shape[0])
            for exponent, coefficient in zip(exponents, coefficients):
                term = np.full(points.shape[0], coefficient)
                for axis, power in enumerate(exponent):
                    if power:
                        term = term * points[:, axis] ** power
                result += term
            return result

        return evaluate

    # Comparison and rendering ------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.d == other.d and self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        text = ""
        for exponent in self.monomials():
            coefficient = self._terms[exponent]
            monomial = _format_monomial(exponent, self.names)
            sign, body = _format_term(coefficient, monomial)
            if not text:
                text = ("-" if sign == "-" else "") + body
            else:
                text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({self.d}, '{self}')"


def graded_lex_key(exponent: Exponent) -> Tuple[int, Tuple[int, ...]]:
    """Sort key giving graded-lex order, highest degree first."""
    return (-sum(exponent), tuple(-e for e in exponent))


def _format_monomial(exponent: Exponent, names: Sequence[str]) -> str:
    factors = []
    for name, power in zip(names, exponent):
        if power == 1:
            factors.append(name)
        elif power > 1:
            factors.append(f"{name}^{power}")
    return "*".join(factors)


def _format_term(coefficient: Coeff, monomial: str) -> Tuple[str, str]:
    if coefficient.is_unit():
        (exponent, value), = coefficient.terms.items()
        sign = "-" if value < 0 else "+"
        magnitude = Coeff.monomial(abs(value), exponent)
        if not monomial:
            return sign, str(magnitude)
        if magnitude == 1:
            return sign, monomial
        return sign, f"{magnitude}*{monomial}"
    if not monomial:
        return "+", f"({coefficient})"
    return "+", f"({coefficient})*{monomial}"


def zero_poly(d: int, names: Optional[Sequence[str]] = None) -> MultiPoly:
    return MultiPoly(d, {}, names)
