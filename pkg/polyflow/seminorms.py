"""
Host-Kra seminorms of trigonometric polynomials under an ergodic rotation.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple
import logging

import numpy as np

from .flows import ErgodicityError, integer_relation, rational_approximation
from .observables import Frequency, TrigPoly

logger = logging.getLogger(__name__)

CLOSED_FORM = 'fourier-closed-form'
RECURSION = 'recursion-estimate'
METHODS = (CLOSED_FORM, RECURSION)

DEFAULT_N = 500
DEFAULT_ROTATION = (math.sqrt(2), math.sqrt(3), math.sqrt(5), math.sqrt(7))


@dataclass
class SeminormValue:
    k: int
    value: float
    method: str
    N: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {'k': self.k, 'value': self.value, 'method': self.method, 'N': self.N}


def _check_rotation(gamma: np.ndarray) -> None:
    if gamma.size == 1:
        ratio = rational_approximation(float(gamma[0]))
        if ratio is not None:
            raise ErgodicityError(f"rotation by {float(gamma[0])} ~ {ratio} is not ergodic")
        return
    relation = integer_relation([1.0, *gamma])
    if relation is not None:
        raise ErgodicityError(f"rotation {list(gamma)} has the integer relation {relation} with 1")


def _dual_step(terms: Dict[Tuple[Frequency, Frequency], complex]) -> Dict[Tuple[Frequency, Frequency], complex]:
    """Coefficients of conj(g(x, h)) * g(x + h', h) in the variables (x, h, h')."""
    result: Dict[Tuple[Frequency, Frequency], complex] = defaultdict(complex)
    for (n1, h1), c1 in terms.items():
        for (n2, h2), c2 in terms.items():
            x = tuple(b - a for a, b in zip(n1, n2))
            h = tuple(b - a for a, b in zip(h1, h2)) + n2
            result[(x, h)] += c1.conjugate() * c2
    return result


def closed_form(f: TrigPoly, k: int) -> float:
    """
    ||f||_k for any ergodic rotation: |f^(0)| for k = 1, and for k >= 2 the
    cube integral

        ||f||_k^(2^k) = int |int Delta_{h_1..h_(k-1)} f(x) dx|^2 dh,

    with Delta_h g = conj(g) * g(. + h), evaluated on Fourier coefficients.
    For k = 2 this is sum_n |f^(n)|^4.
    """
    if k == 1:
        return abs(f.integral())
    if k == 2:
        return float(sum(abs(c) ** 4 for c in f.coefficients.values()) ** 0.25)
    terms: Dict[Tuple[Frequency, Frequency], complex] = {
        (n, ()): complex(c) for n, c in f.coefficients.items()
    }
    for _ in range(k - 1):
        terms = _dual_step(terms)
    zero = (0,) * f.m
    power = sum(abs(c) ** 2 for (x, _), c in terms.items() if x == zero)
    return float(power ** (1.0 / 2 ** k))


def _recursion(f: TrigPoly, k: int, gamma: np.ndarray, N: int, levels: int) -> float:
    """Estimate of ||f||_k^(2^k) with ``levels`` finite-N recursion steps."""
    if levels == 0 or k == 1:
        return closed_form(f, k) ** (2 ** k)
    conjugate = f.conjugate()
    total = 0.0
    for n in range(N):
        total += _recursion(conjugate * f.shifted(n * gamma), k - 1, gamma, N, levels - 1)
    return total / N


def hk_seminorm(f: TrigPoly, k: int, method: str = CLOSED_FORM, gamma: Optional[Sequence[float]] = None,
                N: int = DEFAULT_N, levels: int = 1) -> SeminormValue:
    """
    ||f||_k for the rotation x -> x + gamma on T^m.

    The closed form holds for any ergodic rotation. The recursion uses

        ||f||_k^(2^k) = lim_N (1/N) sum_{n<N} ||conj(f) * T^n f||_{k-1}^(2^(k-1))

    for ``levels`` steps at finite N; deeper orders use the closed form.
    ``gamma`` defaults to (sqrt2, sqrt3, ...).
    """
    if k < 1:
        raise ValueError("seminorm order k must be at least 1")
    if method not in METHODS:
        raise ValueError(f"unknown seminorm method {method!r}; expected one of {list(METHODS)}")
    rotation = np.asarray(gamma if gamma is not None else DEFAULT_ROTATION[:f.m], dtype=np.float64)
    if rotation.size != f.m:
        raise ValueError(f"rotation of dimension {rotation.size} does not fit T^{f.m}")
    _check_rotation(rotation)

    if method == CLOSED_FORM:
        return SeminormValue(k, closed_form(f, k), method)
    if N <= 0 or levels < 0:
        raise ValueError("recursion needs N > 0 and levels >= 0")
    estimate = max(_recursion(f, k, rotation, N, levels), 0.0) ** (1.0 / 2 ** k)
    logger.debug(f"Recursion estimate of ||f||_{k} with N={N}, levels={levels}: {estimate:.6f}")
    return SeminormValue(k, float(estimate), method, N)
