"""
Observables on T^m: trigonometric polynomials, box indicators and
linearly smoothed boxes.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union
import logging

import numpy as np

logger = logging.getLogger(__name__)

Frequency = Tuple[int, ...]

DEFAULT_ETA = 0.01


@dataclass(frozen=True)
class TrigPoly:
    """f(x) = sum_n c_n exp(2 pi i n . x) with finitely many integer frequencies n."""
    m: int
    coefficients: Mapping[Frequency, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: Dict[Frequency, complex] = {}
        for frequency, value in dict(self.coefficients).items():
            frequency = tuple(int(n) for n in np.atleast_1d(frequency))
            if len(frequency) != self.m:
                raise ValueError(f"frequency {frequency} does not fit T^{self.m}")
            value = complex(value)
            if value != 0:
                cleaned[frequency] = cleaned.get(frequency, 0j) + value
        object.__setattr__(self, 'coefficients', cleaned)

    @classmethod
    def constant(cls, m: int, value: complex) -> 'TrigPoly':
        return cls(m, {(0,) * m: value})

    @classmethod
    def character(cls, frequency: Sequence[int], amplitude: complex = 1.0) -> 'TrigPoly':
        frequency = tuple(int(n) for n in frequency)
        return cls(len(frequency), {frequency: amplitude})

    @property
    def frequencies(self) -> List[Frequency]:
        return sorted(self.coefficients)

    def coefficient(self, frequency: Sequence[int]) -> complex:
        return self.coefficients.get(tuple(frequency), 0j)

    def integral(self) -> complex:
        return self.coefficient((0,) * self.m)

    def sup_bound(self) -> float:
        """Upper bound sum |c_n| for the sup norm."""
        return float(sum(abs(c) for c in self.coefficients.values()))

    def is_constant(self) -> bool:
        return all(not any(n) for n in self.coefficients)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.m,):
            raise ValueError(f"points of dimension {x.shape[-1:]} do not fit T^{self.m}")
        result = np.zeros(x.shape[:-1], dtype=np.complex128)
        for frequency, value in self.coefficients.items():
            phase = x @ np.asarray(frequency, dtype=np.float64)
            result += value * np.exp(2j * np.pi * phase)
        return result

    def conjugate(self) -> 'TrigPoly':
        return TrigPoly(self.m, {tuple(-n for n in k): np.conj(c) for k, c in self.coefficients.items()})

    def shifted(self, shift: Sequence[float]) -> 'TrigPoly':
        """x -> f(x + shift)."""
        shift = np.asarray(shift, dtype=np.float64)
        return TrigPoly(self.m, {
            k: c * np.exp(2j * np.pi * float(np.dot(k, shift))) for k, c in self.coefficients.items()
        })

    def __mul__(self, other: 'TrigPoly') -> 'TrigPoly':
        if other.m != self.m:
            raise ValueError("cannot multiply trigonometric polynomials on different tori")
        product: Dict[Frequency, complex] = {}
        for k1, c1 in self.coefficients.items():
            for k2, c2 in other.coefficients.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                product[k] = product.get(k, 0j) + c1 * c2
        return TrigPoly(self.m, product)

    def describe(self) -> Dict[str, Any]:
        return {'trig': {','.join(str(n) for n in k): [c.real, c.imag] for k, c in sorted(self.coefficients.items())}}


@dataclass(frozen=True)
class BoxIndicator:
    """Indicator of the box corner + [0, widths) taken mod 1."""
    corner: Tuple[float, ...]
    widths: Tuple[float, ...]

    def __post_init__(self) -> None:
        corner = tuple(float(c) for c in self.corner)
        widths = tuple(float(w) for w in self.widths)
        if len(corner) != len(widths):
            raise ValueError("box corner and widths must have the same length")
        if any(not 0 <= w <= 1 for w in widths):
            raise ValueError("box widths must lie in [0, 1]")
        object.__setattr__(self, 'corner', corner)
        object.__setattr__(self, 'widths', widths)

    @property
    def m(self) -> int:
        return len(self.corner)

    def _offsets(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.m,):
            raise ValueError(f"points of dimension {x.shape[-1:]} do not fit T^{self.m}")
        return np.mod(x - np.asarray(self.corner), 1.0)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        inside = np.all(self._offsets(x) < np.asarray(self.widths), axis=-1)
        return inside.astype(np.complex128)

    def integral(self) -> complex:
        return complex(float(np.prod(self.widths)))

    def sup_bound(self) -> float:
        return 1.0

    def is_constant(self) -> bool:
        return all(w == 1.0 for w in self.widths) or any(w == 0.0 for w in self.widths)

    def describe(self) -> Dict[str, Any]:
        return {'box': {'corner': list(self.corner), 'widths': list(self.widths)}}


@dataclass(frozen=True)
class SmoothedBox:
    """Box indicator with linear ramps of width eta inside each edge."""
    box: BoxIndicator
    eta: float = DEFAULT_ETA

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise ValueError("mollification width must be positive")
        if any(w < 2 * self.eta for w in self.box.widths):
            raise ValueError("box widths must be at least twice the mollification width")

    @property
    def m(self) -> int:
        return self.box.m

    def __call__(self, x: np.ndarray) -> np.ndarray:
        u = self.box._offsets(x)
        widths = np.asarray(self.box.widths)
        ramp = np.minimum(u, widths - u) / self.eta
        ramp = np.where(u < widths, np.clip(ramp, 0.0, 1.0), 0.0)
        return np.prod(ramp, axis=-1).astype(np.complex128)

    def integral(self) -> complex:
        return complex(float(np.prod([w - self.eta for w in self.box.widths])))

    def sup_bound(self) -> float:
        return 1.0

    def is_constant(self) -> bool:
        return False

    def describe(self) -> Dict[str, Any]:
        return {'smooth_box': {'corner': list(self.box.corner), 'widths': list(self.box.widths), 'eta': self.eta}}


Observable = Union[TrigPoly, BoxIndicator, SmoothedBox]


def _parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex amplitude {value} must be [re, im]")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(' ', '').replace('i', 'j'))
    return complex(value)


def _parse_frequency(key: Any) -> Frequency:
    if isinstance(key, (list, tuple)):
        return tuple(int(n) for n in key)
    return tuple(int(part) for part in str(key).split(','))


def observable_from_spec(spec: Any, m: int) -> Observable:
    """
    Build an observable from a config mapping.

    Accepted forms::

        {trig: {'1': 1, '0': 0.5}}            # frequency -> amplitude (or [re, im])
        {box: {corner: [0.1], widths: [0.3]}}
        {smooth_box: {corner: [...], widths: [...], eta: 0.01}}
        {constant: 2}  or a bare number
    """
    if isinstance(spec, (int, float, complex)):
        return TrigPoly.constant(m, complex(spec))
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"observable spec must be a single-key mapping, got {spec!r}")
    (kind, body), = spec.items()
    if kind == 'constant':
        return TrigPoly.constant(m, _parse_complex(body))
    if kind == 'trig':
        if not isinstance(body, dict):
            raise ValueError("trig observable needs a frequency -> amplitude mapping")
        return TrigPoly(m, {_parse_frequency(k): _parse_complex(v) for k, v in body.items()})
    if kind in ('box', 'smooth_box'):
        box = BoxIndicator(tuple(body.get('corner', [0.0] * m)), tuple(body['widths']))
        if box.m != m:
            raise ValueError(f"box of dimension {box.m} does not fit T^{m}")
        if kind == 'box':
            return box
        return SmoothedBox(box, float(body.get('eta', DEFAULT_ETA)))
    raise ValueError(f"unknown observable kind {kind!r}")


def observables_from_spec(specs: Sequence[Any], m: int) -> List[Observable]:
    return [observable_from_spec(spec, m) for spec in specs]


def random_trig_poly(m: int, n_freq: int, rng: np.random.Generator, max_freq: int = 3) -> TrigPoly:
    """Random trigonometric polynomial normalised so that sum |c_n| = 1 (sup norm <= 1)."""
    pool = [k for k in np.ndindex(*([2 * max_freq + 1] * m))]
    chosen = rng.choice(len(pool), size=min(n_freq, len(pool)), replace=False)
    amplitudes = rng.normal(size=len(chosen)) + 1j * rng.normal(size=len(chosen))
    amplitudes /= np.sum(np.abs(amplitudes))
    coefficients = {
        tuple(int(n) - max_freq for n in pool[i]): complex(a) for i, a in zip(chosen, amplitudes)
    }
    return TrigPoly(m, coefficients)


def product_of_integrals(fs: Sequence[Observable]) -> complex:
    """prod_j of the integral of f_j over the torus."""
    result = 1 + 0j
    for f in fs:
        result *= f.integral()
    return result
