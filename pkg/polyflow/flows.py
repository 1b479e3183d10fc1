"""
Concrete flows: rotations of the torus T^m and the Heisenberg nilflow.

Points are numpy arrays with the coordinate axis last, so a batch of n
points on T^m has shape (n, m) and a batch on the Heisenberg nilmanifold
has shape (n, 3).
"""

import ast
import itertools
import math
import operator
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union
import logging

import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

RATIONAL_MAX_DENOMINATOR = 10 ** 4
RATIONAL_TOLERANCE = 1e-12
RELATION_BOUND = 6


class ErgodicityError(ValueError):
    """Raised when an operation requires an ergodic rotation."""


# Real-parameter expressions ---------------------------------------------

_BINARY: Dict[type, Callable[[float, float], float]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CONSTANTS = {'pi': math.pi, 'e': math.e, 'tau': 2 * math.pi}
_FUNCTIONS = {'sqrt': math.sqrt, 'exp': math.exp, 'log': math.log}


def parse_real(text: Union[str, float, int]) -> float:
    """
    Evaluate a real parameter such as ``"sqrt2"``, ``"sqrt(3)"``, ``"1/pi"``
    or ``"2*pi"`` to a double.

    Only numbers, the constants pi and e, sqrtN shorthands and the functions
    sqrt, exp and log are accepted.
    """
    if isinstance(text, (int, float)):
        return float(text)
    source = text.strip().replace('^', '**').replace('π', 'pi').replace('−', '-')
    try:
        tree = ast.parse(source, mode='eval')
    except SyntaxError as e:
        raise ValueError(f"cannot parse real expression {text!r}: {e.msg}") from None
    value = _evaluate_node(tree.body, text)
    if not math.isfinite(value):
        raise ValueError(f"real expression {text!r} is not finite")
    return value


def _evaluate_node(node: ast.AST, text: str) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate_node(node.operand, text)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        return _BINARY[type(node.op)](_evaluate_node(node.left, text), _evaluate_node(node.right, text))
    if isinstance(node, ast.Name):
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        if node.id.startswith('sqrt') and node.id[4:].isdigit():
            return math.sqrt(int(node.id[4:]))
        raise ValueError(f"unknown name {node.id!r} in real expression {text!r}")
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCTIONS and len(node.args) == 1 and not node.keywords):
        return _FUNCTIONS[node.func.id](_evaluate_node(node.args[0], text))
    raise ValueError(f"unsupported construct in real expression {text!r}")


def parse_vector(text: Union[str, Sequence[Union[str, float]]]) -> Tuple[float, ...]:
    """Comma-separated real expressions, e.g. ``"sqrt2, sqrt3"``."""
    if isinstance(text, str):
        parts = [part for part in text.split(',') if part.strip()]
    else:
        parts = list(text)
    if not parts:
        raise ValueError("empty parameter vector")
    return tuple(parse_real(part) for part in parts)


# Rationality checks --------------------------------------------------------

def rational_approximation(value: float, max_denominator: int = RATIONAL_MAX_DENOMINATOR,
                           tolerance: float = RATIONAL_TOLERANCE) -> Optional[Fraction]:
    """
    Continued-fraction test: the best rational with denominator at most
    ``max_denominator`` when it reproduces ``value`` to ``tolerance``.
    """
    candidate = Fraction(value).limit_denominator(max_denominator)
    if abs(float(candidate) - value) <= tolerance * max(1.0, abs(value)):
        return candidate
    return None


def integer_relation(values: Sequence[float], bound: int = RELATION_BOUND,
                     tolerance: float = 1e-9) -> Optional[Tuple[int, ...]]:
    """
    Smallest nonzero integer vector n with |n_i| <= bound and n . values ~ 0.

    Vectors are tried by increasing max-norm, so the first hit is a short relation.
    """
    values = [float(v) for v in values]
    scale = max(1.0, max((abs(v) for v in values), default=1.0))
    for norm in range(1, bound + 1):
        for vector in itertools.product(range(-norm, norm + 1), repeat=len(values)):
            if max((abs(n) for n in vector), default=0) != norm:
                continue
            first = next(n for n in vector if n)
            if first < 0:
                continue
            if abs(sum(n * v for n, v in zip(vector, values))) <= tolerance * scale:
                return vector
    return None


def _split(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Fractional part in [0, 1) and the integer part removed."""
    whole = np.floor(values)
    frac = values - whole
    wrap = frac >= 1.0
    if np.any(wrap):
        frac = np.where(wrap, frac - 1.0, frac)
        whole = np.where(wrap, whole + 1.0, whole)
    return frac, whole


# Flows -----------------------------------------------------------------------

class TorusFlow:
    """Rotation T_t(x) = x + t * gamma (mod 1) on T^m."""

    kind = 'torus'

    def __init__(self, gamma: Sequence[float]):
        self.gamma = np.asarray([float(g) for g in gamma], dtype=np.float64)
        if self.gamma.ndim != 1 or self.gamma.size == 0:
            raise ValueError("torus flow needs a nonempty direction vector")

    @property
    def m(self) -> int:
        return int(self.gamma.size)

    @property
    def dimension(self) -> int:
        return self.m

    def reduce(self, x: ArrayLike) -> np.ndarray:
        return _split(np.asarray(x, dtype=np.float64))[0]

    def apply(self, t: ArrayLike, x: ArrayLike) -> np.ndarray:
        """
        Image of x under T_t.

        ``t`` may be a scalar or a length-n array; ``x`` a single point or an
        (n, m) batch. The result has the broadcast batch shape.
        """
        t = np.asarray(t, dtype=np.float64)
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.m,):
            raise ValueError(f"point dimension {x.shape[-1:]} does not match torus T^{self.m}")
        shift = t[..., None] * self.gamma
        return self.reduce(x + shift)

    def relation(self) -> Optional[Tuple[int, ...]]:
        """Short integer vector n with n . gamma = 0, if any."""
        return integer_relation(self.gamma)

    def is_ergodic(self) -> bool:
        """The flow x + t*gamma is ergodic iff gamma has no integer relation."""
        return self.relation() is None

    def describe(self) -> Dict[str, object]:
        return {'type': 'torus', 'gamma': [float(g) for g in self.gamma]}

    def __repr__(self) -> str:
        return f"TorusFlow(gamma={list(self.gamma)})"


class HeisenbergFlow:
    """
    Nilflow a_t = (alpha t, beta t, zeta t + alpha beta t^2 / 2) on the
    Heisenberg nilmanifold, acting by left multiplication.

    Group law: (x, y, z) . (x', y', z') = (x + x', y + y', z + z' + x y').
    """

    kind = 'heisenberg'
    dimension = 3

    def __init__(self, alpha: float, beta: float, zeta: float = 0.0):
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.zeta = float(zeta)

    @staticmethod
    def multiply(g: ArrayLike, h: ArrayLike) -> np.ndarray:
        g = np.asarray(g, dtype=np.float64)
        h = np.asarray(h, dtype=np.float64)
        g, h = np.broadcast_arrays(g, h)
        result = np.empty_like(g)
        result[..., 0] = g[..., 0] + h[..., 0]
        result[..., 1] = g[..., 1] + h[..., 1]
        result[..., 2] = g[..., 2] + h[..., 2] + g[..., 0] * h[..., 1]
        return result

    @staticmethod
    def reduce(g: ArrayLike) -> np.ndarray:
        """
        Right-multiply by lattice elements to land in [0, 1)^3:
        first (-floor x, 0, 0), then (0, -floor y, 0), then (0, 0, -floor z).
        """
        g = np.asarray(g, dtype=np.float64)
        x, _ = _split(g[..., 0])
        y, y_whole = _split(g[..., 1])
        z, _ = _split(g[..., 2] - x * y_whole)
        return np.stack([x, y, z], axis=-1)

    def element(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return np.stack([
            self.alpha * t,
            self.beta * t,
            self.zeta * t + 0.5 * self.alpha * self.beta * t * t,
        ], axis=-1)

    def apply(self, t: ArrayLike, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (3,):
            raise ValueError("Heisenberg points have three coordinates")
        return self.reduce(self.multiply(self.element(t), x))

    def base_flow(self) -> TorusFlow:
        """Projection to the maximal factor torus T^2 = (x, y)."""
        return TorusFlow((self.alpha, self.beta))

    def is_ergodic(self) -> bool:
        """Ergodic iff the base rotation (alpha, beta) is."""
        return self.base_flow().is_ergodic()

    def describe(self) -> Dict[str, object]:
        return {'type': 'heisenberg', 'alpha': self.alpha, 'beta': self.beta, 'zeta': self.zeta}

    def __repr__(self) -> str:
        return f"HeisenbergFlow(alpha={self.alpha}, beta={self.beta}, zeta={self.zeta})"


Flow = Union[TorusFlow, HeisenbergFlow]


def flow_apply(flow: Flow, t: ArrayLike, x: ArrayLike) -> np.ndarray:
    """Image of x under the time-t map, reduced to the fundamental domain."""
    return flow.apply(t, x)


def flow_from_spec(spec: Dict[str, object]) -> Flow:
    """Build a flow from ``{'type': 'torus', 'gamma': ...}`` or ``{'type': 'heisenberg', ...}``."""
    kind = str(spec.get('type', 'torus')).lower()
    if kind == 'torus':
        gamma = spec.get('gamma')
        if gamma is None:
            raise ValueError("torus flow needs gamma")
        return TorusFlow(parse_vector(gamma))  # type: ignore[arg-type]
    if kind == 'heisenberg':
        return HeisenbergFlow(
            parse_real(spec.get('alpha', 1)),  # type: ignore[arg-type]
            parse_real(spec.get('beta', 'sqrt2')),  # type: ignore[arg-type]
            parse_real(spec.get('zeta', 0)),  # type: ignore[arg-type]
        )
    raise ValueError(f"unknown flow type {kind!r}; expected torus or heisenberg")
