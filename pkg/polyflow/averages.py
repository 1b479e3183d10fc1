"""
Estimators for multiparameter multiple ergodic averages

    A_R f(x) = (1 / |box|) int_box prod_j f_j(T_{p_j(s)} x) ds

together with their limit targets and the finite-R inequality checks.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from . import linalg
from .coeff import Coeff
from .family import CoefficientMatrix, PolyFamily, independent_decomposition
from .flows import ErgodicityError, Flow, TorusFlow
from .observables import Frequency, Observable, TrigPoly, product_of_integrals
from .sampling import CHUNK, AverageEstimate, SamplingError, SamplingPlan

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 0.05
DEFAULT_RESOLUTION = 64
MAX_QUADRATURE_POINTS = 2_000_000
RESONANCE_TOLERANCE = 1e-9


def _check_inputs(flow: Flow, family: PolyFamily, fs: Sequence[Observable], plan: SamplingPlan) -> None:
    if len(fs) != family.k:
        raise SamplingError(f"{len(fs)} observables for a family of {family.k} members")
    if family.d != plan.d:
        raise SamplingError(f"family has d={family.d} but the sampling plan has d={plan.d}")
    for f in fs:
        if f.m != flow.dimension:
            raise SamplingError(f"observable on T^{f.m} does not fit a flow of dimension {flow.dimension}")


def _times(family: PolyFamily, points: np.ndarray, tau: float) -> np.ndarray:
    """Matrix of p_j(s), shape (n, k)."""
    return np.stack([p.lambdify(tau)(points) for p in family], axis=-1)


def multi_average(flow: Flow, family: PolyFamily, fs: Sequence[Observable], x: Sequence[float],
                  plan: SamplingPlan, tau: float = math.pi) -> AverageEstimate:
    """Pointwise estimate of A_R f(x) over the plan's parameter box."""
    _check_inputs(flow, family, fs, plan)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (flow.dimension,):
        raise SamplingError(f"point {list(x)} does not fit a flow of dimension {flow.dimension}")
    if all(f.is_constant() for f in fs):
        return AverageEstimate.exact(product_of_integrals(fs), plan)

    values = []
    for chunk in plan.chunks():
        times = _times(family, chunk, tau)
        product = np.ones(chunk.shape[0], dtype=np.complex128)
        for j, f in enumerate(fs):
            product *= f(flow.apply(times[:, j], x))
        values.append(product)
    estimate = AverageEstimate.from_values(np.concatenate(values), plan)
    logger.debug(f"multi_average at x={list(x)}: {estimate.value:.6f} ({estimate.samples} samples)")
    return estimate


# Fourier expansion of the product on a torus ------------------------------

class ProductExpansion:
    """
    g_s(x) = prod_j f_j(x + p_j(s) gamma) for trigonometric f_j, written as
    sum_N G_N(s) exp(2 pi i N . x).

    Each term of the product carries the phase sum_j (n_j . gamma) p_j(s),
    so G_N(s) is evaluated for a whole batch of s with one matrix product.
    """

    def __init__(self, flow: TorusFlow, family: PolyFamily, fs: Sequence[TrigPoly], tau: float = math.pi):
        if not isinstance(flow, TorusFlow):
            raise SamplingError("the Fourier expansion needs a torus flow")
        if not all(isinstance(f, TrigPoly) for f in fs):
            raise SamplingError("the Fourier expansion needs trigonometric polynomial observables")
        if len(fs) != family.k:
            raise SamplingError(f"{len(fs)} observables for a family of {family.k} members")
        self.flow = flow
        self.family = family
        self.tau = tau
        gamma = flow.gamma
        terms = list(itertools.product(*[list(f.coefficients.items()) for f in fs]))
        outputs: Dict[Frequency, int] = {}
        columns = []
        coefficients = []
        weights = np.zeros((family.k, len(terms)))
        for t, combo in enumerate(terms):
            total = tuple(int(v) for v in np.sum([np.asarray(n) for n, _ in combo], axis=0))
            columns.append(outputs.setdefault(total, len(outputs)))
            coefficients.append(np.prod([c for _, c in combo]))
            for j, (n, _) in enumerate(combo):
                weights[j, t] = float(np.dot(n, gamma))
        self.frequencies: List[Frequency] = sorted(outputs, key=outputs.get)  # type: ignore[arg-type]
        self.weights = weights
        self.coefficients = np.asarray(coefficients, dtype=np.complex128)
        self.grouping = np.zeros((len(terms), len(outputs)))
        self.grouping[np.arange(len(terms)), columns] = 1.0

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """G_N(s) for a batch of s, shape (n, number of output frequencies)."""
        times = _times(self.family, points, self.tau)
        phases = np.exp(2j * np.pi * (times @ self.weights))
        return (phases * self.coefficients) @ self.grouping

    def average(self, plan: SamplingPlan) -> np.ndarray:
        """Mean of G_N(s) over the plan, one entry per output frequency."""
        total = np.zeros(len(self.frequencies), dtype=np.complex128)
        count = 0
        for chunk in plan.chunks():
            total += self.evaluate(chunk).sum(axis=0)
            count += chunk.shape[0]
        return total / count

    def as_trig_poly(self, plan: SamplingPlan) -> TrigPoly:
        """The averaged function x -> A_R f(x) as a trigonometric polynomial."""
        means = self.average(plan)
        return TrigPoly(self.flow.m, dict(zip(self.frequencies, means)))


def l2_deviation(flow: Flow, family: PolyFamily, fs: Sequence[Observable], plan: SamplingPlan,
                 reference: Union[complex, TrigPoly, Any] = None, grid: int = 32,
                 tau: float = math.pi) -> float:
    """
    Mean of |A_R f(x) - reference(x)|^2 over a grid^m lattice of x.

    ``reference`` is a constant, a callable on (n, m) points, or None for the
    product of integrals.
    """
    _check_inputs(flow, family, fs, plan)
    m = flow.dimension
    axes = [np.arange(grid, dtype=np.float64) / grid] * m
    mesh = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing='ij')], axis=-1)
    if reference is None:
        reference = product_of_integrals(fs)
    target = reference(mesh) if callable(reference) else np.full(mesh.shape[0], complex(reference))

    if isinstance(flow, TorusFlow) and all(isinstance(f, TrigPoly) for f in fs):
        averaged = ProductExpansion(flow, family, fs, tau).as_trig_poly(plan)  # type: ignore[arg-type]
        estimate = averaged(mesh)
    else:
        estimate = np.array([multi_average(flow, family, fs, x, plan, tau).value for x in mesh])
    deviation = float(np.mean(np.abs(estimate - target) ** 2))
    logger.debug(f"L2 deviation over {mesh.shape[0]} grid points: {deviation:.6g}")
    return deviation


# Limit formula ------------------------------------------------------------------

@dataclass
class KroneckerLimit:
    """Limit of a linearized average: closed form and/or quadrature."""
    closed_form: Optional[complex]
    quadrature: Optional[complex]
    resolution: int
    ergodic: bool
    notes: List[str] = field(default_factory=list)

    @property
    def value(self) -> complex:
        if self.closed_form is not None:
            return self.closed_form
        if self.quadrature is not None:
            return self.quadrature
        raise ValueError("no limit value available")

    def to_dict(self) -> Dict[str, Any]:
        def pair(v: Optional[complex]) -> Optional[List[float]]:
            return None if v is None else [v.real, v.imag]
        return {
            'closed_form': pair(self.closed_form),
            'quadrature': pair(self.quadrature),
            'resolution': self.resolution,
            'ergodic': self.ergodic,
            'notes': list(self.notes),
        }


def _matrix_parts(A: Union[CoefficientMatrix, PolyFamily, Sequence[Sequence[Any]]]
                  ) -> Tuple[linalg.Matrix, List[Coeff]]:
    if isinstance(A, CoefficientMatrix):
        return A.entries, list(A.constants) or [Coeff()] * A.rows
    if isinstance(A, PolyFamily):
        if A.is_linear():
            return A.linear_rows(), A.constants()
        decomposition = independent_decomposition(A)
        return decomposition.entries, decomposition.constants
    rows = linalg.as_matrix(A)
    return rows, [Coeff()] * len(rows)


def kronecker_limit(A: Union[CoefficientMatrix, PolyFamily, Sequence[Sequence[Any]]],
                    fs: Sequence[Observable], x: Sequence[float],
                    resolution: int = DEFAULT_RESOLUTION, flow: Optional[TorusFlow] = None,
                    tau: float = math.pi) -> KroneckerLimit:
    """
    Limit of the average of prod_j f_j(x + p_j(s) gamma) for a family with
    coefficient matrix A over an R-independent basis.

    For trigonometric observables the closed form keeps the frequency tuples
    (n_1, ..., n_k) with (sum_j alpha_{j,i} n_j) . gamma = 0 for every basis
    index i; without a flow, gamma is taken generic and the condition is
    sum_j alpha_{j,i} n_j = 0 exactly. Quadrature integrates over u in
    (T^m)^l and needs integer alpha.
    """
    rows, constants = _matrix_parts(A)
    k = len(rows)
    if len(fs) != k:
        raise SamplingError(f"{len(fs)} observables for {k} rows")
    l = len(rows[0]) if rows else 0
    x = np.asarray(x, dtype=np.float64)
    m = int(x.size)
    for f in fs:
        if f.m != m:
            raise SamplingError(f"observable on T^{f.m} does not fit a point on T^{m}")
    if flow is not None and flow.m != m:
        raise SamplingError(f"flow on T^{flow.m} does not match the point on T^{m}")
    notes: List[str] = []
    ergodic = flow.is_ergodic() if flow is not None else True
    gamma = flow.gamma if flow is not None else None

    if any(constants) and gamma is None:
        raise SamplingError("members with constant terms need the flow direction to place p_j(0)")
    shifts = [float(c.evaluate(tau)) * (gamma if gamma is not None else np.zeros(m)) for c in constants]

    closed: Optional[complex] = None
    if all(isinstance(f, TrigPoly) for f in fs):
        closed = 0j
        for combo in itertools.product(*[list(f.coefficients.items()) for f in fs]):  # type: ignore[union-attr]
            if _resonant([n for n, _ in combo], rows, l, gamma, tau):
                total = np.sum([np.asarray(n) for n, _ in combo], axis=0)
                phase = float(np.dot(total, x)) + sum(float(np.dot(n, s)) for (n, _), s in zip(combo, shifts))
                closed += complex(np.prod([c for _, c in combo])) * np.exp(2j * np.pi * phase)
    else:
        notes.append("closed form needs trigonometric observables")

    quadrature: Optional[complex] = None
    integer = all(value.is_rational() and value.as_fraction().denominator == 1 for row in rows for value in row)
    if not ergodic:
        notes.append("flow direction has an integer relation; quadrature over the full torus does not apply")
    elif not integer:
        notes.append("quadrature needs integer coefficients")
    elif resolution ** (l * m) > MAX_QUADRATURE_POINTS:
        notes.append(f"quadrature grid {resolution}^{l * m} is too large")
    else:
        quadrature = _quadrature(rows, fs, x, shifts, resolution, l, m)
    if closed is not None and quadrature is not None and abs(closed - quadrature) > 1e-3:
        logger.warning(f"Closed form {closed:.6f} and quadrature {quadrature:.6f} disagree")
    return KroneckerLimit(closed, quadrature, resolution, ergodic, notes)


def _resonant(frequencies: Sequence[Frequency], rows: linalg.Matrix, l: int,
              gamma: Optional[np.ndarray], tau: float) -> bool:
    m = len(frequencies[0])
    for i in range(l):
        exact = [sum((rows[j][i] * n[axis] for j, n in enumerate(frequencies) if n[axis]), Coeff())
                 for axis in range(m)]
        if all(not value for value in exact):
            continue
        if gamma is None:
            return False
        numeric = sum(value.evaluate(tau) * g for value, g in zip(exact, gamma))
        if abs(numeric) > RESONANCE_TOLERANCE:
            return False
    return True


def _quadrature(rows: linalg.Matrix, fs: Sequence[Observable], x: np.ndarray,
                shifts: Sequence[np.ndarray], resolution: int, l: int, m: int) -> complex:
    alpha = np.array([[float(v.as_fraction()) for v in row] for row in rows])
    axis = (np.arange(resolution) + 0.5) / resolution
    if l * m == 0:
        grid = np.zeros((1, 0))
    else:
        grid = np.stack([a.ravel() for a in np.meshgrid(*([axis] * (l * m)), indexing='ij')], axis=-1)
    u = grid.reshape(-1, l, m)
    product = np.ones(u.shape[0], dtype=np.complex128)
    for j, f in enumerate(fs):
        points = x + shifts[j] + np.einsum('i,nim->nm', alpha[j], u)
        product *= f(np.mod(points, 1.0))
    return complex(np.mean(product))


# Inequality checks ----------------------------------------------------------------

@dataclass
class InequalityCheck:
    """Both sides of a finite-R inequality and the verdict lhs <= rhs + slack."""
    name: str
    lhs: float
    rhs: float
    slack: float
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    def to_dict(self) -> Dict[str, Any]:
        record = {'check': self.name, 'lhs': self.lhs, 'rhs': self.rhs, 'slack': self.slack,
                  'margin': self.margin, 'pass': self.passed}
        record.update(self.details)
        return record


def seminorm_bound_check(flow: TorusFlow, family: PolyFamily, fs: Sequence[TrigPoly], plan: SamplingPlan,
                         k: Optional[int] = None, slack: float = DEFAULT_SLACK,
                         tau: float = math.pi) -> InequalityCheck:
    """
    Compare ||A_R f||_{L^2} with min_l ||f_l||_k (k defaults to the family size).
    """
    from .seminorms import hk_seminorm

    _check_inputs(flow, family, fs, plan)
    if not family.is_linear():
        logger.warning(f"Family {family} is not linear; the seminorm bound is stated for linear families")
    k = family.k if k is None else k
    if any(f.sup_bound() > 1 + 1e-12 for f in fs):
        raise SamplingError("observables must satisfy sup |f| <= 1")
    if not flow.is_ergodic():
        raise ErgodicityError(f"flow direction {list(flow.gamma)} has the integer relation {flow.relation()}")
    averaged = ProductExpansion(flow, family, fs, tau).average(plan)
    average_norm = float(np.sqrt(np.sum(np.abs(averaged) ** 2)))
    norms = [hk_seminorm(f, k).value for f in fs]
    return InequalityCheck('seminorm_bound', average_norm, min(norms), slack,
                           {'k': k, 'seminorms': norms, 'plan': plan.to_dict()})


def vdc_check(flow: TorusFlow, family: PolyFamily, fs: Sequence[TrigPoly], psi: float,
              plan: SamplingPlan, slack: float = DEFAULT_SLACK, tau: float = math.pi) -> InequalityCheck:
    """
    van der Corput check for g_s = prod_j T_{p_j(s)} f_j on the box Psi = [0, psi]^d:

        ||avg_s g_s||^2  <=  avg_{u, v in Psi} avg_s <g_{s+u}, g_{s+v}>  (+ slack)
    """
    _check_inputs(flow, family, fs, plan)
    if psi <= 0:
        raise SamplingError("the box side psi must be positive")
    expansion = ProductExpansion(flow, family, fs, tau)
    lhs = float(np.sum(np.abs(expansion.average(plan)) ** 2))

    rng = np.random.Generator(np.random.Philox(plan.seed + 1))
    total = 0.0
    count = 0
    for chunk in plan.chunks(CHUNK):
        u = rng.random(chunk.shape) * psi
        v = rng.random(chunk.shape) * psi
        inner = np.sum(expansion.evaluate(chunk + u) * np.conj(expansion.evaluate(chunk + v)), axis=1)
        total += float(np.sum(inner.real))
        count += chunk.shape[0]
    rhs = total / count
    return InequalityCheck('van_der_corput', lhs, rhs, slack, {'psi': psi, 'plan': plan.to_dict()})
