"""
Upper Banach density, multiparameter return-time densities and
syndeticity gap scans on interval sets.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .complexity import ComplexityAnalyzer
from .family import FamilyError, PolyFamily
from .intervals import IntervalError, IntervalSet, Number, to_number

logger = logging.getLogger(__name__)

TREND_TOLERANCE = 0.01
GATE_COMPLEXITY = 'complexity'
GATE_TRIANGLE = 'triangle-shape'


@dataclass
class DensityEstimate:
    """Window density m(E n [M, M + L]) / L maximised over M, with its trend in L."""
    L: float
    start: float
    value: float
    trend: List[Tuple[float, float]] = field(default_factory=list)
    exact: bool = False

    @property
    def converged(self) -> bool:
        if self.exact:
            return True
        values = [v for _, v in self.trend]
        return len(values) < 2 or abs(values[-1] - values[-2]) <= TREND_TOLERANCE

    def to_dict(self) -> Dict[str, Any]:
        return {
            'L': self.L,
            'start': self.start,
            'value': self.value,
            'trend': [list(t) for t in self.trend],
            'exact': self.exact,
            'converged': self.converged,
        }


def _is_multiple(L: Number, period: Number, snap: float) -> bool:
    ratio = L / period
    nearest = round(ratio)
    if isinstance(ratio, Fraction):
        return nearest >= 1 and ratio == nearest
    return nearest >= 1 and abs(ratio - nearest) <= snap


def _window_max(E: IntervalSet, L: Number, M_grid: Optional[Sequence[Number]] = None) -> Tuple[Number, Number]:
    """
    Largest m(E n [M, M + L]) over M.

    Without a grid the window measure is piecewise linear in M with breaks
    where M or M + L meets an endpoint, so the breakpoints give the exact
    maximum.
    """
    if M_grid is None:
        if E.periodic:
            assert E.period is not None
            base = E.materialize((0, E.period))
            ends = [x for a, b in base for x in (a, b)] + [0]
        else:
            ends = [x for a, b in E for x in (a, b)]
        M_grid = sorted(set(ends + [x - L for x in ends]))
    best, start = Fraction(0), Fraction(0)
    for M in M_grid:
        value = E.measure((M, M + L))
        if value > best:
            best, start = value, M
    return best, start


def upper_density(E: IntervalSet, L: Number, M_grid: Optional[Sequence[Number]] = None) -> DensityEstimate:
    """
    Estimate D*(E) by windows of length L, 2L and 4L.

    A periodic set with L a multiple of its period has the exact value
    m(template) / period, independent of M.
    """
    L = to_number(L)
    if L <= 0:
        raise IntervalError("window length L must be positive")
    if E.is_empty():
        return DensityEstimate(float(L), 0.0, 0.0, [(float(L), 0.0)], exact=True)
    if E.periodic and M_grid is None and _is_multiple(L, E.period, E.snap):  # type: ignore[arg-type]
        value = float(E.density())
        return DensityEstimate(float(L), 0.0, value, [(float(L), value)], exact=True)

    trend = []
    best, start = _window_max(E, L, M_grid)
    for scale in (1, 2, 4):
        window = L * scale
        value, _ = (best, start) if scale == 1 else _window_max(E, window, M_grid)
        trend.append((float(window), float(value / window)))
    estimate = DensityEstimate(float(L), float(start), float(best / L), trend)
    if not estimate.converged:
        logger.debug(f"Density trend over {[t[0] for t in trend]} has not settled: {[t[1] for t in trend]}")
    return estimate


def _shifts(family: PolyFamily, s: Sequence[Number], tau: float) -> List[Number]:
    """p_i(s), exact when s and the coefficients are rational."""
    if all(isinstance(v, Fraction) for v in s):
        values = [p.evaluate(list(s)) for p in family]
        if all(v.is_rational() for v in values):
            return [v.as_fraction() for v in values]
    point = np.asarray(s, dtype=np.float64).reshape(1, family.d)
    return [float(p.lambdify(tau)(point)[0]) for p in family]


def _thickened(E: IntervalSet, delta: Number) -> IntervalSet:
    return E if delta == 0 else E.thicken(delta)


def return_set(E: IntervalSet, delta: Number, family: PolyFamily, s: Sequence[Number],
               tau: float = math.pi) -> IntervalSet:
    """E_delta n (E_delta - p_1(s)) n ... n (E_delta - p_k(s))."""
    delta = to_number(delta)
    if delta < 0:
        raise IntervalError("thickening radius must be nonnegative")
    thick = _thickened(E, delta)
    result = thick
    for shift in _shifts(family, s, tau):
        result = result.intersect(thick.translate(-shift))
    return result


def return_density(E: IntervalSet, delta: Number, family: PolyFamily, s: Sequence[Number],
                   L: Number, tau: float = math.pi) -> DensityEstimate:
    """Density of the multiple return set of E_delta at parameter s."""
    return upper_density(return_set(E, delta, family, s, tau), L)


# Syndeticity scans --------------------------------------------------------------

@dataclass
class GapReport:
    """Good set of a grid scan over [0, smax] and the largest gap it leaves."""
    smax: float
    step: float
    threshold: float
    base_density: float
    good: List[float]
    max_gap: float
    grid_size: int
    certified: bool
    gate: Optional[str] = None
    complexity_bound: Optional[int] = None
    experimental: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def good_fraction(self) -> float:
        return len(self.good) / self.grid_size if self.grid_size else 0.0

    def to_dict(self, sample: int = 20) -> Dict[str, Any]:
        return {
            'smax': self.smax,
            'step': self.step,
            'threshold': self.threshold,
            'base_density': self.base_density,
            'max_gap': self.max_gap,
            'grid_size': self.grid_size,
            'good_count': len(self.good),
            'good_fraction': self.good_fraction,
            'good_sample': self.good[:sample],
            'certified': self.certified,
            'gate': self.gate,
            'complexity_bound': self.complexity_bound,
            'experimental': self.experimental,
            'notes': list(self.notes),
        }


def is_triangle_shape(family: PolyFamily) -> bool:
    """True for {l p, m p, (l + m) p} with rational l, m and a common polynomial p."""
    if family.k != 3 or any(p.is_zero() for p in family):
        return False
    p1, p2, p3 = family
    if p3 != p1 + p2:
        return False
    lead = p1.monomials()[0]
    a, b = p1.coefficient(lead), p2.coefficient(lead)
    if not b or not a.is_rational() or not b.is_rational():
        return False
    return p1 * b == p2 * a


def complexity_gate(family: PolyFamily, analysis: Optional[Dict[str, Any]] = None
                    ) -> Tuple[bool, Optional[str], Optional[int], List[str]]:
    """Whether the lower bound applies: family bound <= 1, or the triangle shape."""
    notes: List[str] = []
    bound: Optional[int] = None
    try:
        bound = ComplexityAnalyzer(analysis).analyze(family).family_bound
    except (FamilyError, ValueError) as e:
        notes.append(f"complexity not computed: {e}")
    if is_triangle_shape(family):
        return True, GATE_TRIANGLE, bound, notes
    if bound is not None and bound <= 1:
        return True, GATE_COMPLEXITY, bound, notes
    notes.append("lower bound is not certified for this family")
    return False, None, bound, notes


def _check_family(family: PolyFamily) -> None:
    violations = [j + 1 for j, p in enumerate(family) if p.constant_term]
    if violations:
        raise FamilyError(f"members {violations} have nonzero constant terms; p_i(0) = 0 is required")
    if family.d != 1:
        raise FamilyError(f"scans run over a single parameter, family has d={family.d}")


def _scan(value: Callable[[Number], float], threshold: float, smax: Number,
          step: Number, strict: bool = False) -> Tuple[List[float], float, int]:
    smax, step = to_number(smax), to_number(step)
    if step <= 0 or smax <= 0:
        raise ValueError("scan needs positive smax and step")
    grid = [i * step for i in range(int(math.floor(smax / step + 1e-9)) + 1)]
    good = [s for s in grid if (value(s) > threshold if strict else value(s) >= threshold)]
    if not good:
        return [], float(smax), len(grid)
    gaps = [good[0]] + [b - a for a, b in zip(good, good[1:])] + [grid[-1] - good[-1]]
    return [float(s) for s in good], float(max(gaps)), len(grid)


def syndetic_scan(E: IntervalSet, delta: Number, family: PolyFamily, epsilon: float,
                  smax: Number = 50, step: Number = Fraction(1, 100), L: Number = 100,
                  analysis: Optional[Dict[str, Any]] = None, tau: float = math.pi) -> GapReport:
    """
    Scan s on a grid of [0, smax] for the good set

        {s : D*(E_delta n (E_delta - p_1(s)) n ... n (E_delta - p_k(s))) > D*(E)^(k+1) - epsilon}

    and report its largest gap. The threshold for the triangle shape
    {l p, m p, (l + m) p} is D*(E)^4 - epsilon.
    """
    _check_family(family)
    delta = to_number(delta)
    certified, gate, bound, notes = complexity_gate(family, analysis)
    base = upper_density(E, L).value
    exponent = 4 if is_triangle_shape(family) else family.k + 1
    threshold = base ** exponent - epsilon
    experimental = delta == 0
    if experimental:
        notes.append("delta = 0 replaces E_delta by E; the lower bound is not known to hold")
        certified = False

    good, max_gap, size = _scan(lambda s: return_density(E, delta, family, [s], L, tau).value,
                                threshold, smax, step, strict=True)
    report = GapReport(float(smax), float(step), threshold, base, good, max_gap, size,
                       certified, gate, bound, experimental, notes)
    logger.info(f"Scanned {size} points for {family}: {len(good)} good, max gap {max_gap:.4g}")
    return report


def recurrence_scan(A: IntervalSet, gamma: float, family: PolyFamily, epsilon: float,
                    smax: Number = 50, step: Number = Fraction(1, 100),
                    analysis: Optional[Dict[str, Any]] = None, tau: float = math.pi) -> GapReport:
    """
    Scan s for mu(A n (A - p_1(s) gamma) n ... n (A - p_k(s) gamma)) >= mu(A)^(k+1) - epsilon
    on the circle rotation by gamma, with A a union of arcs of R/Z.
    """
    _check_family(family)
    if not A.periodic:
        A = IntervalSet(A.intervals, period=1, snap=A.snap)
    if A.period != 1:
        raise IntervalError("arcs must live on the unit circle (period 1)")
    certified, gate, bound, notes = complexity_gate(family, analysis)
    base = float(A.density())
    exponent = 4 if is_triangle_shape(family) else family.k + 1
    threshold = base ** exponent - epsilon

    def value(s: Number) -> float:
        result = A
        for shift in _shifts(family, [s], tau):
            result = result.intersect(A.translate(-shift * gamma))
        return float(result.density())

    good, max_gap, size = _scan(value, threshold, smax, step)
    logger.info(f"Recurrence scan for {family} at gamma={gamma}: {len(good)} good of {size}, max gap {max_gap:.4g}")
    return GapReport(float(smax), float(step), threshold, base, good, max_gap, size,
                     certified, gate, bound, False, notes)
