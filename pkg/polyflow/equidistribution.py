"""
Equidistribution checks for polynomial paths on tori and on the
Heisenberg nilmanifold.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .family import PolyFamily, coefficient_rows, monomial_support
from .flows import HeisenbergFlow
from .sampling import SamplingError, SamplingPlan

logger = logging.getLogger(__name__)

MAX_DEPTH = 4
MAX_BOXES = 2 ** 20
Z_BINS = 16
RELATION_BOUND = 6
MAX_RELATION_VECTORS = 200_000
DEGENERATE_LEVEL = 0.5

FLAG_CONSTANT = 'constant-path'
FLAG_RELATION = 'integer-relation'
FLAG_ALIASING = 'sampling-aliasing'
FLAG_NON_ERGODIC = 'non-ergodic-base'


def box_discrepancy(points: np.ndarray, max_depth: int = MAX_DEPTH) -> List[float]:
    """
    max |empirical fraction - volume| over the dyadic boxes of side 2^-depth,
    one value per depth 1..max_depth.

    Depths whose box count would exceed MAX_BOXES are skipped.
    """
    points = np.asarray(points, dtype=np.float64)
    n, w = points.shape
    values: List[float] = []
    for depth in range(1, max_depth + 1):
        cells = 2 ** depth
        boxes = cells ** w
        if boxes > MAX_BOXES:
            break
        index = np.minimum(np.floor(points * cells).astype(np.int64), cells - 1)
        flat = np.ravel_multi_index(index.T, (cells,) * w) if w else np.zeros(n, dtype=np.int64)
        counts = np.bincount(flat, minlength=boxes)
        values.append(float(np.max(np.abs(counts / n - 1.0 / boxes))))
    return values


def _relation(rows: Sequence[Sequence[float]], bound: int = RELATION_BOUND,
              tolerance: float = 1e-9) -> Optional[Tuple[int, ...]]:
    """Short nonzero integer n with sum_i n_i rows[i] ~ 0 in every column."""
    w = len(rows)
    matrix = np.asarray(rows, dtype=np.float64).reshape(w, -1)
    scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 1.0)
    while bound > 1 and (2 * bound + 1) ** w > MAX_RELATION_VECTORS:
        bound -= 1
    for norm in range(1, bound + 1):
        for vector in itertools.product(range(-norm, norm + 1), repeat=w):
            if max(abs(n) for n in vector) != norm or next(n for n in vector if n) < 0:
                continue
            if np.all(np.abs(np.asarray(vector) @ matrix) <= tolerance * scale):
                return vector
    return None


def sample_path(family: PolyFamily, plan: SamplingPlan, scales: Optional[Sequence[float]] = None,
                tau: float = math.pi) -> np.ndarray:
    """(scale_i * q_i(s)) mod 1 over the plan, shape (size, w)."""
    if family.d != plan.d:
        raise SamplingError(f"path has d={family.d} but the sampling plan has d={plan.d}")
    scales = [1.0] * family.k if scales is None else [float(c) for c in scales]
    if len(scales) != family.k:
        raise SamplingError(f"{len(scales)} scales for a path with {family.k} coordinates")
    chunks = []
    functions = [q.lambdify(tau) for q in family]
    for chunk in plan.chunks():
        values = np.stack([c * f(chunk) for c, f in zip(scales, functions)], axis=-1)
        chunks.append(np.mod(values, 1.0))
    return np.concatenate(chunks)


@dataclass
class DiscrepancyReport:
    """Box-count discrepancy of a sampled path with its diagnostic flags."""
    discrepancy: float
    by_depth: List[float]
    samples: int
    flags: List[str] = field(default_factory=list)
    relation: Optional[Tuple[int, ...]] = None

    @property
    def degenerate(self) -> bool:
        return bool(self.flags)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'discrepancy': self.discrepancy,
            'by_depth': list(self.by_depth),
            'samples': self.samples,
            'flags': list(self.flags),
            'relation': list(self.relation) if self.relation is not None else None,
        }


def path_discrepancy(family: PolyFamily, plan: SamplingPlan, scales: Optional[Sequence[float]] = None,
                     tau: float = math.pi, max_depth: int = MAX_DEPTH) -> DiscrepancyReport:
    """
    Discrepancy of s -> (scale_1 q_1(s), ..., scale_w q_w(s)) mod 1.

    A short integer relation among the non-constant parts means the path lives
    on a subtorus; a large discrepancy without one points at the sampling
    (e.g. integer grid points on the path q = s).
    """
    points = sample_path(family, plan, scales, tau)
    by_depth = box_discrepancy(points, max_depth)
    discrepancy = max(by_depth) if by_depth else 0.0

    flags: List[str] = []
    stripped = [q.without_constant() for q in family]
    relation = None
    if all(q.is_zero() for q in stripped):
        flags.append(FLAG_CONSTANT)
    else:
        support = monomial_support(stripped)
        factors = [1.0] * family.k if scales is None else [float(c) for c in scales]
        rows = [[c * value.evaluate(tau) for value in row]
                for c, row in zip(factors, coefficient_rows(stripped, support))]
        relation = _relation(rows)
        if relation is not None:
            flags.append(FLAG_RELATION)
        elif discrepancy >= DEGENERATE_LEVEL:
            flags.append(FLAG_ALIASING)
    if flags:
        logger.warning(f"Path {family}: discrepancy {discrepancy:.4f} flagged {flags}")
    else:
        logger.info(f"Path {family}: discrepancy {discrepancy:.4f} over {points.shape[0]} samples")
    return DiscrepancyReport(discrepancy, by_depth, int(points.shape[0]), flags, relation)


@dataclass
class HeisenbergReport:
    """Base-torus discrepancy and z-coordinate deviation of a nilflow path."""
    base_discrepancy: float
    z_distance: float
    samples: int
    ergodic_base: bool
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'base_discrepancy': self.base_discrepancy,
            'z_tv_distance': self.z_distance,
            'samples': self.samples,
            'ergodic_base': self.ergodic_base,
            'flags': list(self.flags),
        }


def heisenberg_factor_check(flow: HeisenbergFlow, family: PolyFamily, plan: SamplingPlan,
                            x: Sequence[float] = (0.0, 0.0, 0.0), tau: float = math.pi,
                            bins: int = Z_BINS) -> HeisenbergReport:
    """
    Sample a_{p(s)} . x on the Heisenberg nilmanifold; report the discrepancy
    of its (x, y) projection on the base torus and the total-variation
    distance of the z-coordinate histogram from uniform.
    """
    if family.k != 1:
        raise SamplingError(f"Heisenberg path needs a single polynomial, got {family.k}")
    if family.d != plan.d:
        raise SamplingError(f"path has d={family.d} but the sampling plan has d={plan.d}")
    start = np.asarray(x, dtype=np.float64)
    p = family[0].lambdify(tau)

    bases = []
    z_counts = np.zeros(bins, dtype=np.int64)
    for chunk in plan.chunks():
        images = flow.apply(p(chunk), start)
        bases.append(images[:, :2])
        z_counts += np.bincount(np.minimum((images[:, 2] * bins).astype(np.int64), bins - 1), minlength=bins)
    base = np.concatenate(bases)
    samples = int(base.shape[0])
    base_discrepancy = max(box_discrepancy(base))
    z_distance = 0.5 * float(np.sum(np.abs(z_counts / samples - 1.0 / bins)))

    ergodic = flow.is_ergodic()
    flags: List[str] = []
    if not ergodic:
        flags.append(FLAG_NON_ERGODIC)
    if family[0].without_constant().is_zero():
        flags.append(FLAG_CONSTANT)
    if flags:
        logger.warning(f"Heisenberg check for {flow!r} flagged {flags}")
    return HeisenbergReport(base_discrepancy, z_distance, samples, ergodic, flags)
