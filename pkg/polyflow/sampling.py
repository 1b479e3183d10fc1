"""
Sampling plans for parameter boxes [0, R_1] x ... x [0, R_d].
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy.stats import qmc

logger = logging.getLogger(__name__)

SCHEMES = ('grid', 'monte-carlo', 'low-discrepancy')
CHUNK = 50000


class SamplingError(ValueError):
    """Raised for inconsistent sampling requests (dimension or size mismatch)."""


@dataclass(frozen=True)
class SamplingPlan:
    """
    Deterministic sample of the box [0, R_1] x ... x [0, R_d].

    ``grid`` uses left endpoints R * i / n on ``counts`` points per axis (or
    about samples^(1/d) when counts is omitted); ``monte-carlo`` draws from
    a counter-based Philox stream; ``low-discrepancy`` uses a scrambled
    Halton sequence.
    """
    d: int
    R: Tuple[float, ...]
    scheme: str = 'monte-carlo'
    samples: int = 200000
    seed: int = 0
    counts: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        R = tuple(float(r) for r in (self.R if isinstance(self.R, (tuple, list)) else [self.R] * self.d))
        if len(R) == 1 and self.d > 1:
            R = R * self.d
        object.__setattr__(self, 'R', R)
        if self.d < 0:
            raise SamplingError("parameter dimension must be nonnegative")
        if len(self.R) != self.d:
            raise SamplingError(f"plan has d={self.d} but {len(self.R)} upper limits")
        if any(r <= 0 for r in self.R):
            raise SamplingError("upper limits R must be positive")
        if self.scheme not in SCHEMES:
            raise SamplingError(f"unknown scheme {self.scheme!r}; expected one of {list(SCHEMES)}")
        if self.samples <= 0:
            raise SamplingError("sample count must be positive")
        if self.counts is not None:
            counts = tuple(int(c) for c in self.counts)
            if len(counts) != self.d or any(c <= 0 for c in counts):
                raise SamplingError("grid counts must be positive, one per axis")
            object.__setattr__(self, 'counts', counts)

    @classmethod
    def uniform(cls, d: int, R: float, **kwargs: Any) -> 'SamplingPlan':
        return cls(d=d, R=(float(R),) * d, **kwargs)

    def grid_counts(self) -> Tuple[int, ...]:
        if self.counts is not None:
            return self.counts
        per_axis = max(1, int(round(self.samples ** (1.0 / self.d)))) if self.d else 1
        return (per_axis,) * self.d

    @property
    def size(self) -> int:
        if self.d == 0:
            return 1
        if self.scheme == 'grid':
            return int(np.prod(self.grid_counts()))
        return self.samples

    def unit_points(self) -> np.ndarray:
        """Points of the unit cube, shape (size, d)."""
        if self.d == 0:
            return np.zeros((1, 0))
        if self.scheme == 'grid':
            axes = [np.arange(n, dtype=np.float64) / n for n in self.grid_counts()]
            mesh = np.meshgrid(*axes, indexing='ij')
            return np.stack([a.ravel() for a in mesh], axis=-1)
        if self.scheme == 'monte-carlo':
            rng = np.random.Generator(np.random.Philox(self.seed))
            return rng.random((self.samples, self.d))
        sampler = qmc.Halton(d=self.d, scramble=True, seed=self.seed)
        return sampler.random(self.samples)

    def points(self) -> np.ndarray:
        """Sample points of the parameter box, shape (size, d)."""
        return self.unit_points() * np.asarray(self.R, dtype=np.float64)

    def chunks(self, chunk: int = CHUNK) -> Iterator[np.ndarray]:
        points = self.points()
        for start in range(0, points.shape[0], chunk):
            yield points[start:start + chunk]

    def with_seed(self, seed: int) -> 'SamplingPlan':
        return SamplingPlan(self.d, self.R, self.scheme, self.samples, seed, self.counts)

    def to_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record['R'] = list(self.R)
        record['counts'] = list(self.counts) if self.counts is not None else None
        return record


@dataclass
class AverageEstimate:
    """Estimate of an average with its error proxy and the plan that produced it."""
    value: complex
    stderr: Optional[float]
    samples: int
    scheme: str
    seed: int
    R: Tuple[float, ...]

    @classmethod
    def from_values(cls, values: np.ndarray, plan: SamplingPlan) -> 'AverageEstimate':
        values = np.asarray(values, dtype=np.complex128)
        mean = complex(np.mean(values))
        stderr: Optional[float] = None
        if plan.scheme == 'monte-carlo' and values.size > 1:
            stderr = float(np.std(values, ddof=1) / np.sqrt(values.size))
        return cls(mean, stderr, int(values.size), plan.scheme, plan.seed, plan.R)

    @classmethod
    def exact(cls, value: complex, plan: SamplingPlan) -> 'AverageEstimate':
        return cls(complex(value), 0.0, plan.size, plan.scheme, plan.seed, plan.R)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': [self.value.real, self.value.imag],
            'stderr': self.stderr,
            'samples': self.samples,
            'scheme': self.scheme,
            'seed': self.seed,
            'R': list(self.R),
        }


def plan_from_config(d: int, config: Dict[str, Any], **overrides: Any) -> SamplingPlan:
    """Sampling plan from the ``simulation`` config section with CLI overrides."""
    settings: Dict[str, Any] = dict(config)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    R: Union[float, Sequence[float]] = settings.get('R', 2000)
    R_values = tuple(R) if isinstance(R, (list, tuple)) else (float(R),) * d
    return SamplingPlan(
        d=d,
        R=R_values,
        scheme=settings.get('scheme', 'monte-carlo'),
        samples=int(settings.get('samples', 200000)),
        seed=int(settings.get('seed', 0)),
        counts=tuple(settings['counts']) if settings.get('counts') else None,
    )
