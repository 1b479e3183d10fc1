"""
Experiment runner that turns a RunConfig into result records.
"""

import math
from dataclasses import asdict, dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple
import logging

import numpy as np

from .averages import (
    kronecker_limit, l2_deviation, multi_average, seminorm_bound_check, vdc_check,
)
from .complexity import ComplexityAnalyzer, verify_certificate
from .config import Config
from .density import recurrence_scan, syndetic_scan
from .equidistribution import heisenberg_factor_check, path_discrepancy
from .family import PolyFamily
from .flows import TorusFlow, flow_from_spec, parse_real
from .intervals import IntervalSet, load_interval_set
from .observables import Observable, TrigPoly, observables_from_spec, product_of_integrals, random_trig_poly
from .parser import parse_family
from .records import make_record
from .sampling import SamplingError, plan_from_config
from .seminorms import CLOSED_FORM, RECURSION, hk_seminorm

logger = logging.getLogger(__name__)

COMMANDS = ('analyze', 'simulate', 'kronecker', 'equidist', 'seminorm', 'vdc', 'returns', 'recurrence')


@dataclass
class RunConfig:
    """Everything needed to reproduce one run; echoed into every output record."""
    command: str
    family: Optional[str] = None
    flow: Dict[str, Any] = field(default_factory=dict)
    observables: List[Any] = field(default_factory=list)
    x: Optional[List[float]] = None
    scales: Optional[List[float]] = None
    plan: Dict[str, Any] = field(default_factory=dict)
    analysis: Dict[str, Any] = field(default_factory=dict)
    seminorm: Dict[str, Any] = field(default_factory=dict)
    kronecker: Dict[str, Any] = field(default_factory=dict)
    density: Dict[str, Any] = field(default_factory=dict)
    psi: float = 5.0
    cases: int = 0
    slack: float = 0.05
    tau: float = math.pi
    l2: bool = False
    strict: bool = False
    output: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; expected one of {list(COMMANDS)}")

    @classmethod
    def from_config(cls, config: Config, command: str, **overrides: Any) -> 'RunConfig':
        """Merge config sections with non-None command-line overrides."""
        simulation = dict(config.get_simulation_config())
        plan = {key: simulation.get(key) for key in ('R', 'scheme', 'samples', 'seed')}
        plan.update({k: v for k, v in overrides.pop('plan', {}).items() if v is not None})
        sections = {
            'analysis': dict(config.get_analysis_config()),
            'seminorm': dict(config.get_seminorm_config()),
            'kronecker': dict(config.get_kronecker_config()),
            'density': dict(config.get_density_config()),
            'output': dict(config.get_output_config()),
        }
        for name, section in sections.items():
            section.update({k: v for k, v in overrides.pop(name, {}).items() if v is not None})
        tau = simulation.get('tau', 'pi')
        settings: Dict[str, Any] = {
            'slack': float(simulation.get('slack', 0.05)),
            'tau': parse_real(tau),
        }
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(command=command, plan=plan, **sections, **settings)

    def to_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record['output'] = {k: v for k, v in self.output.items() if k != 'path'}
        return record


@dataclass
class RunResult:
    """Serialized record, CSV rows, summary lines and failed hypothesis gates."""
    record: Dict[str, Any]
    rows: List[Dict[str, Any]]
    summary: List[Tuple[str, str]]
    failures: List[str] = field(default_factory=list)


class ExperimentRunner:
    """Dispatch run configurations to the analysis, simulation and density layers."""

    def __init__(self, config: Optional[Config] = None, config_path: Optional[str] = None):
        self.config = config if config is not None else Config(config_path)
        self.stats = {
            'start_time': None,
            'runs': 0,
            'failures': 0,
            'errors': 0,
        }
        self._handlers: Dict[str, Callable[[RunConfig], Tuple[Any, List[Dict[str, Any]],
                                                               List[Tuple[str, str]], List[str]]]] = {
            'analyze': self._run_analyze,
            'simulate': self._run_simulate,
            'kronecker': self._run_kronecker,
            'equidist': self._run_equidist,
            'seminorm': self._run_seminorm,
            'vdc': self._run_vdc,
            'returns': self._run_returns,
            'recurrence': self._run_recurrence,
        }
        logger.info("Experiment runner initialized")

    def run_config(self, command: str, **overrides: Any) -> RunConfig:
        return RunConfig.from_config(self.config, command, **overrides)

    def run(self, run: RunConfig) -> RunResult:
        if self.stats['start_time'] is None:
            self.stats['start_time'] = datetime.now()
        logger.info(f"Running {run.command}")
        try:
            result, rows, summary, failures = self._handlers[run.command](run)
        except Exception as e:
            self.stats['errors'] += 1
            logger.error(f"{run.command} failed: {e}")
            raise
        self.stats['runs'] += 1
        if failures:
            self.stats['failures'] += len(failures)
            for failure in failures:
                logger.warning(f"Hypothesis gate: {failure}")
        return RunResult(make_record(run.to_dict(), result), rows, summary, failures)

    # Input assembly ----------------------------------------------------------

    def _family(self, run: RunConfig) -> PolyFamily:
        if not run.family:
            raise ValueError(f"{run.command} needs --family")
        return parse_family(run.family)

    def _flow(self, run: RunConfig) -> Any:
        if not run.flow:
            raise ValueError(f"{run.command} needs a flow (--flow with --gamma or --alpha/--beta)")
        return flow_from_spec(run.flow)

    def _observables(self, run: RunConfig, m: int) -> List[Observable]:
        if not run.observables:
            raise ValueError(f"{run.command} needs --observables")
        return observables_from_spec(run.observables, m)

    def _point(self, run: RunConfig, m: int) -> np.ndarray:
        if run.x is None:
            return np.zeros(m)
        x = np.asarray([float(v) for v in run.x])
        if x.shape != (m,):
            raise SamplingError(f"point {list(x)} does not have {m} coordinates")
        return x

    def _random_cases(self, run: RunConfig, family: PolyFamily, m: int) -> List[List[TrigPoly]]:
        rng = np.random.default_rng(int(run.plan.get('seed') or 0))
        return [[random_trig_poly(m, int(rng.integers(1, 4)), rng) for _ in range(family.k)]
                for _ in range(run.cases)]

    def _interval_set(self, run: RunConfig) -> IntervalSet:
        path = run.density.get('intervals')
        if not path:
            raise ValueError(f"{run.command} needs --intervals")
        E = load_interval_set(path, float(run.density.get('snap', 1e-9)))
        period = run.density.get('period')
        if period is not None and not E.periodic:
            E = IntervalSet(E.intervals, period=str(period), snap=E.snap)
        return E

    @staticmethod
    def _exact(value: Any) -> Any:
        return Fraction(str(value)) if isinstance(value, float) else value

    # Commands ----------------------------------------------------------------

    def _run_analyze(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        report = ComplexityAnalyzer(run.analysis).analyze(family)
        failures = []
        for cert in report.per_j:
            problems = verify_certificate(cert, family)
            failures.extend(f"certificate p{cert.j + 1}: {problem}" for problem in problems)
            if cert.flagged:
                failures.append(f"p{cert.j + 1}: no substitution found within budget")
        rows = [cert.to_dict() for cert in report.per_j]
        summary = [
            ('family', str(family)),
            ('linearization', str(report.linearization)),
            ('R-independent', str(report.independence.independent)),
            ('weight vector', str(report.weight)),
            ('family bound', f"{report.family_bound}{'' if report.exact else ' (upper bound)'}"),
        ]
        return report, rows, summary, failures

    def _run_simulate(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        flow = self._flow(run)
        fs = self._observables(run, flow.dimension)
        plan = plan_from_config(family.d, run.plan)
        x = self._point(run, flow.dimension)
        estimate = multi_average(flow, family, fs, x, plan, run.tau)
        target = product_of_integrals(fs)
        result: Dict[str, Any] = {
            'estimate': estimate,
            'product_of_integrals': [target.real, target.imag],
            'distance_to_product': abs(estimate.value - target),
            'flow': flow.describe(),
            'x': list(x),
        }
        summary = [
            ('estimate', f"{estimate.value:.6f}"),
            ('stderr', 'exact' if estimate.stderr == 0 else f"{estimate.stderr}"),
            ('product of integrals', f"{target:.6f}"),
        ]
        if run.l2:
            grid = int(self.config.get('simulation.l2_grid', 32))
            result['l2_deviation'] = l2_deviation(flow, family, fs, plan, grid=grid, tau=run.tau)
            summary.append(('L2 deviation', f"{result['l2_deviation']:.6g}"))
        row = {'estimate': estimate.value, 'stderr': estimate.stderr, 'samples': estimate.samples,
               'distance_to_product': result['distance_to_product']}
        return result, [row], summary, []

    def _run_kronecker(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        flow = self._flow(run) if run.flow else None
        if flow is not None and not isinstance(flow, TorusFlow):
            raise ValueError("kronecker limits are computed for torus flows")
        m = flow.dimension if flow is not None else len(run.x or [0.0])
        fs = self._observables(run, m)
        x = self._point(run, m)
        limit = kronecker_limit(family, fs, x, int(run.kronecker.get('resolution', 64)), flow, run.tau)
        failures = [] if limit.closed_form is not None or limit.quadrature is not None else \
            ["no limit value available: " + '; '.join(limit.notes)]
        summary = [
            ('closed form', f"{limit.closed_form:.6f}" if limit.closed_form is not None else 'n/a'),
            ('quadrature', f"{limit.quadrature:.6f}" if limit.quadrature is not None else 'n/a'),
        ]
        return limit, [limit.to_dict()], summary, failures

    def _run_equidist(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        plan = plan_from_config(family.d, run.plan)
        if run.flow and str(run.flow.get('type', 'torus')) == 'heisenberg':
            flow = self._flow(run)
            x = self._point(run, 3)
            report: Any = heisenberg_factor_check(flow, family, plan, x, run.tau)
            summary = [('base discrepancy', f"{report.base_discrepancy:.4f}"),
                       ('z TV distance', f"{report.z_distance:.4f}")]
        else:
            scales = [parse_real(c) for c in run.scales] if run.scales else None
            report = path_discrepancy(family, plan, scales, run.tau)
            summary = [('discrepancy', f"{report.discrepancy:.4f}")]
        summary.append(('flags', ', '.join(report.flags) or 'none'))
        failures = [f"path flagged {flag}" for flag in report.flags]
        return report, [report.to_dict()], summary, failures

    def _run_seminorm(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        flow = self._flow(run)
        if not isinstance(flow, TorusFlow):
            raise ValueError("seminorms are computed for torus rotations")
        k = int(run.seminorm.get('k', 2))
        N = int(run.seminorm.get('N', 500))
        levels = int(run.seminorm.get('levels', 1))
        rows: List[Dict[str, Any]] = []
        failures: List[str] = []
        if run.observables:
            for index, f in enumerate(self._observables(run, flow.m)):
                if not isinstance(f, TrigPoly):
                    raise ValueError("seminorms are computed for trigonometric polynomials")
                closed = hk_seminorm(f, k, CLOSED_FORM, flow.gamma)
                estimate = hk_seminorm(f, k, RECURSION, flow.gamma, N, levels)
                rows.append({'observable': index + 1, 'k': k, 'closed_form': closed.value,
                             'recursion': estimate.value, 'N': N,
                             'difference': abs(closed.value - estimate.value)})
        if run.family:
            family = self._family(run)
            plan = plan_from_config(family.d, run.plan)
            cases = [self._observables(run, flow.m)] if run.observables and not run.cases else \
                self._random_cases(run, family, flow.m)
            for index, fs in enumerate(cases):
                check = seminorm_bound_check(flow, family, fs, plan.with_seed(plan.seed + index),
                                             k=run.seminorm.get('k'), slack=run.slack, tau=run.tau)
                rows.append({'case': index + 1, **check.to_dict()})
                if not check.passed:
                    failures.append(f"seminorm bound case {index + 1}: {check.lhs:.4f} > {check.rhs:.4f} + slack")
        if not rows:
            raise ValueError("seminorm needs --observables or --family")
        summary = [('rows', str(len(rows))), ('failed checks', str(len(failures)))]
        return {'flow': flow.describe(), 'rows': rows}, rows, summary, failures

    def _run_vdc(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        flow = self._flow(run)
        if not isinstance(flow, TorusFlow):
            raise ValueError("van der Corput checks run on torus rotations")
        plan = plan_from_config(family.d, run.plan)
        cases = self._random_cases(run, family, flow.m) if run.cases else [self._observables(run, flow.m)]
        rows, failures = [], []
        for index, fs in enumerate(cases):
            check = vdc_check(flow, family, fs, run.psi, plan.with_seed(plan.seed + index), run.slack, run.tau)
            rows.append({'case': index + 1, **check.to_dict()})
            if not check.passed:
                failures.append(f"van der Corput case {index + 1}: {check.lhs:.4f} > {check.rhs:.4f} + slack")
        summary = [('cases', str(len(rows))), ('passed', str(len(rows) - len(failures)))]
        return {'flow': flow.describe(), 'rows': rows}, rows, summary, failures

    def _run_returns(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        E = self._interval_set(run)
        density = run.density
        report = syndetic_scan(
            E, self._exact(density.get('delta', 0.05)), family, float(density.get('epsilon', 0.1)),
            smax=self._exact(density.get('smax', 50)), step=self._exact(density.get('step', 0.01)),
            L=self._exact(density.get('window', 100)), analysis=run.analysis, tau=run.tau,
        )
        return report, [report.to_dict()], self._gap_summary(report), self._gap_failures(report)

    def _run_recurrence(self, run: RunConfig) -> Tuple[Any, List[Dict[str, Any]], List[Tuple[str, str]], List[str]]:
        family = self._family(run)
        A = self._interval_set(run)
        flow = self._flow(run)
        if not isinstance(flow, TorusFlow) or flow.m != 1:
            raise ValueError("recurrence scans run on a circle rotation (one gamma)")
        density = run.density
        report = recurrence_scan(
            A, float(flow.gamma[0]), family, float(density.get('epsilon', 0.1)),
            smax=self._exact(density.get('smax', 50)), step=self._exact(density.get('step', 0.01)),
            analysis=run.analysis, tau=run.tau,
        )
        return report, [report.to_dict()], self._gap_summary(report), self._gap_failures(report)

    @staticmethod
    def _gap_summary(report: Any) -> List[Tuple[str, str]]:
        return [
            ('threshold', f"{report.threshold:.6g}"),
            ('good points', f"{len(report.good)} / {report.grid_size}"),
            ('max gap', f"{report.max_gap:.6g}"),
            ('certified', f"{report.certified} ({report.gate or 'no gate'})"),
        ]

    @staticmethod
    def _gap_failures(report: Any) -> List[str]:
        failures = list(report.notes) if not report.certified else []
        if not report.good:
            failures.append("no good points on the scan grid")
        return failures

    def get_stats(self) -> Dict[str, Any]:
        stats = self.stats.copy()
        if stats['start_time']:
            stats['uptime'] = (datetime.now() - stats['start_time']).total_seconds()
        return stats
