"""
Flow-average complexity bounds for polynomial families.

The family is linearized over an R-independent basis, then for each target
p_j a column gamma is chosen so that p_j(gamma) is nonzero and differs from
every other p_i(gamma).  Completing gamma to an invertible substitution B
puts those values in the first column of A * B, and the number of distinct
nonzero values there bounds the p_j-complexity.

Candidates come from a fixed small-vector enumeration.  An exact pass over
the flats of the hyperplane arrangement {p_i = 0}, {p_i = p_i'} finds the
least attainable bound, so results do not depend on the chosen coordinates.
"""

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple
import logging

from . import linalg
from .coeff import Coeff, ONE, ZERO
from .family import (
    CoefficientMatrix, DisjointSet, FamilyError, IndependenceResult, PolyFamily,
    WeightVector, change_of_variables, independent_decomposition, is_nice,
    is_standard, r_independent, require_nice, weight_vector,
)

logger = logging.getLogger(__name__)

RULE_SUBSTITUTION = 'substitution'
RULE_SIZE_CAP = 'size-cap'
RULE_INDEPENDENT = 'independent'

DEFAULT_BUDGET = 10000
DEFAULT_MAX_FLATS = 20000


@dataclass(frozen=True)
class Lambda1:
    """Distinct nonzero entries of one coefficient column, in order of appearance."""
    values: Tuple[Coeff, ...]

    @classmethod
    def from_column(cls, column: Sequence[Coeff]) -> 'Lambda1':
        seen: List[Coeff] = []
        for value in column:
            if value and value not in seen:
                seen.append(value)
        return cls(tuple(seen))

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class Substitution:
    """One change of variables u = B v; gamma is the first column of B."""
    gamma: List[Coeff]
    B: linalg.Matrix
    det: Coeff

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': [str(c) for c in self.gamma],
            'B': linalg.format_matrix(self.B),
            'det': str(self.det),
        }


@dataclass
class ComplexityCertificate:
    """Replayable evidence for a p_j-complexity bound (j is 0-based)."""
    j: int
    bound: int
    rule: str
    family: str
    target: str
    linearization: str
    substitutions: List[Substitution] = field(default_factory=list)
    result_family: str = ""
    lambda_before: Optional[int] = None
    lambda_after: Optional[int] = None
    flagged: bool = False
    exact_minimum: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'j': self.j + 1,
            'bound': self.bound,
            'upper_bound': self.bound > 0,
            'rule': self.rule,
            'target': self.target,
            'substitutions': [s.to_dict() for s in self.substitutions],
            'result_family': self.result_family,
            'lambda_before': self.lambda_before,
            'lambda_after': self.lambda_after,
            'flagged': self.flagged,
            'exact_minimum': self.exact_minimum,
        }


@dataclass
class FamilyComplexityReport:
    """Per-j certificates and the family bound (max over j, at most k - 1)."""
    family: PolyFamily
    decomposition: CoefficientMatrix
    linearization: PolyFamily
    per_j: List[ComplexityCertificate]
    independence: IndependenceResult
    weight: Optional[WeightVector]
    nice: bool
    standard: bool

    @property
    def family_bound(self) -> int:
        return max(cert.bound for cert in self.per_j)

    @property
    def exact(self) -> bool:
        return self.family_bound == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': str(self.family),
            'linearization': str(self.linearization),
            'decomposition': self.decomposition.to_dict(),
            'independent': self.independence.independent,
            'witness': ([str(c) for c in self.independence.witness]
                        if self.independence.witness is not None else None),
            'weight_vector': list(self.weight.counts) if self.weight else None,
            'nice': self.nice,
            'standard': self.standard,
            'per_j': [cert.to_dict() for cert in self.per_j],
            'family_bound': self.family_bound,
            'exact': self.exact,
        }


# Direct bound ----------------------------------------------------------------

def _rows_of(family: Any) -> linalg.Matrix:
    if isinstance(family, CoefficientMatrix):
        return family.entries
    if isinstance(family, PolyFamily):
        return family.linear_rows()
    return linalg.as_matrix(family)


def pj_bound_direct(family: Any, j: int, col: int) -> Optional[int]:
    """
    |Lambda_1| - 1 for column ``col`` when alpha_{j,col} is nonzero and
    distinct from every other alpha_{i,col}; None otherwise.
    """
    column = [row[col] for row in _rows_of(family)]
    target = column[j]
    if not target or any(column[i] == target for i in range(len(column)) if i != j):
        return None
    return len(Lambda1.from_column(column)) - 1


def complexity_zero(family: PolyFamily) -> bool:
    """Complexity 0 exactly when the family is R-independent."""
    require_nice(family)
    return r_independent(family).independent


# Candidate enumeration --------------------------------------------------------

def _phase_entries() -> List[List[Coeff]]:
    tau = Coeff.monomial(1, 1)
    tau_inv = Coeff.monomial(1, -1)
    units = [ONE, -ONE]
    phase1 = [ZERO] + units
    phase2 = [Coeff.rational(v) for v in (-2, -1, 0, 1, 2)]
    phase3 = phase1 + [tau, -tau, tau_inv, -tau_inv]
    phase4 = phase3 + [
        Coeff.rational(2), Coeff.rational(-2),
        Coeff.rational(Fraction(1, 2)), Coeff.rational(Fraction(-1, 2)),
        Coeff.monomial(1, 2), Coeff.monomial(-1, 2),
        Coeff.monomial(1, -2), Coeff.monomial(-1, -2),
    ]
    return [phase1, phase2, phase3, phase4]


def enumerate_candidates(l: int, budget: int) -> Iterator[Tuple[Coeff, ...]]:
    """Nonzero small vectors in a fixed order, at most ``budget`` of them."""
    seen = set()
    produced = 0
    for entries in _phase_entries():
        for gamma in itertools.product(entries, repeat=l):
            if produced >= budget:
                return
            if all(not c for c in gamma) or gamma in seen:
                continue
            seen.add(gamma)
            produced += 1
            yield gamma


def _valid_bound(values: Sequence[Coeff], j: int) -> Optional[int]:
    target = values[j]
    if not target:
        return None
    for i, value in enumerate(values):
        if i != j and value == target:
            return None
    return len(Lambda1.from_column(values)) - 1


# Arrangement flats -----------------------------------------------------------

@dataclass
class _Flat:
    basis: List[List[Coeff]]
    closure: FrozenSet[int]


class ArrangementSearch:
    """
    Enumerate flats of the arrangement of p_i = 0 and p_i = p_i' in the
    parameter space of a linear family and record the least singleton-class bound
    attainable for each target index.
    """

    def __init__(self, rows: linalg.Matrix, max_flats: int = DEFAULT_MAX_FLATS):
        self.rows = rows
        self.k = len(rows)
        self.l = len(rows[0])
        self.max_flats = max_flats
        self.forms: List[List[Coeff]] = [list(row) for row in rows]
        self.pair_index: Dict[Tuple[int, int], int] = {}
        for i in range(self.k):
            for i2 in range(i + 1, self.k):
                self.pair_index[(i, i2)] = len(self.forms)
                self.forms.append([a - b for a, b in zip(rows[i], rows[i2])])
        self.truncated = False
        self.flats_visited = 0

    def _vanishing(self, basis: List[List[Coeff]]) -> FrozenSet[int]:
        return frozenset(
            index for index, form in enumerate(self.forms)
            if all(not linalg.dot(form, v) for v in basis)
        )

    @staticmethod
    def _intersect(basis: List[List[Coeff]], form: List[Coeff]) -> List[List[Coeff]]:
        weights = [linalg.dot(form, v) for v in basis]
        p = next(i for i, w in enumerate(weights) if w)
        result = []
        for f, v in enumerate(basis):
            if f == p:
                continue
            combined = [weights[p] * a - weights[f] * b for a, b in zip(v, basis[p])]
            result.append(linalg.normalize_vector(combined))
        return result

    def _bounds_on(self, closure: FrozenSet[int]) -> List[Optional[int]]:
        vanishing = {i for i in range(self.k) if i in closure}
        classes = DisjointSet(self.k)
        for (i, i2), index in self.pair_index.items():
            if index in closure:
                classes.union(i, i2)
        groups = [g for g in classes.groups() if g[0] not in vanishing]
        sizes = {classes.find(g[0]): len(g) for g in groups}
        bounds: List[Optional[int]] = []
        for j in range(self.k):
            if j in vanishing or sizes.get(classes.find(j), 0) != 1:
                bounds.append(None)
            else:
                bounds.append(len(groups) - 1)
        return bounds

    def run(self) -> Tuple[List[Optional[int]], List[Optional[_Flat]]]:
        root_basis = [[ONE if i == m else ZERO for i in range(self.l)] for m in range(self.l)]
        root = _Flat(root_basis, self._vanishing(root_basis))
        best: List[Optional[int]] = [None] * self.k
        best_flat: List[Optional[_Flat]] = [None] * self.k
        seen = {root.closure}
        queue = deque([root])
        while queue:
            flat = queue.popleft()
            self.flats_visited += 1
            for j, bound in enumerate(self._bounds_on(flat.closure)):
                if bound is not None and (best[j] is None or bound < best[j]):
                    best[j] = bound
                    best_flat[j] = flat
            if len(flat.basis) <= 1:
                continue
            children: List[FrozenSet[int]] = []
            for index, form in enumerate(self.forms):
                if index in flat.closure or any(index in c for c in children):
                    continue
                child_basis = self._intersect(flat.basis, form)
                closure = self._vanishing(child_basis)
                children.append(closure)
                if closure in seen:
                    continue
                if len(seen) >= self.max_flats:
                    self.truncated = True
                    continue
                seen.add(closure)
                queue.append(_Flat(child_basis, closure))
        logger.debug(f"Visited {self.flats_visited} flats (truncated={self.truncated})")
        return best, best_flat

    def generic_point(self, flat: _Flat) -> List[Coeff]:
        """A point of the flat on which exactly the closure forms vanish."""
        r = len(flat.basis)
        others = [form for index, form in enumerate(self.forms) if index not in flat.closure]
        trials: Iterator[Tuple[int, ...]] = itertools.chain(
            [(1,) * r],
            ((tuple(n ** e for e in range(r))) for n in itertools.count(2)),
        )
        for weights in trials:
            point = [ZERO] * self.l
            for w, v in zip(weights, flat.basis):
                point = [a + b * w for a, b in zip(point, v)]
            if all(linalg.dot(form, point) for form in others):
                return linalg.normalize_vector(point)
        raise AssertionError("unreachable")


# Search ------------------------------------------------------------------------

def complete_substitution(gamma: Sequence[Coeff]) -> linalg.Matrix:
    """B with gamma as first column, completed greedily by standard basis columns."""
    l = len(gamma)
    columns = [list(gamma)]
    for m in range(l):
        if len(columns) == l:
            break
        unit = [ONE if i == m else ZERO for i in range(l)]
        if linalg.rank(columns + [unit]) == len(columns) + 1:
            columns.append(unit)
    return linalg.transpose(columns)


class ComplexityAnalyzer:
    """Compute certified complexity bounds for polynomial families."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the analyzer.

        Args:
            config: Analysis configuration dictionary (budget, exact_search, max_flats)
        """
        config = config or {}
        self.budget = int(config.get('budget', DEFAULT_BUDGET))
        self.exact_search = bool(config.get('exact_search', True))
        self.max_flats = int(config.get('max_flats', DEFAULT_MAX_FLATS))
        logger.debug(f"Complexity analyzer: budget={self.budget}, exact_search={self.exact_search}")

    def analyze(self, family: PolyFamily) -> FamilyComplexityReport:
        require_nice(family)
        decomposition = independent_decomposition(family)
        linear = decomposition.as_linear_family()
        independence = r_independent(family)
        certificates = self._certificates(family, linear, independence, range(family.k))
        report = FamilyComplexityReport(
            family=family,
            decomposition=decomposition,
            linearization=linear,
            per_j=certificates,
            independence=independence,
            weight=weight_vector(family),
            nice=is_nice(family),
            standard=is_standard(family),
        )
        logger.info(f"Analyzed {family}: family bound {report.family_bound}"
                    f"{' (exact)' if report.exact else ' (upper bound)'}")
        return report

    def bound_for(self, family: PolyFamily, j: int) -> ComplexityCertificate:
        require_nice(family)
        if not 0 <= j < family.k:
            raise IndexError(f"index {j} out of range for a family of {family.k}")
        linear = independent_decomposition(family).as_linear_family()
        return self._certificates(family, linear, r_independent(family), [j])[0]

    def _certificates(self, family: PolyFamily, linear: PolyFamily,
                      independence: IndependenceResult, targets: Sequence[int]) -> List[ComplexityCertificate]:
        rows = linear.linear_rows()
        k, l = len(rows), len(rows[0])
        base = dict(family=str(family), linearization=str(linear))
        lambda_before = len(Lambda1.from_column([row[0] for row in rows]))

        if independence.independent:
            return [ComplexityCertificate(j=j, bound=0, rule=RULE_INDEPENDENT, target=str(linear[j]),
                                          result_family=str(linear), lambda_before=lambda_before,
                                          **base) for j in targets]

        exact: List[Optional[int]] = [None] * k
        flats: List[Optional[_Flat]] = [None] * k
        search: Optional[ArrangementSearch] = None
        if self.exact_search:
            search = ArrangementSearch(rows, self.max_flats)
            exact, flats = search.run()

        best: Dict[int, Tuple[int, Tuple[Coeff, ...]]] = {}
        pending = set(targets)
        tried = 0
        for gamma in enumerate_candidates(l, self.budget):
            tried += 1
            values = [linalg.dot(row, gamma) for row in rows]
            for j in list(pending):
                bound = _valid_bound(values, j)
                if bound is not None and (j not in best or bound < best[j][0]):
                    best[j] = (bound, gamma)
                    if exact[j] is not None and bound <= exact[j]:
                        pending.discard(j)
            if self.exact_search and not pending:
                break
        logger.debug(f"Tried {tried} candidate columns for {family}")

        certificates = []
        for j in targets:
            gamma: Optional[Sequence[Coeff]] = None
            if j in best:
                gamma = best[j][1]
            if search is not None and exact[j] is not None and (j not in best or exact[j] < best[j][0]):
                gamma = search.generic_point(flats[j])
            if gamma is None:
                logger.warning(f"No valid column found for p{j + 1} within budget; using the k-1 cap")
                certificates.append(ComplexityCertificate(
                    j=j, bound=k - 1, rule=RULE_SIZE_CAP, target=str(linear[j]),
                    result_family=str(linear), lambda_before=lambda_before,
                    flagged=True, exact_minimum=False, **base))
                continue
            B = complete_substitution(gamma)
            det = linalg.determinant(B)
            result = change_of_variables(linear, B)
            first_column = [row[0] for row in result.linear_rows()]
            bound = pj_bound_direct(result, j, 0)
            if bound is None:
                raise FamilyError(f"substitution for p{j + 1} does not separate the target")
            certificates.append(ComplexityCertificate(
                j=j, bound=min(bound, k - 1), rule=RULE_SUBSTITUTION, target=str(linear[j]),
                substitutions=[Substitution(list(gamma), B, det)],
                result_family=str(result), lambda_before=lambda_before,
                lambda_after=len(Lambda1.from_column(first_column)),
                exact_minimum=search is not None and not search.truncated,
                **base))
        return certificates


def pj_bound_search(family: PolyFamily, j: int, budget: int = DEFAULT_BUDGET,
                    exact_search: bool = True, max_flats: int = DEFAULT_MAX_FLATS) -> ComplexityCertificate:
    analyzer = ComplexityAnalyzer({'budget': budget, 'exact_search': exact_search, 'max_flats': max_flats})
    return analyzer.bound_for(family, j)


def family_complexity_bounds(family: PolyFamily, budget: int = DEFAULT_BUDGET,
                             exact_search: bool = True,
                             max_flats: int = DEFAULT_MAX_FLATS) -> FamilyComplexityReport:
    analyzer = ComplexityAnalyzer({'budget': budget, 'exact_search': exact_search, 'max_flats': max_flats})
    return analyzer.analyze(family)


# Replay ------------------------------------------------------------------------

def verify_certificate(cert: ComplexityCertificate, family: PolyFamily) -> List[str]:
    """Re-derive a certificate; returns the list of mismatches (empty when valid)."""
    problems: List[str] = []
    if str(family) != cert.family:
        recorded = sorted(cert.family.strip('{}').split(', '))
        current = sorted(str(p) for p in family)
        if recorded == current:
            problems.append(f"index mismatch: family members were reordered ({cert.family} vs {family})")
        else:
            problems.append(f"family mismatch: certificate for {cert.family}, got {family}")

    linear = independent_decomposition(family).as_linear_family()
    if str(linear) != cert.linearization:
        problems.append(f"linearization mismatch: {linear} vs recorded {cert.linearization}")
    if not 0 <= cert.j < linear.k:
        problems.append(f"index mismatch: p{cert.j + 1} does not exist")
        return problems
    if str(linear[cert.j]) != cert.target:
        problems.append(f"index mismatch: p{cert.j + 1} is {linear[cert.j]}, certificate targets {cert.target}")

    if cert.rule == RULE_INDEPENDENT:
        if not r_independent(family).independent:
            problems.append("independence certificate for a dependent family")
        if cert.bound != 0:
            problems.append(f"independence certificate with bound {cert.bound}")
        return problems
    if cert.rule == RULE_SIZE_CAP:
        if cert.bound != linear.k - 1:
            problems.append(f"size-cap certificate with bound {cert.bound}, expected {linear.k - 1}")
        return problems
    if cert.rule != RULE_SUBSTITUTION:
        problems.append(f"unknown rule {cert.rule!r}")
        return problems

    current = linear
    try:
        for step, sub in enumerate(cert.substitutions):
            det = linalg.determinant(sub.B)
            if det != sub.det:
                problems.append(f"step {step + 1}: determinant {det} differs from recorded {sub.det}")
            first_column = [row[0] for row in sub.B]
            if first_column != list(sub.gamma):
                problems.append(f"step {step + 1}: gamma is not the first column of B")
            current = change_of_variables(current, sub.B)
    except (FamilyError, ValueError) as e:
        problems.append(f"substitution failed: {e}")
        return problems
    if str(current) != cert.result_family:
        problems.append(f"result family {current} differs from recorded {cert.result_family}")
    bound = pj_bound_direct(current, cert.j, 0)
    if bound is None:
        problems.append("gamma does not separate the target member")
    elif bound != cert.bound:
        problems.append(f"bound {bound} differs from recorded {cert.bound}")
    lambda_after = len(Lambda1.from_column([row[0] for row in current.linear_rows()]))
    if cert.lambda_after is not None and lambda_after != cert.lambda_after:
        problems.append(f"|Lambda_1| after substitution is {lambda_after}, recorded {cert.lambda_after}")
    return problems


def replay_certificate(cert: ComplexityCertificate, family: PolyFamily) -> bool:
    """True iff every recorded intermediate of the certificate is reproduced."""
    problems = verify_certificate(cert, family)
    for problem in problems:
        logger.warning(f"Certificate p{cert.j + 1}: {problem}")
    return not problems
