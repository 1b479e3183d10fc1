"""
Polynomial families: degrees, equivalence classes, weight vectors,
independence over R and the linear reductions used by the complexity search.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union
import logging

from . import linalg
from .coeff import Coeff, ZERO, Scalar
from .polynomial import Exponent, MultiPoly, default_names, graded_lex_key

logger = logging.getLogger(__name__)


class FamilyError(ValueError):
    """Raised for families that violate an operation's preconditions."""


class DisjointSet:
    """Union-find over 0..n-1 with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def groups(self) -> List[List[int]]:
        grouped: Dict[int, List[int]] = {}
        for i in range(len(self.parent)):
            grouped.setdefault(self.find(i), []).append(i)
        return list(grouped.values())


class PolyFamily:
    """Ordered, immutable family {p_1, ..., p_k} of polynomials in d variables."""

    def __init__(self, d: int, polys: Sequence[MultiPoly], names: Optional[Sequence[str]] = None):
        if not polys:
            raise FamilyError("a family needs at least one member")
        for p in polys:
            if p.d != d:
                raise FamilyError(f"member {p} has {p.d} variables, family has {d}")
        self.d = d
        self.names = tuple(names) if names is not None else tuple(polys[0].names)
        if len(self.names) != d:
            raise FamilyError("one name per variable is required")
        self.polys: Tuple[MultiPoly, ...] = tuple(p.with_names(self.names) for p in polys)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Union[Coeff, Scalar]]],
                  names: Optional[Sequence[str]] = None,
                  constants: Optional[Sequence[Union[Coeff, Scalar]]] = None) -> 'PolyFamily':
        """Linear family sum_i rows[j][i] * u_i (+ constants[j])."""
        if not rows:
            raise FamilyError("a family needs at least one member")
        width = len(rows[0])
        names = tuple(names) if names is not None else default_names(width)
        polys = []
        for j, row in enumerate(rows):
            p = MultiPoly.linear(row, names)
            if constants is not None:
                p = p + Coeff.coerce(constants[j])
            polys.append(p)
        return cls(width, polys, names)

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self) -> Iterator[MultiPoly]:
        return iter(self.polys)

    def __getitem__(self, index: int) -> MultiPoly:
        return self.polys[index]

    @property
    def k(self) -> int:
        return len(self.polys)

    @property
    def degree(self) -> Union[int, float]:
        return max(p.degree for p in self.polys)

    def is_linear(self) -> bool:
        return all(p.without_constant().is_linear() for p in self.polys)

    def constants(self) -> List[Coeff]:
        return [p.constant_term for p in self.polys]

    def without_constants(self) -> 'PolyFamily':
        return PolyFamily(self.d, [p.without_constant() for p in self.polys], self.names)

    def linear_rows(self) -> linalg.Matrix:
        """k x d coefficient matrix of a linear family."""
        if not self.is_linear():
            raise FamilyError(f"family {self} is not linear")
        return [p.linear_coefficients() for p in self.polys]

    def permuted(self, order: Sequence[int]) -> 'PolyFamily':
        return PolyFamily(self.d, [self.polys[i] for i in order], self.names)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PolyFamily):
            return self.d == other.d and self.polys == other.polys
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.d, self.polys))

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.polys) + "}"

    def __repr__(self) -> str:
        return f"PolyFamily({self.d}, '{self}')"


@dataclass(frozen=True)
class WeightVector:
    """Counts (w_1, ..., w_b) of equivalence classes per degree."""
    counts: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.counts)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"


@dataclass
class CoefficientMatrix:
    """
    Members written over an R-independent basis: p_j - p_j(0) = sum_i entries[j][i] * q_i.

    ``violations`` lists the indices whose constant term p_j(0) is nonzero.
    """
    entries: linalg.Matrix
    basis: PolyFamily
    constants: List[Coeff] = field(default_factory=list)
    basis_indices: List[int] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return self.basis.k

    @property
    def violations(self) -> List[int]:
        return [j for j, c in enumerate(self.constants) if c]

    def column(self, i: int) -> List[Coeff]:
        return [row[i] for row in self.entries]

    def reconstruct(self, j: int) -> MultiPoly:
        """sum_i alpha_{j,i} q_i (constant term excluded)."""
        total = MultiPoly(self.basis.d, {}, self.basis.names)
        for alpha, q in zip(self.entries[j], self.basis):
            if alpha:
                total = total + q * alpha
        return total

    def as_linear_family(self, names: Optional[Sequence[str]] = None) -> PolyFamily:
        return PolyFamily.from_rows(self.entries, names or default_names(self.cols))

    def to_dict(self) -> Dict[str, object]:
        return {
            'basis': [str(q) for q in self.basis],
            'matrix': linalg.format_matrix(self.entries),
            'constants': [str(c) for c in self.constants],
            'violations': [j + 1 for j in self.violations],
        }


@dataclass
class IndependenceResult:
    """Outcome of an independence test; ``witness`` is a dependence vector when dependent."""
    independent: bool
    rank: int
    witness: Optional[List[Coeff]] = None

    def __bool__(self) -> bool:
        return self.independent


# Equivalence and weight vectors -----------------------------------------

def _check_same_d(p: MultiPoly, q: MultiPoly) -> None:
    if p.d != q.d:
        raise FamilyError(f"mismatched variable counts: {p.d} and {q.d}")


def equivalent(p: MultiPoly, q: MultiPoly) -> bool:
    """deg p = deg q and deg(p - q) < deg p; constants are all equivalent."""
    _check_same_d(p, q)
    if p.is_constant() and q.is_constant():
        return True
    return p.degree == q.degree and (p - q).degree < p.degree


def equivalence_classes(polys: Sequence[MultiPoly]) -> List[List[int]]:
    """Partition member indices into equivalence classes (union-find over pairs)."""
    classes = DisjointSet(len(polys))
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if polys[i].degree == polys[j].degree and equivalent(polys[i], polys[j]):
                classes.union(i, j)
    return classes.groups()


def weight_vector(family: PolyFamily) -> WeightVector:
    constant = [str(p) for p in family if p.is_constant()]
    if constant:
        raise FamilyError(f"weight vectors need non-constant members, found {', '.join(constant)}")
    b = int(family.degree)
    counts = [0] * b
    for group in equivalence_classes(family.polys):
        counts[int(family[group[0]].degree) - 1] += 1
    return WeightVector(tuple(counts))


def weight_less(w: WeightVector, w2: WeightVector) -> bool:
    """Degree first, then right-aligned lexicographic comparison."""
    if w.degree != w2.degree:
        return w.degree < w2.degree
    for a, b in zip(reversed(w.counts), reversed(w2.counts)):
        if a != b:
            return a < b
    return False


def is_nice(family: PolyFamily) -> bool:
    if any(p.is_constant() for p in family):
        return False
    for i in range(family.k):
        for j in range(i + 1, family.k):
            if (family[i] - family[j]).is_constant():
                return False
    return True


def is_standard(family: PolyFamily) -> bool:
    return is_nice(family) and family[0].degree == family.degree


def require_nice(family: PolyFamily) -> None:
    if any(p.is_constant() for p in family):
        raise FamilyError(f"family {family} has a constant member")
    for i in range(family.k):
        for j in range(i + 1, family.k):
            if (family[i] - family[j]).is_constant():
                raise FamilyError(
                    f"family {family} is not nice: p{i + 1} - p{j + 1} is constant"
                )


# Independence --------------------------------------------------------------

def monomial_support(polys: Sequence[MultiPoly]) -> List[Exponent]:
    """Non-constant monomials occurring in any member, graded-lex order."""
    support = set()
    for p in polys:
        support.update(e for e in p.monomials() if sum(e) > 0)
    return sorted(support, key=graded_lex_key)


def coefficient_rows(polys: Sequence[MultiPoly], support: Optional[Sequence[Exponent]] = None) -> linalg.Matrix:
    support = monomial_support(polys) if support is None else support
    return [[p.coefficient(e) for e in support] for p in polys]


def r_independent(family: PolyFamily) -> IndependenceResult:
    """
    Independence over R of the constant-free members.

    Powers of pi are algebraically independent over Q, so the rank over Q(pi)
    equals the rank over R of the numeric coefficient vectors.
    """
    rows = coefficient_rows([p.without_constant() for p in family])
    width = len(rows[0]) if rows else 0
    rank = linalg.rank(rows) if width else 0
    if rank == family.k:
        return IndependenceResult(True, rank)
    if width == 0:
        witness = [Coeff.rational(1)] + [ZERO] * (family.k - 1)
    else:
        witness = linalg.left_kernel(rows)[0]
    logger.debug(f"Family {family} is dependent (rank {rank}), witness {[str(c) for c in witness]}")
    return IndependenceResult(False, rank, witness)


def rationally_independent(family: PolyFamily) -> IndependenceResult:
    """
    Independence over Q, treating every power of pi as a separate coordinate.

    This is the Weyl criterion for the path (p_1(s), ..., p_k(s)) on the torus.
    """
    polys = [p.without_constant() for p in family]
    support = monomial_support(polys)
    exponents = sorted({e for p in polys for c in p.terms.values() for e in c.terms})
    rows = [
        [p.coefficient(m).terms.get(e, 0) for m in support for e in exponents]
        for p in polys
    ]
    width = len(rows[0]) if rows else 0
    rank = linalg.rank(rows) if width else 0
    if rank == family.k:
        return IndependenceResult(True, rank)
    witness = linalg.left_kernel(rows)[0] if width else [Coeff.rational(1)] + [ZERO] * (family.k - 1)
    return IndependenceResult(False, rank, witness)


# Decomposition and linear reductions -------------------------------------

def independent_decomposition(family: PolyFamily) -> CoefficientMatrix:
    """
    Choose a maximal R-independent subfamily (first come) and express
    every constant-free member over it exactly.
    """
    stripped = [p.without_constant() for p in family]
    if all(p.is_zero() for p in stripped):
        raise FamilyError(f"family {family} is degenerate: every member is constant")
    support = monomial_support(stripped)
    rows = coefficient_rows(stripped, support)

    chosen: List[int] = []
    for j, row in enumerate(rows):
        if not stripped[j].is_zero() and linalg.rank([rows[i] for i in chosen] + [row]) == len(chosen) + 1:
            chosen.append(j)
    basis_rows = [rows[i] for i in chosen]
    basis_columns = linalg.transpose(basis_rows)

    entries = []
    for j, row in enumerate(rows):
        if j in chosen:
            entries.append([Coeff.rational(1) if i == j else ZERO for i in chosen])
        elif stripped[j].is_zero():
            entries.append([ZERO] * len(chosen))
        else:
            entries.append(linalg.solve(basis_columns, row))
    basis = PolyFamily(family.d, [stripped[i] for i in chosen], family.names)
    matrix = CoefficientMatrix(entries, basis, family.constants(), chosen)
    logger.debug(f"Decomposed {family} over basis {basis} (l={len(chosen)})")
    return matrix


def linearize(family: PolyFamily, names: Optional[Sequence[str]] = None) -> PolyFamily:
    """{sum_i alpha_{j,i} u_i}_j over fresh variables u_1..u_l."""
    return independent_decomposition(family).as_linear_family(names)


def change_of_variables(family: PolyFamily, B: Sequence[Sequence[Union[Coeff, Scalar]]],
                        names: Optional[Sequence[str]] = None) -> PolyFamily:
    """
    Substitute u_i = sum_m B[i][m] v_m into a linear family.

    The new coefficient matrix is A * B; constant terms are carried over.
    """
    matrix = linalg.as_matrix(B)
    if len(matrix) != family.d or any(len(row) != family.d for row in matrix):
        raise FamilyError(f"substitution must be {family.d}x{family.d}")
    if not linalg.determinant(matrix):
        raise FamilyError("substitution matrix is singular")
    rows = linalg.matmul(family.linear_rows(), matrix)
    return PolyFamily.from_rows(rows, names or default_names(family.d), family.constants())
