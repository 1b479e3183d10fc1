"""
Exact linear algebra over Q[pi, 1/pi].

Elimination is fraction-free (Bareiss): every intermediate entry is a minor
of the input, so the divisions by the previous pivot are exact in the ring.
Kernels and solves are assembled from determinants (Cramer) so no entry ever
leaves the ring unless the caller asks for a genuine field division.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple, Union
import logging

from .coeff import Coeff, CoefficientFieldError, ONE, ZERO, Scalar

logger = logging.getLogger(__name__)

Matrix = List[List[Coeff]]
Entry = Union[Coeff, Scalar]


@dataclass
class EchelonForm:
    """Result of fraction-free row reduction."""
    rows: Matrix
    pivots: List[int]
    row_order: List[int]
    swaps: int

    @property
    def rank(self) -> int:
        return len(self.pivots)


def as_matrix(entries: Sequence[Sequence[Entry]]) -> Matrix:
    return [[Coeff.coerce(value) for value in row] for row in entries]


def shape(matrix: Sequence[Sequence[Coeff]]) -> Tuple[int, int]:
    rows = len(matrix)
    return rows, (len(matrix[0]) if rows else 0)


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(matrix: Sequence[Sequence[Coeff]]) -> Matrix:
    rows, cols = shape(matrix)
    return [[matrix[i][j] for i in range(rows)] for j in range(cols)]


def matmul(left: Sequence[Sequence[Coeff]], right: Sequence[Sequence[Coeff]]) -> Matrix:
    rows, inner = shape(left)
    inner_right, cols = shape(right)
    if inner != inner_right:
        raise ValueError(f"cannot multiply {rows}x{inner} by {inner_right}x{cols}")
    result = []
    for i in range(rows):
        row = []
        for j in range(cols):
            total = ZERO
            for m in range(inner):
                a = left[i][m]
                if a:
                    b = right[m][j]
                    if b:
                        total = total + a * b
            row.append(total)
        result.append(row)
    return result


def dot(row: Sequence[Coeff], column: Sequence[Coeff]) -> Coeff:
    total = ZERO
    for a, b in zip(row, column):
        if a and b:
            total = total + a * b
    return total


def _is_rational(matrix: Sequence[Sequence[Coeff]]) -> bool:
    return all(value.is_rational() for row in matrix for value in row)


def echelon(matrix: Sequence[Sequence[Entry]]) -> EchelonForm:
    """
    Fraction-free row echelon form.

    Columns without a pivot are skipped; the previous pivot stays the
    divisor, which keeps every entry a minor of the input.
    """
    rows = [list(row) for row in as_matrix(matrix)]
    n_rows, n_cols = shape(rows)
    order = list(range(n_rows))
    pivots: List[int] = []
    previous = ONE
    swaps = 0
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            order[r], order[pivot_row] = order[pivot_row], order[r]
            swaps += 1
        pivot = rows[r][c]
        for i in range(r + 1, n_rows):
            factor = rows[i][c]
            for j in range(c + 1, n_cols):
                value = pivot * rows[i][j] - factor * rows[r][j]
                rows[i][j] = value.exact_div(previous) if value else ZERO
            rows[i][c] = ZERO
        previous = pivot
        pivots.append(c)
        r += 1
    return EchelonForm(rows=rows, pivots=pivots, row_order=order, swaps=swaps)


def _rational_rank(matrix: Sequence[Sequence[Coeff]]) -> int:
    rows = [[value.as_fraction() for value in row] for row in matrix]
    n_rows, n_cols = shape(rows)
    rank = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(rank, n_rows) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        for i in range(rank + 1, n_rows):
            if rows[i][c]:
                ratio = rows[i][c] / rows[rank][c]
                for j in range(c, n_cols):
                    rows[i][j] -= ratio * rows[rank][j]
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank(matrix: Sequence[Sequence[Entry]]) -> int:
    """Rank over Q(pi)."""
    matrix = as_matrix(matrix)
    if not matrix or not matrix[0]:
        return 0
    if _is_rational(matrix):
        return _rational_rank(matrix)
    return echelon(matrix).rank


def determinant(matrix: Sequence[Sequence[Entry]]) -> Coeff:
    """Exact determinant of a square matrix (Bareiss)."""
    matrix = as_matrix(matrix)
    n, m = shape(matrix)
    if n != m:
        raise ValueError(f"determinant needs a square matrix, got {n}x{m}")
    if n == 0:
        return ONE
    form = echelon(matrix)
    if form.rank < n:
        return ZERO
    value = form.rows[n - 1][n - 1]
    return -value if form.swaps % 2 else value


def normalize_vector(vector: List[Coeff], scale: Optional[Coeff] = None) -> List[Coeff]:
    """Divide out a common scale when it is exact, then fix the sign."""
    if scale is not None and scale:
        try:
            vector = [value.exact_div(scale) for value in vector]
        except CoefficientFieldError:
            pass
    lead = next((value for value in vector if value), None)
    if lead is None:
        return vector
    # Clear the rational content and the common power of pi when both are units.
    if all(value.is_unit() or not value for value in vector):
        exponents = [min(value.terms) for value in vector if value]
        shift = Coeff.monomial(1, -min(exponents))
        vector = [value * shift for value in vector]
    content = _rational_content(vector)
    if content != 1:
        vector = [value * (1 / content) for value in vector]
    lead = next(value for value in vector if value)
    if next(lead.items())[1] < 0:
        vector = [-value for value in vector]
    return vector


def _rational_content(vector: Sequence[Coeff]) -> Fraction:
    numerators = 0
    denominator = 1
    for value in vector:
        for rational in value.terms.values():
            numerators = gcd(numerators, rational.numerator)
            denominator = denominator * rational.denominator // gcd(denominator, rational.denominator)
    if numerators == 0:
        return Fraction(1)
    return Fraction(numerators, denominator)


def kernel(matrix: Sequence[Sequence[Entry]]) -> List[List[Coeff]]:
    """
    Basis of the right kernel {x : M x = 0} over Q(pi), with entries in the ring.

    One vector per free column, built by Cramer's rule on the pivot block.
    """
    matrix = as_matrix(matrix)
    n_rows, n_cols = shape(matrix)
    if n_rows == 0:
        return [[ONE if i == j else ZERO for i in range(n_cols)] for j in range(n_cols)]
    form = echelon(matrix)
    pivots = form.pivots
    block_rows = form.rows[:form.rank]
    free = [c for c in range(n_cols) if c not in pivots]
    square = [[row[c] for c in pivots] for row in block_rows]
    scale = determinant(square) if pivots else ONE
    basis = []
    for f in free:
        vector = [ZERO] * n_cols
        vector[f] = scale
        column = [-row[f] for row in block_rows]
        for position, c in enumerate(pivots):
            replaced = [row[:position] + [column[i]] + row[position + 1:] for i, row in enumerate(square)]
            vector[c] = determinant(replaced)
        basis.append(normalize_vector(vector, scale))
    return basis


def left_kernel(matrix: Sequence[Sequence[Entry]]) -> List[List[Coeff]]:
    """Basis of {c : c^T M = 0}, i.e. linear dependences among the rows."""
    return kernel(transpose(as_matrix(matrix)))


def solve(matrix: Sequence[Sequence[Entry]], rhs: Sequence[Entry]) -> List[Coeff]:
    """
    Solve M x = b for a consistent system with full column rank.

    Raises:
        ValueError: inconsistent or rank-deficient system
        CoefficientFieldError: the solution leaves Q[pi, 1/pi]
    """
    matrix = as_matrix(matrix)
    rhs_values = [Coeff.coerce(value) for value in rhs]
    n_rows, n_cols = shape(matrix)
    if len(rhs_values) != n_rows:
        raise ValueError("right-hand side length does not match the matrix")
    form = echelon(transpose(matrix))
    if form.rank < n_cols:
        raise ValueError("system does not have full column rank")
    chosen = form.pivots
    square = [matrix[i] for i in chosen]
    values = [rhs_values[i] for i in chosen]
    denominator = determinant(square)
    solution = []
    for position in range(n_cols):
        replaced = [row[:position] + [values[i]] + row[position + 1:] for i, row in enumerate(square)]
        solution.append(determinant(replaced).exact_div(denominator))
    for row, target in zip(matrix, rhs_values):
        if dot(row, solution) != target:
            raise ValueError("inconsistent linear system")
    return solution


def inverse(matrix: Sequence[Sequence[Entry]]) -> Matrix:
    """
    Exact inverse via the adjugate.

    Raises:
        ValueError: singular matrix
        CoefficientFieldError: entries of the inverse leave Q[pi, 1/pi]
    """
    matrix = as_matrix(matrix)
    n, _ = shape(matrix)
    det = determinant(matrix)
    if not det:
        raise ValueError("matrix is singular")
    result = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(matrix) if k != i]
            cofactor = determinant(minor)
            if (i + j) % 2:
                cofactor = -cofactor
            result[j][i] = cofactor.exact_div(det)
    return result


def format_matrix(matrix: Sequence[Sequence[Coeff]]) -> List[List[str]]:
    return [[str(value) for value in row] for row in matrix]
