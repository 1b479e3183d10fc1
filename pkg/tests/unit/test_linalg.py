"""
Unit tests for the linalg module.
"""

from itertools import combinations
from typing import List, Sequence

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyflow import linalg
from polyflow.coeff import Coeff, CoefficientFieldError, ONE, TAU, ZERO


integer_matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(min_value=-3, max_value=3), min_size=n, max_size=n),
        min_size=n, max_size=n,
    )
)


def _apply(matrix: List[List[Coeff]], vector: List[Coeff]) -> List[Coeff]:
    return [linalg.dot(row, vector) for row in matrix]


class TestRankAndDeterminant:
    """Test cases for rank and determinants over Q(pi)."""

    def test_rational_rank(self) -> None:
        """Test rank of rational matrices."""
        assert linalg.rank([[1, 2], [2, 4]]) == 1
        assert linalg.rank([[1, 0], [0, 1], [1, 1]]) == 2
        assert linalg.rank([]) == 0

    def test_rank_with_pi(self) -> None:
        """Test that dependences through powers of pi are detected."""
        assert linalg.rank([[TAU, TAU ** 2], [ONE, TAU]]) == 1
        assert linalg.rank([[TAU, ONE], [ONE, TAU]]) == 2

    def test_determinant(self) -> None:
        """Test Bareiss determinants, including row swaps."""
        assert linalg.determinant([[TAU, 1], [1, TAU]]) == TAU ** 2 - 1
        assert linalg.determinant([[0, 1], [1, 0]]) == -1
        assert linalg.determinant([[1, 2], [2, 4]]) == ZERO
        assert linalg.determinant([]) == ONE
        with pytest.raises(ValueError):
            linalg.determinant([[1, 2]])

    @settings(max_examples=50, deadline=None)
    @given(integer_matrices)
    def test_matches_numpy(self, rows: List[List[int]]) -> None:
        """Test exact determinant and rank against floating point."""
        array = np.array(rows, dtype=float)
        assert float(linalg.determinant(rows).as_fraction()) == pytest.approx(np.linalg.det(array), abs=1e-6)
        assert linalg.rank(rows) == np.linalg.matrix_rank(array)


class TestKernels:
    """Test cases for kernel computations."""

    def test_right_kernel(self) -> None:
        """Test that kernel vectors are annihilated."""
        matrix = linalg.as_matrix([[1, 1, 1]])
        basis = linalg.kernel(matrix)
        assert len(basis) == 2
        for vector in basis:
            assert all(not value for value in _apply(matrix, vector))

    def test_kernel_with_pi(self) -> None:
        """Test a kernel whose entries involve pi."""
        matrix = linalg.as_matrix([[TAU, TAU ** 2]])
        (vector,) = linalg.kernel(matrix)
        assert not _apply(matrix, vector)[0]
        assert vector[0] and vector[1]

    def test_left_kernel(self) -> None:
        """Test row dependences of the family u1, u2, 2*u1 - u2."""
        rows = linalg.as_matrix([[1, 0], [0, 1], [2, -1]])
        (c,) = linalg.left_kernel(rows)
        combination = [linalg.dot(c, column) for column in linalg.transpose(rows)]
        assert all(not value for value in combination)
        assert c == [Coeff.rational(2), Coeff.rational(-1), Coeff.rational(-1)]

    def test_full_rank_kernel(self) -> None:
        """Test the empty kernel of an invertible matrix."""
        assert linalg.kernel([[1, 0], [0, 1]]) == []


class TestSolveAndInverse:
    """Test cases for exact solves and inverses."""

    def test_solve(self) -> None:
        """Test a solve with a pi-valued solution."""
        solution = linalg.solve([[TAU, 0], [0, 1]], [TAU ** 2, 3])
        assert solution == [TAU, Coeff.rational(3)]

    def test_overdetermined_consistent(self) -> None:
        """Test a consistent tall system."""
        assert linalg.solve([[1], [2]], [3, 6]) == [Coeff.rational(3)]

    def test_inconsistent_system(self) -> None:
        """Test that inconsistent systems raise."""
        with pytest.raises(ValueError):
            linalg.solve([[1], [1]], [1, 2])

    def test_rank_deficient_system(self) -> None:
        """Test that rank-deficient systems raise."""
        with pytest.raises(ValueError):
            linalg.solve([[1, 1], [2, 2]], [1, 2])

    def test_solution_outside_ring(self) -> None:
        """Test a solve whose solution needs 1/(pi + 1)."""
        with pytest.raises(CoefficientFieldError):
            linalg.solve([[TAU + 1]], [1])

    def test_inverse(self) -> None:
        """Test the adjugate inverse."""
        inverse = linalg.inverse([[1, 1], [0, 1]])
        assert inverse == linalg.as_matrix([[1, -1], [0, 1]])
        product = linalg.matmul(linalg.as_matrix([[TAU, 0], [1, 1]]), linalg.inverse([[TAU, 0], [1, 1]]))
        assert product == linalg.identity(2)

    def test_singular_inverse(self) -> None:
        """Test that singular matrices have no inverse."""
        with pytest.raises(ValueError):
            linalg.inverse([[1, 2], [2, 4]])

    def test_matmul_shapes(self) -> None:
        """Test shape checking in products."""
        with pytest.raises(ValueError):
            linalg.matmul(linalg.as_matrix([[1, 2]]), linalg.as_matrix([[1, 2]]))


pi_entries = st.dictionaries(st.integers(min_value=-1, max_value=1), st.integers(min_value=-2, max_value=2),
                             max_size=2).map(Coeff)
rectangular_matrices = st.tuples(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4)).flatmap(
    lambda shape: st.lists(
        st.lists(pi_entries, min_size=shape[1], max_size=shape[1]),
        min_size=shape[0], max_size=shape[0],
    )
)


def _laplace_determinant(matrix: Sequence[Sequence[Coeff]]) -> Coeff:
    if len(matrix) == 1:
        return matrix[0][0]
    total = ZERO
    for col, entry in enumerate(matrix[0]):
        if entry:
            minor = [row[:col] + row[col + 1:] for row in matrix[1:]]
            term = entry * _laplace_determinant(minor)
            total = total + term if col % 2 == 0 else total - term
    return total


def _minor_rank(matrix: Sequence[Sequence[Coeff]]) -> int:
    rows, cols = len(matrix), len(matrix[0])
    for r in range(min(rows, cols), 0, -1):
        for chosen_rows in combinations(range(rows), r):
            for chosen_cols in combinations(range(cols), r):
                minor = [[matrix[i][j] for j in chosen_cols] for i in chosen_rows]
                if _laplace_determinant(minor):
                    return r
    return 0


class TestRankProperties:
    """Property tests comparing elimination against minor expansion."""

    @settings(max_examples=100, deadline=None)
    @given(rectangular_matrices)
    def test_rank_matches_minor_expansion(self, rows: List[List[Coeff]]) -> None:
        """Test the rank against the largest nonvanishing minor."""
        assert linalg.rank(rows) == _minor_rank(rows)

    @settings(max_examples=100, deadline=None)
    @given(integer_matrices)
    def test_determinant_matches_laplace(self, rows: List[List[int]]) -> None:
        """Test the determinant against cofactor expansion."""
        matrix = [[Coeff.rational(v) for v in row] for row in rows]
        assert linalg.determinant(rows) == _laplace_determinant(matrix)
