"""
Unit tests for the family module.
"""

from typing import Dict, List

import pytest
from hypothesis import given, settings, strategies as st

from polyflow import linalg
from polyflow.coeff import Coeff, TAU
from polyflow.family import (
    FamilyError, PolyFamily, WeightVector, change_of_variables, equivalence_classes,
    equivalent, independent_decomposition, is_nice, is_standard, linearize,
    rationally_independent, r_independent, require_nice, weight_less, weight_vector,
)
from polyflow.parser import parse_family, parse_poly
from polyflow.polynomial import MultiPoly


class TestPolyFamily:
    """Test cases for the PolyFamily container."""

    def test_from_rows(self) -> None:
        """Test building a linear family from coefficient rows."""
        family = PolyFamily.from_rows([[1, 0], [2, -1]], constants=[0, 3])
        assert str(family) == "{u1, 2*u1 - u2 + 3}"
        assert family.constants() == [Coeff(), Coeff.rational(3)]
        assert family.linear_rows() == linalg.as_matrix([[1, 0], [2, -1]])

    def test_empty_family(self) -> None:
        """Test that a family needs members."""
        with pytest.raises(FamilyError):
            PolyFamily(1, [])

    def test_mismatched_members(self) -> None:
        """Test members must share the variable count."""
        with pytest.raises(FamilyError):
            PolyFamily(2, [parse_poly("u1", 1)])

    def test_linear_rows_of_nonlinear_family(self) -> None:
        """Test linear_rows rejects nonlinear families."""
        with pytest.raises(FamilyError):
            parse_family("t, t^2").linear_rows()

    def test_degree_and_permutation(self) -> None:
        """Test family degree and reordering."""
        family = parse_family("t, t^3, 2t")
        assert family.degree == 3
        assert str(family.permuted([1, 0, 2])) == "{t^3, t, 2*t}"


class TestEquivalence:
    """Test cases for equivalence classes and weight vectors."""

    def test_equivalent(self) -> None:
        """Test equivalence by leading part."""
        t = parse_family("t^2, t^2 - t, t, 2t")
        assert equivalent(t[0], t[1])
        assert not equivalent(t[2], t[3])
        assert not equivalent(t[0], t[2])

    def test_weight_vector(self) -> None:
        """Test the weight vector of a mixed-degree family."""
        family = parse_family("t, 2t, 3t, t^2, t^2 - t, 4t^2 + t, t^3")
        assert weight_vector(family) == WeightVector((3, 2, 1))
        assert str(weight_vector(family)) == "(3,2,1)"
        assert sorted(len(g) for g in equivalence_classes(family.polys)) == [1, 1, 1, 1, 1, 2]

    def test_weight_vector_rejects_constants(self) -> None:
        """Test that constant members have no weight."""
        with pytest.raises(FamilyError):
            weight_vector(parse_family("t, 1"))

    def test_weight_order(self) -> None:
        """Test degree-first, then right-aligned lexicographic order."""
        assert weight_less(WeightVector((5,)), WeightVector((0, 1)))
        assert weight_less(WeightVector((3, 1)), WeightVector((1, 2)))
        assert weight_less(WeightVector((1, 1)), WeightVector((2, 1)))
        assert not weight_less(WeightVector((2, 1)), WeightVector((2, 1)))


class TestNiceness:
    """Test cases for nice and standard families."""

    def test_nice(self, families: Dict[str, PolyFamily]) -> None:
        """Test the worked examples are nice."""
        for family in families.values():
            assert is_nice(family)

    def test_not_nice(self) -> None:
        """Test constant members and constant differences."""
        assert not is_nice(parse_family("t, t + 1"))
        assert not is_nice(parse_family("t, 2"))
        with pytest.raises(FamilyError, match="p1 - p2 is constant"):
            require_nice(parse_family("t, t + 1"))

    def test_standard(self) -> None:
        """Test that the first member must have maximal degree."""
        assert is_standard(parse_family("t^2, t"))
        assert not is_standard(parse_family("t, t^2"))


class TestIndependence:
    """Test cases for independence over R and over Q."""

    def test_independent(self) -> None:
        """Test an independent family."""
        result = r_independent(parse_family("t, t^2"))
        assert result.independent
        assert result.rank == 2
        assert result.witness is None

    def test_dependent_with_witness(self) -> None:
        """Test that the witness is a genuine dependence."""
        family = parse_family("t, 2t, t^2")
        result = r_independent(family)
        assert not result
        assert result.rank == 2
        combination = sum((p * c for p, c in zip(family, result.witness)), parse_poly("0", 1))
        assert combination.is_zero()

    def test_constants_are_ignored(self) -> None:
        """Test that constant terms do not affect independence."""
        assert r_independent(parse_family("t + 1, t^2")).independent

    def test_real_versus_rational(self) -> None:
        """Test pi*t and t: dependent over R, independent over Q."""
        family = parse_family("pi*t, t")
        assert not r_independent(family).independent
        assert rationally_independent(family).independent
        assert not rationally_independent(parse_family("t, 2t")).independent


class TestDecomposition:
    """Test cases for the independent decomposition and linear reductions."""

    def test_decomposition(self) -> None:
        """Test the coefficient matrix of t, 2t, t^2."""
        family = parse_family("t, 2t, t^2")
        matrix = independent_decomposition(family)
        assert matrix.basis_indices == [0, 2]
        assert matrix.entries == linalg.as_matrix([[1, 0], [2, 0], [0, 1]])
        for j in range(family.k):
            assert matrix.reconstruct(j) == family[j]

    def test_decomposition_with_pi(self, families: Dict[str, PolyFamily]) -> None:
        """Test exact reconstruction with pi-valued coefficients."""
        family = families['pi_powers']
        matrix = independent_decomposition(family)
        assert matrix.cols == 3
        for j in range(family.k):
            assert matrix.reconstruct(j) == family[j]

    def test_constant_violations(self) -> None:
        """Test that nonzero constant terms are reported."""
        matrix = independent_decomposition(parse_family("t + 1, t^2"))
        assert matrix.violations == [0]
        assert matrix.to_dict()['violations'] == [1]

    def test_degenerate_family(self) -> None:
        """Test that all-constant families cannot be decomposed."""
        with pytest.raises(FamilyError):
            independent_decomposition(parse_family("1, 2"))

    def test_linearize(self) -> None:
        """Test the linearized family over fresh variables."""
        assert str(linearize(parse_family("t, 2t, t^2"))) == "{u1, 2*u1, u2}"

    def test_change_of_variables(self) -> None:
        """Test substitution u = B v."""
        family = parse_family("u1, u2")
        result = change_of_variables(family, [[1, 1], [0, 1]])
        assert str(result) == "{u1 + u2, u2}"
        scaled = change_of_variables(family, [[TAU, 0], [0, 1]])
        assert str(scaled) == "{pi*u1, u2}"

    def test_change_of_variables_keeps_constants(self) -> None:
        """Test that constant terms are carried through."""
        family = PolyFamily.from_rows([[1, 0], [0, 1]], constants=[0, 2])
        result = change_of_variables(family, [[0, 1], [1, 0]])
        assert str(result) == "{u2, u1 + 2}"

    def test_singular_substitution(self) -> None:
        """Test that singular or misshapen substitutions are rejected."""
        family = parse_family("u1, u2")
        with pytest.raises(FamilyError):
            change_of_variables(family, [[1, 1], [1, 1]])
        with pytest.raises(FamilyError):
            change_of_variables(family, [[1]])


small_exponents = st.sampled_from([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
small_polys = st.dictionaries(small_exponents, st.integers(min_value=-2, max_value=2), max_size=4).map(
    lambda terms: MultiPoly(2, terms))
non_constant_polys = small_polys.filter(lambda p: not p.is_constant())
weight_vectors = st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=3).map(
    lambda counts: WeightVector(tuple(counts)))


def _leading_form(p: MultiPoly) -> frozenset:
    return frozenset((e, c) for e, c in p.terms.items() if sum(e) == p.degree)


class TestEquivalenceProperties:
    """Property tests for equivalence and weight vectors."""

    @settings(max_examples=200, deadline=None)
    @given(small_polys, small_polys, small_polys)
    def test_equivalence_is_transitive(self, p: MultiPoly, q: MultiPoly, r: MultiPoly) -> None:
        """Test p ~ q and q ~ r imply p ~ r."""
        if equivalent(p, q) and equivalent(q, r):
            assert equivalent(p, r)
        assert equivalent(p, p)
        assert equivalent(p, q) == equivalent(q, p)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(non_constant_polys, min_size=1, max_size=6))
    def test_weight_vector_counts_leading_forms(self, polys: List[MultiPoly]) -> None:
        """Test the weight vector against distinct leading forms per degree."""
        family = PolyFamily(2, polys)
        b = int(family.degree)
        expected = [len({_leading_form(p) for p in polys if p.degree == n}) for n in range(1, b + 1)]
        assert weight_vector(family).counts == tuple(expected)

    @settings(max_examples=200, deadline=None)
    @given(weight_vectors, weight_vectors)
    def test_weight_order_trichotomy(self, w: WeightVector, w2: WeightVector) -> None:
        """Test that exactly one of w < w2, w2 < w, w == w2 holds."""
        outcomes = [weight_less(w, w2), weight_less(w2, w), w == w2]
        assert outcomes.count(True) == 1

    @settings(max_examples=200, deadline=None)
    @given(weight_vectors, weight_vectors, weight_vectors)
    def test_weight_order_transitive(self, a: WeightVector, b: WeightVector, c: WeightVector) -> None:
        """Test a < b and b < c imply a < c."""
        if weight_less(a, b) and weight_less(b, c):
            assert weight_less(a, c)
