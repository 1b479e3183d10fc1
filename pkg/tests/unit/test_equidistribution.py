"""
Unit tests for the equidistribution module.
"""

import math

import numpy as np
import pytest

from polyflow.equidistribution import (
    FLAG_ALIASING, FLAG_CONSTANT, FLAG_NON_ERGODIC, FLAG_RELATION, box_discrepancy,
    heisenberg_factor_check, path_discrepancy, sample_path,
)
from polyflow.flows import HeisenbergFlow
from polyflow.parser import parse_family
from polyflow.sampling import SamplingError, SamplingPlan


class TestBoxDiscrepancy:
    """Test cases for dyadic box counts."""

    def test_uniform_grid(self) -> None:
        """Test that a midpoint grid has zero discrepancy."""
        points = ((np.arange(16) + 0.5) / 16).reshape(-1, 1)
        assert box_discrepancy(points) == [0.0, 0.0, 0.0, 0.0]

    def test_point_mass(self) -> None:
        """Test all points in one corner."""
        values = box_discrepancy(np.zeros((10, 1)))
        assert values[0] == pytest.approx(0.5)
        assert values[-1] == pytest.approx(1 - 1 / 16)

    def test_depth_limited_by_box_count(self) -> None:
        """Test that too many boxes stop the depth loop."""
        points = np.random.default_rng(0).random((100, 6))
        assert len(box_discrepancy(points)) == 3


class TestPathDiscrepancy:
    """Test cases for polynomial paths on tori."""

    def test_independent_path(self) -> None:
        """Test (sqrt2 s, sqrt3 s^2) is close to uniform."""
        family = parse_family("s, s^2")
        plan = SamplingPlan.uniform(1, 5000.0, samples=20000, seed=0)
        report = path_discrepancy(family, plan, scales=[math.sqrt(2), math.sqrt(3)])
        assert report.discrepancy <= 0.05
        assert not report.degenerate
        assert report.samples == 20000

    def test_integer_relation(self) -> None:
        """Test that (s, 2s) is flagged with its relation."""
        family = parse_family("s, 2s")
        report = path_discrepancy(family, SamplingPlan.uniform(1, 100.0, samples=2000))
        assert report.relation == (2, -1)
        assert FLAG_RELATION in report.flags
        assert report.to_dict()['relation'] == [2, -1]

    def test_integer_grid_aliasing(self) -> None:
        """Test the path s sampled on integers."""
        plan = SamplingPlan(d=1, R=(1000.0,), scheme='grid', counts=(1000,))
        report = path_discrepancy(parse_family("s"), plan)
        assert report.discrepancy == pytest.approx(0.9375)
        assert report.flags == [FLAG_ALIASING]
        assert report.relation is None

    def test_constant_path(self) -> None:
        """Test that constant paths are flagged."""
        report = path_discrepancy(parse_family("0"), SamplingPlan.uniform(1, 10.0, samples=100))
        assert report.flags == [FLAG_CONSTANT]

    def test_sample_path_checks(self) -> None:
        """Test scales and plan dimension."""
        family = parse_family("s, s^2")
        with pytest.raises(SamplingError):
            sample_path(family, SamplingPlan.uniform(1, 10.0, samples=10), scales=[1.0])
        with pytest.raises(SamplingError):
            sample_path(family, SamplingPlan.uniform(2, 10.0, samples=10))

    def test_sample_path_values(self) -> None:
        """Test the scaled coordinates mod 1."""
        plan = SamplingPlan(d=1, R=(2.0,), scheme='grid', counts=(4,))
        points = sample_path(parse_family("s, s^2"), plan, scales=[0.5, 1.0])
        np.testing.assert_allclose(points[:, 0], [0.0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(points[:, 1], [0.0, 0.25, 0.0, 0.25])


class TestHeisenbergCheck:
    """Test cases for the nilmanifold check."""

    def test_ergodic_flow(self) -> None:
        """Test alpha = 1, beta = sqrt2 along p(s) = s."""
        flow = HeisenbergFlow(1.0, math.sqrt(2))
        plan = SamplingPlan.uniform(1, 5000.0, samples=5000, seed=0)
        report = heisenberg_factor_check(flow, parse_family("s"), plan)
        assert report.ergodic_base
        assert report.base_discrepancy <= 0.05
        assert report.z_distance <= 0.1
        assert report.flags == []
        assert report.to_dict()['samples'] == 5000

    def test_non_ergodic_flow(self) -> None:
        """Test that a rational base direction is flagged."""
        flow = HeisenbergFlow(1.0, 1.0)
        plan = SamplingPlan.uniform(1, 100.0, samples=1000)
        report = heisenberg_factor_check(flow, parse_family("s"), plan)
        assert FLAG_NON_ERGODIC in report.flags
        assert not report.ergodic_base

    def test_single_polynomial_only(self) -> None:
        """Test that paths need exactly one polynomial."""
        flow = HeisenbergFlow(1.0, math.sqrt(2))
        with pytest.raises(SamplingError):
            heisenberg_factor_check(flow, parse_family("s, 2s"), SamplingPlan.uniform(1, 10.0, samples=10))
