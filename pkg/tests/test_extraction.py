"""
Tests for flat truncation and minimizer extraction.
"""

from unittest import TestCase

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashpoly.extraction import (
    FlatReport,
    extract_minimizers,
    flat_truncation,
    mixture_weights,
    numeric_rank,
    refine_points,
    relift_residual,
)
from nashpoly.polycore import Polynomial, Tms, lift

coordinates = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


def _mixture(points, weights, order):
    values = sum(w * lift(p, order).values for p, w in zip(points, weights))
    return Tms(order, len(points[0]), values)


class NumericRankTest(TestCase):
    """Tests for the relative rank test."""

    def test_rank_of_outer_products(self):
        """Two generic rank one terms give rank two."""
        u, v = np.array([1.0, 2.0, 3.0]), np.array([0.0, 1.0, -1.0])
        M = np.outer(u, u) + np.outer(v, v)

        assert numeric_rank(M) == 2

    def test_small_matrices_use_absolute_scale(self):
        """Entries below rank_tol count as zero even when sigma_1 is small."""
        assert numeric_rank(np.diag([1e-8, 0.0])) == 0


class FlatTruncationTest(TestCase):
    """Tests for flat_truncation."""

    def test_report_type(self):
        """The scan returns a FlatReport even when nothing is flat."""
        report = flat_truncation(Tms(4, 1, [1.0, 0.0, 1.0 / 3, 0.0, 1.0 / 5]), 1, 2)

        assert isinstance(report, FlatReport)
        assert report.rank_tol > 0

    def test_dirac_is_flat_at_first_order(self):
        """A single atom is flat at t = d0 with rank one."""
        report = flat_truncation(lift([0.3, -0.4], 4), 1, 2)

        assert report.is_flat
        assert report.t == 1
        assert report.rank == 1

    def test_two_atoms_need_second_order(self):
        """Two atoms are flat at t = 2, not t = 1."""
        y = _mixture([np.array([0.5, 0.2]), np.array([-0.4, 0.7])], [0.6, 0.4], 4)

        report = flat_truncation(y, 1, 2)

        assert report.t == 2
        assert report.rank == 2

    def test_not_flat(self):
        """Moments of a uniform interval measure are never flat."""
        values = [1.0 / (a + 1) if a % 2 == 0 else 0.0 for a in range(5)]
        y = Tms(4, 1, values)

        report = flat_truncation(y, 1, 2)

        assert not report.is_flat
        assert report.t is None

    def test_ambiguous_rank_is_skipped(self):
        """Singular values next to rank_tol are not trusted."""
        u, v = np.array([0.5]), np.array([-0.5])
        y = _mixture([u, v], [1.0 - 1e-6, 1e-6], 4)

        report = flat_truncation(y, 1, 2, rank_tol=1e-6)

        assert not report.is_flat
        assert report.ambiguous


class ExtractionTest(TestCase):
    """Tests for extract_minimizers."""

    @settings(max_examples=30, deadline=None)
    @given(st.lists(coordinates, min_size=3, max_size=3))
    def test_single_atom(self, point):
        """A lifted point is recovered exactly."""
        y = lift(point, 4)

        atoms = extract_minimizers(y, 1, 1)

        assert len(atoms) == 1
        np.testing.assert_allclose(atoms[0], point, atol=1e-7)

    def test_two_atoms(self):
        """Two atoms and their weights are recovered."""
        points = [np.array([0.5, 0.2]), np.array([-0.4, 0.7])]
        y = _mixture(points, [0.6, 0.4], 4)

        atoms = extract_minimizers(y, 2, 2, seed=3)

        assert atoms is not None
        np.testing.assert_allclose(atoms[0], points[1], atol=1e-6)
        np.testing.assert_allclose(atoms[1], points[0], atol=1e-6)
        np.testing.assert_allclose(mixture_weights(atoms, y, 2), [0.4, 0.6], atol=1e-6)
        assert relift_residual(atoms, y, 2) < 1e-8

    def test_seed_invariance(self):
        """The random combination does not change the atoms."""
        points = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        y = _mixture(points, [0.5, 0.5], 4)

        runs = [extract_minimizers(y, 2, 2, seed=seed) for seed in range(5)]

        for atoms in runs[1:]:
            np.testing.assert_allclose(np.array(atoms), np.array(runs[0]), atol=1e-8)
        np.testing.assert_allclose(runs[0][0], [0.0, 1.0], atol=1e-6)

    def test_three_atoms_in_one_variable(self):
        """Three points on a line need t = 3."""
        points = [np.array([-0.8]), np.array([0.1]), np.array([0.9])]
        y = _mixture(points, [0.2, 0.3, 0.5], 6)

        report = flat_truncation(y, 1, 3)
        atoms = extract_minimizers(y, report.t, report.rank)

        assert report.rank == 3
        np.testing.assert_allclose(np.concatenate(atoms), [-0.8, 0.1, 0.9], atol=1e-6)

    def test_basis_at_truncation_degree_fails(self):
        """Extraction refuses a basis that needs degree t monomials."""
        points = [np.array([0.5, 0.2]), np.array([-0.4, 0.7])]
        y = _mixture(points, [0.6, 0.4], 4)

        assert extract_minimizers(y, 1, 2) is None

    def test_lifted_point_at_first_order(self):
        """A lift is extracted from its order one truncation over a degree zero basis."""
        y = lift([0.3, -0.4], 4)

        atoms = extract_minimizers(y, 1, 1)

        np.testing.assert_allclose(atoms[0], [0.3, -0.4], atol=1e-8)

    def test_zero_rank(self):
        """Rank zero has nothing to extract."""
        assert extract_minimizers(lift([0.1], 2), 1, 0) is None


class RefinementTest(TestCase):
    """Tests for Gauss-Newton polishing."""

    def test_refines_toward_root(self):
        """A perturbed root of x^2 - 2 moves closer to sqrt(2)."""
        x = Polynomial.variable(0, 1)

        refined = refine_points([np.array([1.4])], [x ** 2 - 2])

        assert refined[0][0] == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_never_worse(self):
        """Refinement keeps the original point if no step helps."""
        x = Polynomial.variable(0, 1)
        start = np.array([2.0])

        refined = refine_points([start], [x ** 2 + 1])

        assert abs(refined[0][0] ** 2 + 1) <= abs(start[0] ** 2 + 1)

    def test_no_equations(self):
        """Without equations the points come back unchanged."""
        refined = refine_points([[0.25, 0.5]], [])

        assert refined[0].tolist() == [0.25, 0.5]
