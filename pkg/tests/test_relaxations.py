"""
Tests for moment and localizing matrices and relaxation assembly.
"""

from unittest import TestCase

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashpoly.polycore import DegreeOverflowError, Polynomial, lift, monomial_vector
from nashpoly.relaxations import (
    RelaxationOrderError,
    RelaxationSpec,
    assemble_relaxation,
    gen_theta,
    localizing_matrix,
    moment_matrix,
    theta_polynomial,
    theta_value,
)

coordinates = st.floats(min_value=-0.7, max_value=0.7, allow_nan=False, allow_infinity=False)


class MomentMatrixTest(TestCase):
    """Tests for M_d[y] and L_q[y]."""

    def setUp(self):
        self.x, self.y = Polynomial.variables(2)
        self.u = np.array([0.5, -2.0])

    def test_dirac_moment_matrix(self):
        """M_d of a Dirac measure is [u]_d [u]_d^T."""
        v = monomial_vector(self.u, 2)

        np.testing.assert_allclose(moment_matrix(lift(self.u, 4), 2), np.outer(v, v))

    def test_dirac_localizing_matrix(self):
        """L_q of a Dirac measure is q(u) [u]_t [u]_t^T."""
        q = 1 - self.x ** 2 - self.y
        v = monomial_vector(self.u, 1)

        L = localizing_matrix(q, lift(self.u, 4), 2)

        np.testing.assert_allclose(L, q.evaluate(self.u) * np.outer(v, v))

    def test_moment_matrix_order_overflow(self):
        """M_d needs a tms of order 2d."""
        with pytest.raises(DegreeOverflowError):
            moment_matrix(lift(self.u, 3), 2)

    def test_localizing_degree_overflow(self):
        """A quartic localizer does not fit at k = 1."""
        with pytest.raises(DegreeOverflowError):
            localizing_matrix(self.x ** 4, lift(self.u, 2), 1)


class RelaxationAssemblyTest(TestCase):
    """Tests for assemble_relaxation."""

    def setUp(self):
        x, y = Polynomial.variables(2)
        self.spec = RelaxationSpec(
            objective=x ** 2 + y,
            phi=(x - y ** 2,),
            psi=(1 - x ** 2 - y ** 2,),
        )

    def test_minimum_order(self):
        """d0 is the largest half degree, at least 1."""
        assert self.spec.d0 == 1
        assert self.spec.order == 1

    def test_order_below_minimum(self):
        """Orders below d0 are rejected."""
        x = Polynomial.variable(0, 1)

        with pytest.raises(RelaxationOrderError):
            RelaxationSpec(objective=x ** 4, order=1)

    def test_shapes(self):
        """Order 2 in two variables: 15 moments, a 6x6 moment block, a 3x3 localizing block."""
        problem = assemble_relaxation(self.spec.at_order(2))

        assert problem.dimension == 15
        assert problem.block_sizes == [6, 3]
        assert problem.rhs[0] == 1.0

    @settings(max_examples=50, deadline=None)
    @given(coordinates)
    def test_lift_of_feasible_point_is_feasible(self, t):
        """Every feasible point lifts to a feasible moment vector with the same value."""
        u = np.array([t ** 2, t])
        for k in (1, 2, 3):
            problem = assemble_relaxation(self.spec.at_order(k))
            y = lift(u, 2 * k)

            assert problem.is_feasible(y.values, tol=1e-9)
            assert problem.objective @ y.values == pytest.approx(self.spec.objective.evaluate(u))

    def test_infeasible_point_violates_equalities(self):
        """A point off the curve x = y^2 breaks an equality row."""
        problem = assemble_relaxation(self.spec.at_order(2))

        assert problem.equality_residual(lift([0.5, 0.5], 4).values) > 1e-3

    def test_duplicate_rows_dropped(self):
        """Scalar multiples of an equality add no rows."""
        x, y = Polynomial.variables(2)
        single = RelaxationSpec(objective=x, phi=(x - y ** 2,), order=2)
        doubled = RelaxationSpec(objective=x, phi=(x - y ** 2, 2 * (x - y ** 2)), order=2)

        assert assemble_relaxation(single).equalities.shape == assemble_relaxation(doubled).equalities.shape


class ThetaTest(TestCase):
    """Tests for the random objective matrix."""

    def test_positive_definite_and_seeded(self):
        """Theta is symmetric positive definite and reproducible."""
        theta = gen_theta(7, 3)

        assert theta.shape == (4, 4)
        np.testing.assert_allclose(theta, theta.T)
        assert np.linalg.eigvalsh(theta)[0] > 0
        np.testing.assert_array_equal(theta, gen_theta(7, 3))
        assert not np.array_equal(theta, gen_theta(8, 3))

    def test_polynomial_matches_value(self):
        """[x]_1^T Theta [x]_1 as a polynomial evaluates like theta_value."""
        x = Polynomial.variable(0, 3)
        theta = gen_theta(0, 3)
        poly = theta_polynomial(theta, x.layout)
        point = [0.3, -1.2, 0.8]

        assert poly.evaluate(point) == pytest.approx(theta_value(theta, point))

    def test_wrong_shape(self):
        """Theta must have side n + 1."""
        layout = Polynomial.variable(0, 2).layout

        with pytest.raises(RelaxationOrderError):
            theta_polynomial(np.eye(2), layout)
