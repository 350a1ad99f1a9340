"""
Tests for polynomials, monomial bases and the moment pairing.
"""

import inspect
from unittest import TestCase

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashpoly import polycore
from nashpoly.polycore import services as polycore_services
from nashpoly.polycore import (
    BlockLayout,
    DegreeOverflowError,
    DimensionError,
    InvalidPlayerError,
    MultiIndex,
    Polynomial,
    Tms,
    basis_index,
    basis_size,
    block_gradient,
    lift,
    monomial_basis,
    pair,
    restrict_rivals,
)

coefficients = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)
coordinates = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False, allow_infinity=False)


@st.composite
def polynomials(draw, nvars=3, max_degree=3):
    basis = monomial_basis(nvars, max_degree)
    chosen = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=6, unique=True))
    return Polynomial({alpha: draw(coefficients) for alpha in chosen}, nvars)


class MonomialBasisTest(TestCase):
    """Tests for the graded alphabetical basis."""

    def test_two_variable_order(self):
        """Degree comes first, then larger exponents on earlier variables."""
        basis = monomial_basis(2, 2)

        assert [tuple(a) for a in basis] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]

    def test_basis_size(self):
        """The basis has C(n + d, d) elements."""
        assert len(monomial_basis(3, 4)) == basis_size(3, 4) == 35
        assert basis_size(1, 0) == 1

    def test_prefix_stability(self):
        """A lower degree basis is a prefix of a higher one."""
        low, high = monomial_basis(3, 2), monomial_basis(3, 4)

        assert high[:len(low)] == low

    def test_index_matches_positions(self):
        """basis_index inverts monomial_basis."""
        basis = monomial_basis(2, 3)
        index = basis_index(2, 3)

        for pos, alpha in enumerate(basis):
            assert index[alpha] == pos

    def test_multi_index_ordering(self):
        """x1 sorts before x2 and every degree 1 monomial before degree 2."""
        assert MultiIndex((1, 0)) < MultiIndex((0, 1))
        assert MultiIndex((0, 1)) < MultiIndex((2, 0))
        assert MultiIndex((1, 2)) + MultiIndex((0, 1)) == MultiIndex((1, 3))

    def test_invalid_basis(self):
        """Zero variables are rejected."""
        with pytest.raises(DimensionError):
            monomial_basis(0, 2)


class PolynomialTest(TestCase):
    """Tests for polynomial arithmetic and calculus."""

    def setUp(self):
        self.x, self.y = Polynomial.variables(2)

    def test_square_expansion(self):
        """(x + 1)^2 has coefficients 1, 2, 1."""
        p = (self.x + 1) ** 2

        assert p.coefficient((2, 0)) == 1.0
        assert p.coefficient((1, 0)) == 2.0
        assert p.constant_term() == 1.0
        assert p.degree() == 2
        assert p.half_degree() == 1

    def test_cancellation_drops_terms(self):
        """Terms that cancel are removed."""
        p = self.x * self.y - self.y * self.x

        assert p.is_zero()
        assert p.degree() == 0

    def test_evaluate(self):
        """Evaluation matches the closed form."""
        p = 3 * self.x ** 2 * self.y - self.y + 2

        assert p.evaluate([2.0, -1.0]) == pytest.approx(3 * 4 * -1 + 1 + 2)
        assert p([0.0, 0.0]) == pytest.approx(2.0)

    def test_evaluate_wrong_length(self):
        """A point of the wrong length raises DimensionError."""
        with pytest.raises(DimensionError):
            self.x.evaluate([1.0, 2.0, 3.0])

    def test_diff(self):
        """d/dx of x^3 y is 3 x^2 y."""
        p = self.x ** 3 * self.y

        assert p.diff(0) == 3 * self.x ** 2 * self.y
        assert p.diff(1) == self.x ** 3

    def test_mixed_spaces_rejected(self):
        """Adding polynomials in different numbers of variables fails."""
        z = Polynomial.variable(0, 3)

        with pytest.raises(DimensionError):
            self.x + z

    def test_records_roundtrip(self):
        """to_records and from_records describe the same polynomial."""
        p = self.x ** 2 - 0.5 * self.x * self.y + 4

        assert Polynomial.from_records(p.to_records(), 2) == p

    @settings(max_examples=50, deadline=None)
    @given(polynomials(), polynomials(), st.lists(coordinates, min_size=3, max_size=3))
    def test_product_evaluates_to_product(self, p, q, point):
        """(p q)(u) = p(u) q(u)."""
        assert (p * q).evaluate(point) == pytest.approx(p.evaluate(point) * q.evaluate(point), abs=1e-8)


class BlockLayoutTest(TestCase):
    """Tests for block layouts."""

    def test_offsets_and_split(self):
        """Blocks cover consecutive variables."""
        layout = BlockLayout((2, 1, 3))

        assert layout.nvars == 6
        assert list(layout.block_variables(2)) == [3, 4, 5]
        assert layout.rival_variables(1) == [0, 1, 3, 4, 5]
        blocks = layout.split(np.arange(6.0))
        assert blocks[1].tolist() == [2.0]

    def test_invalid_player(self):
        """Out of range player indices raise InvalidPlayerError."""
        with pytest.raises(InvalidPlayerError):
            BlockLayout((2, 2)).check_player(2)

    def test_invalid_widths(self):
        """Empty blocks are rejected."""
        with pytest.raises(DimensionError):
            BlockLayout((2, 0))


class PairingTest(TestCase):
    """Tests for lift, pair and rival restriction."""

    def test_lift_of_dirac(self):
        """lift(u, d) holds u^alpha in basis order."""
        y = lift([2.0, 3.0], 2)

        assert y.values.tolist() == [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]
        assert y.y0 == 1.0
        assert y[(1, 1)] == 6.0
        assert y.first_moments().tolist() == [2.0, 3.0]

    def test_tms_wrong_length(self):
        """A tms needs exactly basis_size values."""
        with pytest.raises(DimensionError):
            Tms(2, 2, np.zeros(5))

    def test_tms_index_past_order(self):
        """Multi-indices beyond the order raise DegreeOverflowError."""
        with pytest.raises(DegreeOverflowError):
            lift([1.0, 1.0], 2)[(3, 0)]

    def test_pair_degree_overflow(self):
        """Pairing a cubic with an order 2 tms fails."""
        x, _ = Polynomial.variables(2)

        with pytest.raises(DegreeOverflowError):
            pair(x ** 3, lift([0.5, 0.5], 2))

    def test_pair_dimension_mismatch(self):
        """Pairing across dimensions fails."""
        with pytest.raises(DimensionError):
            pair(Polynomial.variable(0, 3), lift([0.5, 0.5], 2))

    @settings(max_examples=100, deadline=None)
    @given(polynomials(), st.lists(coordinates, min_size=3, max_size=3))
    def test_pair_with_lift_is_evaluation(self, f, point):
        """<f, lift(u)> = f(u) for every f of degree at most the order."""
        y = lift(point, 3)

        assert pair(f, y) == pytest.approx(f.evaluate(point), abs=1e-9)

    def test_truncate(self):
        """Truncation keeps the low degree prefix."""
        y = lift([0.5, -1.0], 4)

        assert y.truncate(2).values.tolist() == lift([0.5, -1.0], 2).values.tolist()
        with pytest.raises(DegreeOverflowError):
            y.truncate(5)

    def test_restrict_rivals(self):
        """Fixing x_2 leaves a polynomial in player 1's block."""
        layout = BlockLayout((2, 1))
        a, b, c = Polynomial.variables(3, layout)
        p = a * c + b ** 2 * c ** 2 - c

        restricted = restrict_rivals(p, 0, [2.0])

        assert restricted.nvars == 2
        assert restricted.evaluate([1.0, 3.0]) == pytest.approx(p.evaluate([1.0, 3.0, 2.0]))

    def test_restrict_rivals_wrong_length(self):
        """Rival values must match the rival block widths."""
        layout = BlockLayout((2, 1))
        a, _, _ = Polynomial.variables(3, layout)

        with pytest.raises(DimensionError):
            restrict_rivals(a, 0, [1.0, 2.0])

    def test_block_gradient(self):
        """Gradients are taken with respect to the chosen block only."""
        layout = BlockLayout((1, 2))
        a, b, c = Polynomial.variables(3, layout)
        p = a * b + c ** 2

        gradient = block_gradient(p, 1)

        assert gradient[0] == a
        assert gradient[1] == 2 * c


class PublicSurfaceTest(TestCase):
    """Tests for the names the polynomial services expose."""

    def test_every_service_is_exported(self):
        """Each public service function is listed in __all__ and re-exported by the package."""
        functions = {
            name for name, value in vars(polycore_services).items()
            if inspect.isfunction(value) and value.__module__ == polycore_services.__name__
            and not name.startswith('_')
        }

        assert functions <= set(polycore_services.__all__)
        assert all(hasattr(polycore, name) for name in functions)
