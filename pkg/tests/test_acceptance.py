"""
End-to-end runs over the bundled games.

These solve many relaxations each; deselect them with -m "not slow".
"""

from unittest import TestCase

import numpy as np
import pytest

from nashpoly.cli.repro import GOLDENS, check_golden
from nashpoly.equilibria import MasterStatus, NeStatus, SolverOptions, random_game_smoke_test, solve_master
from nashpoly.games import build_game, kkt_sets
from nashpoly.relaxations import gen_theta, theta_value

R5 = 1 / np.sqrt(5)


def _golden(game):
    return next(g for g in GOLDENS if g.game == game)


@pytest.mark.slow
@pytest.mark.integration
class GoldenTest(TestCase):
    """Every bundled game reproduces its known equilibria."""

    def _check(self, game, seed=0):
        result = check_golden(_golden(game), SolverOptions(seed=seed))
        assert result.passed, f"{game}: {result.message}"
        return result.report

    def test_ball_duel(self):
        """Exactly three equilibria, with the multipliers at the second."""
        report = self._check('ball_duel', seed=7)

        assert len(report.equilibria) == 3
        assert all(e.omega_star >= -1e-6 for e in report.equilibria)
        thetas = [e.theta for e in report.equilibria]
        assert thetas == sorted(thetas)

    def test_ball_simplex_convex(self):
        self._check('ball_simplex_convex')

    def test_cubic_sphere(self):
        self._check('cubic_sphere')

    def test_cubic_sphere_negated(self):
        self._check('cubic_sphere_negated')

    def test_three_player_mixed(self):
        self._check('three_player_mixed')

    def test_three_player_zero_sum(self):
        self._check('three_player_zero_sum')

    def test_annulus(self):
        self._check('annulus')

    def test_sphere_symmetric(self):
        self._check('sphere_symmetric_3')

    def test_quartic_unconstrained(self):
        self._check('quartic_unconstrained_2')

    def test_pollution_control(self):
        self._check('pollution_control')

    def test_electricity_market(self):
        self._check('electricity_market')


@pytest.mark.slow
@pytest.mark.integration
class ExclusionTest(TestCase):
    """An exclusion level above every equilibrium leaves nothing."""

    def test_master_infeasible_above_all_equilibria(self):
        nep = build_game('ball_duel')
        theta = gen_theta(0, nep.n)
        points = ([0.0, 0.0, 0.0, 0.0], [1.0, 0.0, -R5, -2 * R5], [-1.0, 0.0, R5, 2 * R5])
        level = max(theta_value(theta, p) for p in points) + 1e-2

        result = solve_master(kkt_sets(nep), theta, exclusion=level, options=SolverOptions(seed=0))

        assert result.status == MasterStatus.INFEASIBLE


@pytest.mark.slow
@pytest.mark.integration
class RandomGameTest(TestCase):
    """Random ball-constrained quadratic games always terminate."""

    def test_smoke(self):
        results = random_game_smoke_test(range(5), SolverOptions(seed=0, max_outer_loops=30))

        for seed, report in results:
            assert report.status in (NeStatus.FOUND_ALL, NeStatus.NONE_EXISTS), f"seed {seed}: {report.status}"
