"""
Regression suite over the bundled games.

Each golden names a catalog game, the search to run, the expected status
and the equilibria (per-block coordinates) the run must reproduce.
"""

import logging
from dataclasses import dataclass

import numpy as np

from nashpoly.equilibria import NeStatus, SolverOptions, enumerate_nes, find_one_ne
from nashpoly.games import build_game

logger = logging.getLogger(__name__)

# Infinity-norm tolerance on equilibrium coordinates
POINT_TOL = 1e-3

R5 = 1 / np.sqrt(5)
R3 = 1 / np.sqrt(3)


@dataclass(frozen=True)
class Golden:
    game: str
    mode: str
    status: NeStatus
    points: tuple = ()
    multipliers: tuple = ()


@dataclass(frozen=True)
class GoldenResult:
    golden: Golden
    passed: bool
    message: str
    report: object = None


GOLDENS = (
    Golden(
        'ball_duel', 'enumerate', NeStatus.FOUND_ALL,
        points=(
            ((0, 0), (0, 0)),
            ((1, 0), (-R5, -2 * R5)),
            ((-1, 0), (R5, 2 * R5)),
        ),
        # (equilibrium index, per-player multipliers)
        multipliers=((1, ((9 * np.sqrt(5) / 10 - 1,), (np.sqrt(5) / 2 - 1,))),),
    ),
    Golden(
        'ball_simplex_convex', 'enumerate', NeStatus.FOUND_ALL,
        points=(((0, 0), (0, 0)), ((-1, 0), (0.125, 0.875))),
    ),
    Golden(
        'cubic_sphere', 'enumerate', NeStatus.FOUND_ALL,
        points=(
            ((0.3198, 0.6396, -0.6396), (0.6396, 0.6396, -0.4264)),
            ((0.0, 0.3895, 0.5842), (-0.8346, 0.3895, 0.3895)),
            ((0.2934, -0.5578, 0.8803), (0.5869, -0.5578, 0.5869)),
            ((0.0, -0.5774, -0.8660), (-0.5774, -0.5774, -0.5774)),
        ),
    ),
    Golden('cubic_sphere_negated', 'solve', NeStatus.NONE_EXISTS),
    Golden(
        'three_player_mixed', 'enumerate', NeStatus.FOUND_ALL,
        points=(((-0.3558, -0.9346), (1, 0), (-0.3331, 1)),),
    ),
    Golden('three_player_zero_sum', 'solve', NeStatus.NONE_EXISTS),
    Golden(
        'annulus', 'enumerate', NeStatus.FOUND_ALL,
        points=(((-1.3339, 0.4698), (-1.4118, 0.0820)),),
    ),
    Golden(
        'sphere_symmetric_3', 'solve', NeStatus.FOUND_SOME,
        points=(((-R3, -R3, -R3), (-R3, -R3, -R3)),),
    ),
    Golden(
        'quartic_unconstrained_2', 'solve', NeStatus.FOUND_SOME,
        points=(((-0.8410, -0.7125), (-0.8410, -0.7125), (-0.8410, -0.7125)),),
    ),
    Golden(
        'pollution_control', 'enumerate', NeStatus.FOUND_ALL,
        points=(((0.7, 0.16), (0.8, 0.16), (0.8, 0.47)),),
    ),
    Golden(
        'electricity_market', 'enumerate', NeStatus.FOUND_ALL,
        points=(((1.7184,), (1.8413, 0.67), (1.2, 0.0823, 0.0823)),),
    ),
)


def flatten(blocks):
    return np.concatenate([np.asarray(b, dtype=float) for b in blocks])


def match_points(found, expected, tol=POINT_TOL):
    """
    Pair every expected point with a distinct found point within tol.

    Returns:
        List of found indices in expected order, or None when some point is unmatched
    """
    used = []
    for target in expected:
        target = flatten(target)
        distances = [
            np.max(np.abs(p - target)) if j not in used else np.inf
            for j, p in enumerate(found)
        ]
        if not distances or min(distances) > tol:
            return None
        used.append(int(np.argmin(distances)))
    return used


def check_golden(golden, options=None):
    """Run one golden and compare the report against it."""
    options = options or SolverOptions()
    nep = build_game(golden.game)
    search = enumerate_nes if golden.mode == 'enumerate' else find_one_ne
    report = search(nep, options)

    if report.status != golden.status:
        return GoldenResult(golden, False, f"status {report.status.value}, expected {golden.status.value}", report)
    points = [e.point for e in report.equilibria]
    if golden.mode == 'enumerate' and len(points) != len(golden.points):
        return GoldenResult(golden, False, f"{len(points)} equilibria, expected {len(golden.points)}", report)
    matched = match_points(points, golden.points)
    if matched is None:
        return GoldenResult(golden, False, "equilibria do not match the expected coordinates", report)
    for e in report.equilibria:
        if e.omega_star < -options.omega_tol:
            return GoldenResult(golden, False, f"omega* = {e.omega_star:.3g} below tolerance", report)
    for index, expected in golden.multipliers:
        found = report.equilibria[matched[index]].multipliers
        for lam, target in zip(found, expected):
            if np.max(np.abs(np.asarray(lam) - np.asarray(target))) > POINT_TOL:
                return GoldenResult(golden, False, "recovered multipliers do not match", report)
    return GoldenResult(golden, True, 'ok', report)


def run_repro(names=None, options=None):
    """
    Run the goldens (all of them, or those whose game is in names).

    Returns:
        List of GoldenResult
    """
    results = []
    for golden in GOLDENS:
        if names and golden.game not in names:
            continue
        result = check_golden(golden, options)
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{golden.game}: {'passed' if result.passed else 'FAILED'} ({result.message})")
        results.append(result)
    return results
