"""
Conic solve entry point.
"""

import logging

from config import settings

from .backends import get_backend
from .models import SolverTolerances

logger = logging.getLogger(__name__)


def solve_sdp(problem, tolerances=None, backend=None):
    """
    Solve an assembled moment relaxation.

    Args:
        problem: SdpProblem
        tolerances: SolverTolerances (defaults from settings)
        backend: Back-end name; defaults to NASHPOLY_SOLVER

    Returns:
        SdpSolution
    """
    tolerances = tolerances or SolverTolerances()
    name = backend or settings.SOLVER_BACKEND
    solution = get_backend(name)(problem, tolerances)
    if not solution.status.is_optimal:
        logger.debug(f"Conic solve ({name}) ended with status {solution.status.value}: {solution.message}")
    return solution
