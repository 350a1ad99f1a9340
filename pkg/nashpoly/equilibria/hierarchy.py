"""
Moment hierarchy driver shared by the master problem, the per-player checks
and the delta gate.
"""

import logging

from config import settings
from nashpoly.conic import solve_sdp
from nashpoly.extraction import extract_minimizers, flat_truncation, refine_points, relift_residual
from nashpoly.relaxations import assemble_relaxation

logger = logging.getLogger(__name__)


def order_range(d0, k_max):
    """Orders d0, d0 + 1, ..., max(k_max, d0)."""
    return range(d0, max(k_max, d0) + 1)


def moment_hierarchy(spec, options, k_max=None):
    """
    Solve the relaxations of spec at increasing orders.

    Args:
        k_max: Order cap; options.k_max when omitted

    Yields:
        (k, SdpSolution) for k = d0, ..., max(k_max, d0); the caller stops
        the iteration once it has what it needs
    """
    k_max = options.k_max if k_max is None else k_max
    for k in order_range(spec.d0, k_max):
        problem = assemble_relaxation(spec.at_order(k))
        solution = solve_sdp(problem, options.tolerances, options.backend)
        logger.debug(
            f"Order {k}: {problem.dimension} moments, status {solution.status.value}, "
            f"value {solution.objective:.10g}"
        )
        yield k, solution


def is_certified(solution):
    """True for an OPTIMAL solve; inaccurate and iteration-limited solves bound nothing."""
    return solution.status.is_optimal


def is_tight(solution, d0, k, options):
    """True when a certified solution has a flat truncation, so higher orders give the same value."""
    return is_certified(solution) and flat_truncation(solution.y, d0, k, options.rank_tol).is_flat


def extract_atoms(y, d0, k, equations, options):
    """
    Minimizers supported by a moment solution, polished against equations.

    Returns:
        A list of points, or None when flat truncation or extraction fails
    """
    report = flat_truncation(y, d0, k, options.rank_tol)
    if not report.is_flat:
        return None
    points = extract_minimizers(y, report.t, report.rank, seed=options.seed)
    if points is None:
        return None
    residual = relift_residual(points, y, report.t)
    if residual > 100 * settings.EXTRACTION_TOL:
        logger.debug(f"Extracted atoms reproduce the moments only to {residual:.2e}")
        return None
    return refine_points(points, list(equations))
