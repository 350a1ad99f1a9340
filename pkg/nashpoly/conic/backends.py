"""
Solver back-end registry.

A back-end is any callable (SdpProblem, SolverTolerances) -> SdpSolution.
"""

import logging

import numpy as np

from nashpoly.polycore import Tms

from .embedded import EmbeddedSolver, validate_problem
from .models import BackendUnavailableError, SdpSolution, SolverStatus

logger = logging.getLogger(__name__)

BACKENDS = {}


def register_backend(name):
    """Decorator adding a back-end to the registry under name."""
    def decorator(func):
        BACKENDS[name] = func
        return func
    return decorator


def get_backend(name):
    """
    Raises:
        BackendUnavailableError: For unknown names
    """
    try:
        return BACKENDS[name]
    except KeyError:
        raise BackendUnavailableError(
            f"Unknown solver back-end '{name}'. Available: {', '.join(sorted(BACKENDS))}"
        ) from None


@register_backend('embedded')
def solve_embedded(problem, tolerances):
    return EmbeddedSolver(tolerances).solve(problem)


CVXPY_STATUS = {
    'optimal': SolverStatus.OPTIMAL,
    'optimal_inaccurate': SolverStatus.INACCURATE,
    'infeasible': SolverStatus.PRIMAL_INFEASIBLE,
    'infeasible_inaccurate': SolverStatus.PRIMAL_INFEASIBLE,
    'unbounded': SolverStatus.DUAL_INFEASIBLE,
    'unbounded_inaccurate': SolverStatus.DUAL_INFEASIBLE,
    'user_limit': SolverStatus.ITERATION_LIMIT,
}


@register_backend('cvxpy')
def solve_cvxpy(problem, tolerances):
    """Solve through cvxpy with its default SDP-capable solver."""
    try:
        import cvxpy as cp
    except ImportError as exc:
        raise BackendUnavailableError("The 'cvxpy' back-end needs the cvxpy package") from exc

    validate_problem(problem)
    y = cp.Variable(problem.dimension)
    constraints = [cp.Constant(problem.equalities) @ y == problem.rhs]
    for block in problem.blocks:
        Z = cp.Variable((block.size, block.size), symmetric=True)
        constraints += [Z >> 0, cp.vec(Z) == cp.Constant(block.matrix) @ y]
    sdp = cp.Problem(cp.Minimize(problem.objective @ y), constraints)
    try:
        sdp.solve()
    except cp.error.SolverError as exc:
        logger.warning(f"cvxpy solve failed: {exc}")
        return SdpSolution(status=SolverStatus.INACCURATE, backend='cvxpy', message=str(exc))

    status = CVXPY_STATUS.get(sdp.status, SolverStatus.INACCURATE)
    if y.value is None:
        return SdpSolution(status=status, backend='cvxpy', message=sdp.status)
    values = np.asarray(y.value, dtype=float)
    value = float(problem.objective @ values)
    return SdpSolution(
        status=status,
        y=Tms(problem.order, problem.nvars, values),
        objective=value,
        dual_objective=value,
        primal_residual=problem.equality_residual(values),
        dual_residual=0.0,
        gap=0.0,
        backend='cvxpy',
        message=sdp.status,
    )
