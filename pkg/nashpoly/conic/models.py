"""
Conic solver models: statuses, tolerances and solutions.
"""

from dataclasses import dataclass, field
from enum import Enum

from config import settings
from nashpoly.exceptions import NashpolyError


class MalformedProblemError(NashpolyError):
    """Raised when an SdpProblem is structurally invalid."""
    pass


class BackendUnavailableError(NashpolyError):
    """Raised when a requested solver back-end cannot be used."""
    pass


class SolverStatus(str, Enum):
    OPTIMAL = 'optimal'
    PRIMAL_INFEASIBLE = 'primal_infeasible'
    DUAL_INFEASIBLE = 'dual_infeasible'
    INACCURATE = 'inaccurate'
    ITERATION_LIMIT = 'iteration_limit'

    @property
    def is_optimal(self):
        return self == SolverStatus.OPTIMAL

    @property
    def has_solution(self):
        return self in (SolverStatus.OPTIMAL, SolverStatus.INACCURATE, SolverStatus.ITERATION_LIMIT)


@dataclass(frozen=True)
class SolverTolerances:
    feas_tol: float = field(default_factory=lambda: settings.FEAS_TOL)
    gap_tol: float = field(default_factory=lambda: settings.GAP_TOL)
    max_iters: int = field(default_factory=lambda: settings.MAX_ITERS)


@dataclass(frozen=True)
class SdpSolution:
    """
    Result of a conic solve.

    objective is the moment value <c, y>; dual_objective is the bound read
    from the dual variables and never exceeds it on an optimal solve.
    certificate holds the infeasibility ray when one was found.
    """
    status: SolverStatus
    y: object = None
    objective: float = float('nan')
    dual_objective: float = float('nan')
    primal_residual: float = float('nan')
    dual_residual: float = float('nan')
    gap: float = float('nan')
    iterations: int = 0
    backend: str = 'embedded'
    certificate: object = None
    message: str = ''

    @property
    def max_residual(self):
        return max(self.primal_residual, self.dual_residual)

    def summary(self):
        return {
            'status': self.status.value,
            'objective': self.objective,
            'dual_objective': self.dual_objective,
            'primal_residual': self.primal_residual,
            'dual_residual': self.dual_residual,
            'gap': self.gap,
            'iterations': self.iterations,
            'backend': self.backend,
        }
