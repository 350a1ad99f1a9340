"""
Equilibrium search models: options, statuses, per-loop records and reports.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from config import settings
from nashpoly.conic import SolverTolerances
from nashpoly.exceptions import NashpolyError


class InvalidOptionsError(NashpolyError):
    """Raised when solver options are out of range."""
    pass


class SearchTransitionError(NashpolyError):
    """Raised when the equilibrium search attempts an invalid phase change."""
    pass


class _LabeledEnum(str, Enum):
    def __new__(cls, value, label):
        member = str.__new__(cls, value)
        member._value_ = value
        member.label = label
        return member


class NeStatus(_LabeledEnum):
    FOUND_ALL = 'found_all', 'Found all'
    FOUND_SOME = 'found_some', 'Found some'
    NONE_EXISTS = 'none_exists', 'None exists'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


class MasterStatus(_LabeledEnum):
    CANDIDATE = 'candidate', 'Candidate'
    INFEASIBLE = 'infeasible', 'Infeasible'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


class CheckStatus(_LabeledEnum):
    VERIFIED = 'verified', 'No improving response'
    IMPROVED = 'improved', 'Improving response found'
    UNBOUNDED = 'unbounded', 'Unbounded below'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


class NextStatus(_LabeledEnum):
    NEXT = 'next', 'Next equilibrium'
    NO_MORE = 'no_more', 'No more equilibria'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


class SearchPhase(_LabeledEnum):
    """Phases of one equilibrium search."""
    START = 'start', 'Started'
    MASTER = 'master', 'Solving master problem'
    CHECK = 'check', 'Checking candidate'
    CUT = 'cut', 'Attaching cuts'
    ACCEPTED = 'accepted', 'Equilibrium accepted'
    NONE = 'none', 'No equilibrium'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


SEARCH_TRANSITIONS = {
    SearchPhase.START: [SearchPhase.MASTER],
    SearchPhase.MASTER: [SearchPhase.CHECK, SearchPhase.NONE, SearchPhase.INCONCLUSIVE],
    SearchPhase.CHECK: [SearchPhase.ACCEPTED, SearchPhase.CUT, SearchPhase.INCONCLUSIVE],
    SearchPhase.CUT: [SearchPhase.MASTER, SearchPhase.INCONCLUSIVE],
    SearchPhase.ACCEPTED: [],
    SearchPhase.NONE: [],
    SearchPhase.INCONCLUSIVE: [],
}


@dataclass(frozen=True)
class SolverOptions:
    """
    Tunables of the equilibrium search; defaults come from config.settings.

    k_max caps the relaxation order of every subproblem; player checks may
    go check_extra_orders further before falling back to local descent.
    convex skips the cutting loop and only verifies the first candidate.
    """
    seed: int = field(default_factory=lambda: settings.SEED)
    k_max: int = field(default_factory=lambda: settings.K_MAX)
    check_extra_orders: int = field(default_factory=lambda: settings.CHECK_EXTRA_ORDERS)
    delta_init: float = field(default_factory=lambda: settings.DELTA_INIT)
    delta_shrink: float = field(default_factory=lambda: settings.DELTA_SHRINK)
    omega_tol: float = field(default_factory=lambda: settings.OMEGA_TOL)
    feas_check_tol: float = field(default_factory=lambda: settings.FEAS_CHECK_TOL)
    max_outer_loops: int = field(default_factory=lambda: settings.MAX_OUTER_LOOPS)
    rank_tol: float = field(default_factory=lambda: settings.RANK_TOL)
    convex: bool = False
    workers: int = field(default_factory=lambda: settings.WORKERS)
    backend: str = None
    tolerances: SolverTolerances = field(default_factory=SolverTolerances)

    def __post_init__(self):
        if self.delta_init <= 0:
            raise InvalidOptionsError(f"delta_init must be positive, got {self.delta_init}")
        if self.omega_tol <= 0:
            raise InvalidOptionsError(f"omega_tol must be positive, got {self.omega_tol}")
        if self.delta_shrink <= 1:
            raise InvalidOptionsError(f"delta_shrink must exceed 1, got {self.delta_shrink}")
        if self.k_max < 1 or self.max_outer_loops < 1 or self.workers < 1:
            raise InvalidOptionsError("k_max, max_outer_loops and workers must be at least 1")
        if self.check_extra_orders < 0:
            raise InvalidOptionsError(f"check_extra_orders must be non-negative, got {self.check_extra_orders}")


@dataclass(frozen=True)
class MasterResult:
    """Outcome of the KKT master problem over the moment hierarchy."""
    status: MasterStatus
    point: np.ndarray = None
    value: float = float('nan')
    order: int = None
    orders: tuple = ()
    statuses: tuple = ()


@dataclass(frozen=True)
class PlayerCheck:
    """
    Lower-level check of one player at a candidate.

    omega is min over the player's KKT points x_i of f_i(x_i, u_-i) - f_i(u);
    minimizers holds the extracted points realizing it.
    """
    player: int
    status: CheckStatus
    omega: float
    minimizers: tuple = ()
    orders: tuple = ()
    statuses: tuple = ()
    fallback: bool = False


@dataclass(frozen=True)
class CandidateCheck:
    checks: tuple

    @property
    def omegas(self):
        return [c.omega for c in self.checks]

    @property
    def omega_star(self):
        return min(self.omegas, default=0.0)

    @property
    def inconclusive(self):
        return any(c.status in (CheckStatus.INCONCLUSIVE, CheckStatus.UNBOUNDED) for c in self.checks)

    def is_equilibrium(self, omega_tol):
        return self.omega_star >= -omega_tol


@dataclass(frozen=True)
class Equilibrium:
    point: np.ndarray
    omega_star: float
    omegas: tuple
    multipliers: tuple
    theta: float
    loop: int

    def blocks(self, layout):
        return layout.split(self.point)

    def to_dict(self):
        return {
            'point': [float(v) for v in self.point],
            'omega_star': float(self.omega_star),
            'omegas': [float(w) for w in self.omegas],
            'multipliers': [[float(v) for v in lam] for lam in self.multipliers],
            'theta': float(self.theta),
            'loop': self.loop,
        }


@dataclass(frozen=True)
class LoopRecord:
    """One entry of the search trace."""
    loop: int
    phase: str
    candidate: tuple = None
    cut_sizes: tuple = ()
    orders: tuple = ()
    statuses: tuple = ()
    omegas: tuple = ()
    note: str = ''

    def to_dict(self):
        return {
            'loop': self.loop,
            'phase': self.phase,
            'candidate': None if self.candidate is None else [float(v) for v in self.candidate],
            'cut_sizes': list(self.cut_sizes),
            'orders': list(self.orders),
            'statuses': list(self.statuses),
            'omegas': [float(w) for w in self.omegas],
            'note': self.note,
        }


@dataclass
class NeReport:
    """Equilibria found for a game, the overall status and the search trace."""
    game: str
    layout: tuple
    status: NeStatus
    equilibria: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    seed: int = 0
    elapsed: float = None

    def to_dict(self):
        data = {
            'game': self.game,
            'layout': list(self.layout),
            'status': self.status.value,
            'seed': self.seed,
            'equilibria': [e.to_dict() for e in self.equilibria],
            'trace': [r.to_dict() for r in self.trace],
        }
        if self.elapsed is not None:
            data['elapsed'] = self.elapsed
        return data


@dataclass(frozen=True)
class NextResult:
    """Outcome of one next-equilibrium search from a known equilibrium."""
    status: NextStatus
    equilibrium: Equilibrium = None
    delta: float = float('nan')
    trace: tuple = ()
    system: object = None
    loops: int = 0
