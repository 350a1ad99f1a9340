"""
Equilibrium search: the cutting loop for one equilibrium, the delta-gated
search for the next one and the full enumeration.
"""

import logging

import numpy as np

from config import settings
from nashpoly.conic import SolverStatus
from nashpoly.games import attach_cuts, kkt_sets, multiplier_values, random_ball_quadratic
from nashpoly.relaxations import RelaxationSpec, gen_theta, theta_polynomial, theta_value

from .hierarchy import is_certified, is_tight, moment_hierarchy
from .models import (
    CheckStatus,
    Equilibrium,
    LoopRecord,
    MasterStatus,
    NeReport,
    NeStatus,
    NextResult,
    NextStatus,
    SEARCH_TRANSITIONS,
    SearchPhase,
    SearchTransitionError,
    SolverOptions,
)
from .services import check_candidate, solve_master

logger = logging.getLogger(__name__)

# Gate value and upsilon agree to this
GATE_TOL = 1e-6

# delta below this means the known equilibrium is probably not isolated
DELTA_FLOOR = 1e-12


class EquilibriumSearch:
    """
    Service class running the cutting loop for one equilibrium.

    Every phase change is checked against SEARCH_TRANSITIONS and appended to
    the trace.
    """

    def __init__(self, nep, options=None, theta=None, exclusion=None, system=None, loop_offset=0):
        self.nep = nep
        self.options = options or SolverOptions()
        self.theta = gen_theta(self.options.seed, nep.n) if theta is None else theta
        self.exclusion = exclusion
        self.system = system if system is not None else kkt_sets(nep)
        self.phase = SearchPhase.START
        self.loop = loop_offset
        self.loops_run = 0
        self.trace = []
        self.equilibrium = None

    def can_transition_to(self, phase):
        return phase in SEARCH_TRANSITIONS.get(self.phase, [])

    def transition_to(self, phase, **details):
        """
        Raises:
            SearchTransitionError: If the phase change is not allowed
        """
        if not self.can_transition_to(phase):
            raise SearchTransitionError(
                f"Cannot move from {self.phase.value} to {phase.value}. "
                f"Allowed: {[p.value for p in SEARCH_TRANSITIONS.get(self.phase, [])]}"
            )
        self.phase = phase
        self._record(phase, **details)

    def _record(self, phase, **details):
        self.trace.append(LoopRecord(
            loop=self.loop,
            phase=phase.value,
            cut_sizes=tuple(self.system.cut_sizes()),
            **details,
        ))

    def _accept(self, point, check):
        self.equilibrium = Equilibrium(
            point=point,
            omega_star=check.omega_star,
            omegas=tuple(check.omegas),
            multipliers=tuple(multiplier_values(self.nep, point)),
            theta=theta_value(self.theta, point),
            loop=self.loop,
        )
        logger.info(f"'{self.nep.name}': equilibrium {np.round(point, 6).tolist()} in loop {self.loop}")

    def run(self):
        """
        Run until an equilibrium is accepted, nonexistence is certified or the
        loop budget is spent.

        Returns:
            The terminal SearchPhase
        """
        options = self.options
        while True:
            if self.loops_run >= options.max_outer_loops:
                self.transition_to(SearchPhase.INCONCLUSIVE, note='outer loop limit reached')
                return self.phase
            self.loops_run += 1
            self.loop += 1
            master = solve_master(self.system, self.theta, self.exclusion, options)
            self.transition_to(SearchPhase.MASTER, orders=master.orders, statuses=master.statuses)

            if master.status == MasterStatus.INFEASIBLE:
                self.transition_to(SearchPhase.NONE, note='master relaxation infeasible')
                return self.phase
            if master.status == MasterStatus.INCONCLUSIVE:
                self.transition_to(SearchPhase.INCONCLUSIVE, note='master hierarchy reached k_max')
                return self.phase

            point = master.point
            check = check_candidate(self.nep, point, options)
            self.transition_to(SearchPhase.CHECK, candidate=tuple(point), omegas=tuple(check.omegas))

            if check.is_equilibrium(options.omega_tol):
                self._accept(point, check)
                self.transition_to(SearchPhase.ACCEPTED, candidate=tuple(point), omegas=tuple(check.omegas))
                return self.phase
            if options.convex:
                self.transition_to(SearchPhase.INCONCLUSIVE, note='convex mode candidate failed the check')
                return self.phase

            cuts = [
                c.minimizers if c.status == CheckStatus.IMPROVED else ()
                for c in check.checks
            ]
            if not any(cuts):
                self.transition_to(SearchPhase.INCONCLUSIVE, note='no cut points available')
                return self.phase
            fallback = any(c.fallback for c in check.checks)
            self.system = attach_cuts(self.system, cuts, self.nep.objectives)
            self.transition_to(
                SearchPhase.CUT,
                candidate=tuple(point),
                omegas=tuple(check.omegas),
                note='local descent cut' if fallback else '',
            )


def _report(nep, status, equilibria, trace, options):
    return NeReport(
        game=nep.name,
        layout=tuple(nep.layout),
        status=status,
        equilibria=sorted(equilibria, key=lambda e: e.theta),
        trace=list(trace),
        seed=options.seed,
    )


def find_one_ne(nep, options=None):
    """
    Find one equilibrium, or certify that none exists.

    Returns:
        NeReport with status FoundSome, NoneExists or Inconclusive
    """
    options = options or SolverOptions()
    search = EquilibriumSearch(nep, options)
    phase = search.run()
    if phase == SearchPhase.ACCEPTED:
        return _report(nep, NeStatus.FOUND_SOME, [search.equilibrium], search.trace, options)
    if phase == SearchPhase.NONE:
        logger.info(f"'{nep.name}': no equilibrium exists")
        return _report(nep, NeStatus.NONE_EXISTS, [], search.trace, options)
    return _report(nep, NeStatus.INCONCLUSIVE, [], search.trace, options)


def gate_value(system, theta, cap, options, upsilon=None):
    """
    Upper bound on max [x]_1^T Theta [x]_1 over the KKT points with value <= cap.

    Only OPTIMAL orders count. The hierarchy stops at the first order whose
    bound is within GATE_TOL of upsilon, or whose moments are flat.

    Returns:
        (bound, statuses); bound is None when no order produced a solution
    """
    theta_poly = theta_polynomial(theta, system.layout)
    psi = list(system.psi) + [cap - theta_poly]
    spec = RelaxationSpec(objective=-theta_poly, phi=system.phi, psi=psi)
    best, statuses = None, []
    for k, solution in moment_hierarchy(spec, options):
        statuses.append(solution.status.value)
        if solution.status == SolverStatus.PRIMAL_INFEASIBLE:
            return float('-inf'), tuple(statuses)
        if not is_certified(solution):
            continue
        bound = -solution.objective
        best = bound if best is None else min(best, bound)
        if upsilon is not None and best <= upsilon + GATE_TOL:
            break
        if is_tight(solution, spec.d0, k, options):
            break
    return best, tuple(statuses)


def find_next_ne(nep, known, options=None, theta=None, system=None, loop_offset=0):
    """
    Search for the equilibrium following known in [x]_1^T Theta [x]_1 order.

    delta is shrunk until no KKT point has a value in (upsilon, upsilon + delta],
    then the cutting loop runs with the exclusion level upsilon + delta.

    Returns:
        NextResult with status Next, NoMore or Inconclusive
    """
    options = options or SolverOptions()
    theta = gen_theta(options.seed, nep.n) if theta is None else theta
    system = system if system is not None else kkt_sets(nep)
    upsilon = theta_value(theta, known)
    delta = options.delta_init
    trace = []

    while True:
        if delta < DELTA_FLOOR:
            logger.warning(f"'{nep.name}': delta underflow; the known equilibrium may not be isolated")
            trace.append(LoopRecord(loop=loop_offset, phase='gate', note='delta underflow'))
            return NextResult(NextStatus.INCONCLUSIVE, delta=delta, trace=tuple(trace), system=system)
        eta, statuses = gate_value(system, theta, upsilon + delta, options, upsilon)
        trace.append(LoopRecord(
            loop=loop_offset,
            phase='gate',
            statuses=statuses,
            note=f'delta={delta:.6g} eta-upsilon={(eta - upsilon) if eta is not None else float("nan"):.6g}',
        ))
        if eta is None:
            return NextResult(NextStatus.INCONCLUSIVE, delta=delta, trace=tuple(trace), system=system)
        if eta <= upsilon + GATE_TOL:
            break
        delta = min(delta / options.delta_shrink, eta - upsilon)

    search = EquilibriumSearch(
        nep, options, theta=theta, exclusion=upsilon + delta, system=system, loop_offset=loop_offset,
    )
    phase = search.run()
    trace += search.trace
    if phase == SearchPhase.ACCEPTED:
        return NextResult(
            NextStatus.NEXT, search.equilibrium, delta, tuple(trace), search.system, search.loops_run,
        )
    if phase == SearchPhase.NONE:
        return NextResult(NextStatus.NO_MORE, None, delta, tuple(trace), search.system, search.loops_run)
    return NextResult(NextStatus.INCONCLUSIVE, None, delta, tuple(trace), search.system, search.loops_run)


def _is_new(equilibrium, found):
    return all(
        np.max(np.abs(equilibrium.point - e.point)) > settings.DISTINCT_TOL for e in found
    )


def enumerate_nes(nep, options=None):
    """
    Find every equilibrium in increasing [x]_1^T Theta [x]_1 order.

    Returns:
        NeReport with status FoundAll, NoneExists, FoundSome or Inconclusive
    """
    options = options or SolverOptions()
    theta = gen_theta(options.seed, nep.n)
    first = EquilibriumSearch(nep, options, theta=theta)
    phase = first.run()
    trace = list(first.trace)
    if phase == SearchPhase.NONE:
        logger.info(f"'{nep.name}': no equilibrium exists")
        return _report(nep, NeStatus.NONE_EXISTS, [], trace, options)
    if phase != SearchPhase.ACCEPTED:
        return _report(nep, NeStatus.INCONCLUSIVE, [], trace, options)

    found = [first.equilibrium]
    system = first.system
    loop = first.loop
    while True:
        result = find_next_ne(nep, found[-1].point, options, theta=theta, system=system, loop_offset=loop)
        trace += result.trace
        loop += result.loops
        if result.status == NextStatus.NO_MORE:
            logger.info(f"'{nep.name}': {len(found)} equilibria found, no more exist")
            return _report(nep, NeStatus.FOUND_ALL, found, trace, options)
        if result.status == NextStatus.INCONCLUSIVE:
            return _report(nep, NeStatus.FOUND_SOME, found, trace, options)
        if not _is_new(result.equilibrium, found) or result.equilibrium.theta <= found[-1].theta:
            logger.warning(f"'{nep.name}': next search returned a known equilibrium")
            trace.append(LoopRecord(loop=loop, phase='enumerate', note='repeated equilibrium'))
            return _report(nep, NeStatus.FOUND_SOME, found, trace, options)
        found.append(result.equilibrium)
        system = result.system


def random_game_smoke_test(seeds=range(5), options=None):
    """
    Enumerate seeded random ball-constrained quadratic games.

    Returns:
        List of (seed, NeReport)
    """
    options = options or SolverOptions()
    results = []
    for seed in seeds:
        report = enumerate_nes(random_ball_quadratic(seed), options)
        logger.info(f"Random game {seed}: {report.status.value} with {len(report.equilibria)} equilibria")
        results.append((seed, report))
    return results
