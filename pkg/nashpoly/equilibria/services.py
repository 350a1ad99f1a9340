"""
Equilibrium services: the KKT master problem and the per-player candidate
check.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import optimize

from nashpoly.conic import SolverStatus
from nashpoly.games import check_sets
from nashpoly.polycore import restrict_rivals, rival_values
from nashpoly.relaxations import RelaxationSpec, theta_polynomial, theta_value
from nashpoly.extraction import refine_points

from .hierarchy import extract_atoms, is_certified, moment_hierarchy
from .models import (
    CandidateCheck,
    CheckStatus,
    MasterResult,
    MasterStatus,
    PlayerCheck,
    SolverOptions,
)

logger = logging.getLogger(__name__)

# Absolute slack of the test relaxation value >= theta(u)
THETA_TOL = 1e-6

# Restarts of the local descent fallback
DESCENT_STARTS = 12


def _violation(system, point, theta=None, level=None):
    worst = system.max_violation(point)
    if level is not None:
        worst = max(worst, level - theta_value(theta, point))
    return worst


def solve_master(system, theta, exclusion=None, options=None):
    """
    Minimize [x]_1^T Theta [x]_1 over the KKT system through the moment hierarchy.

    Args:
        system: KktSystem (with cuts)
        theta: Positive definite matrix of side n + 1
        exclusion: Optional level; adds [x]_1^T Theta [x]_1 >= exclusion
        options: SolverOptions

    Returns:
        MasterResult with status Candidate, Infeasible or Inconclusive
    """
    options = options or SolverOptions()
    theta_poly = theta_polynomial(theta, system.layout)
    psi = list(system.psi)
    if exclusion is not None:
        psi.append(theta_poly - exclusion)
    spec = RelaxationSpec(objective=theta_poly, phi=system.phi, psi=psi)

    orders, statuses = [], []
    for k, solution in moment_hierarchy(spec, options):
        orders.append(k)
        statuses.append(solution.status.value)
        if solution.status == SolverStatus.PRIMAL_INFEASIBLE:
            logger.info(f"Master relaxation of order {k} is infeasible")
            return MasterResult(MasterStatus.INFEASIBLE, order=k, orders=tuple(orders), statuses=tuple(statuses))
        if not is_certified(solution):
            continue

        candidates = [refine_points([solution.y.first_moments()], list(system.phi))[0]]
        atoms = extract_atoms(solution.y, spec.d0, k, system.phi, options)
        if atoms:
            candidates += sorted(atoms, key=lambda v: theta_value(theta, v))
        for u in candidates:
            violation = _violation(system, u, theta, exclusion)
            value = theta_value(theta, u)
            if violation <= options.feas_check_tol and solution.objective >= value - THETA_TOL * max(1.0, abs(value)):
                logger.debug(f"Master candidate at order {k}: theta = {value:.10g}")
                return MasterResult(
                    MasterStatus.CANDIDATE,
                    point=np.asarray(u, dtype=float),
                    value=solution.objective,
                    order=k,
                    orders=tuple(orders),
                    statuses=tuple(statuses),
                )
    return MasterResult(MasterStatus.INCONCLUSIVE, orders=tuple(orders), statuses=tuple(statuses))


def _descent_starts(start, count, seed):
    """start, its reflection through the origin and count - 2 Gaussian points at the scale of start."""
    start = np.asarray(start, dtype=float)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.linalg.norm(start)))
    starts = [start, -start]
    starts += [rng.normal(scale=scale, size=start.shape) for _ in range(count - 2)]
    return starts


def _local_descent(player, restricted, start, seed):
    """
    Best feasible point of min restricted(x_i) over X_i found by SLSQP.

    The candidate block is a KKT point of the player, so a descent from it
    alone usually stays put.

    Returns:
        (point, value), or (None, inf) when no start ends feasible
    """
    gradient = [restricted.diff(v) for v in range(player.width)]
    constraints = []
    for j, g in enumerate(player.constraints):
        dg = [g.diff(v) for v in range(player.width)]
        constraints.append({
            'type': 'eq' if player.is_equality(j) else 'ineq',
            'fun': lambda x, g=g: g.evaluate(x),
            'jac': lambda x, dg=dg: np.array([d.evaluate(x) for d in dg]),
        })

    best, best_value = None, float('inf')
    for x0 in _descent_starts(start, DESCENT_STARTS, seed):
        result = optimize.minimize(
            restricted.evaluate,
            x0,
            jac=lambda x: np.array([d.evaluate(x) for d in gradient]),
            constraints=constraints,
            method='SLSQP',
            options={'maxiter': 200},
        )
        x = result.x
        if not np.all(np.isfinite(x)):
            continue
        feasible = all(
            abs(g.evaluate(x)) <= 1e-8 if player.is_equality(j) else g.evaluate(x) >= -1e-8
            for j, g in enumerate(player.constraints)
        )
        value = restricted.evaluate(x)
        if feasible and value < best_value:
            best, best_value = x, value
    return best, best_value


def check_player(nep, i, u, options=None):
    """
    Solve player i's lower-level problem at the candidate u.

    omega_i = min f_i(x_i, u_-i) - f_i(u) over the KKT points x_i of the
    player's own problem. The hierarchy stops early once an OPTIMAL bound
    reaches -omega_tol; otherwise flat truncation extracts the improving
    responses. Orders run up to k_max + check_extra_orders before a
    multistart local descent is tried.

    Returns:
        PlayerCheck
    """
    options = options or SolverOptions()
    u = np.asarray(u, dtype=float)
    layout = nep.layout
    player = nep.player(i)
    u_i = u[layout.block_slice(i)]
    restricted = restrict_rivals(player.objective, i, rival_values(layout, i, u))
    objective = restricted - restricted.evaluate(u_i)
    equalities, inequalities = check_sets(nep, i, u)
    spec = RelaxationSpec(objective=objective, phi=equalities, psi=inequalities)

    orders, statuses = [], []
    unbounded = 0
    lower = float('nan')
    for k, solution in moment_hierarchy(spec, options, options.k_max + options.check_extra_orders):
        orders.append(k)
        statuses.append(solution.status.value)
        if solution.status == SolverStatus.DUAL_INFEASIBLE:
            unbounded += 1
            if unbounded >= 2:
                logger.warning(f"Player {i + 1}: lower-level relaxation unbounded at two consecutive orders")
                return PlayerCheck(i, CheckStatus.UNBOUNDED, float('-inf'), (), tuple(orders), tuple(statuses))
            continue
        unbounded = 0
        if not solution.status.has_solution:
            continue
        certified = is_certified(solution)
        if certified:
            lower = solution.objective
            if lower >= -options.omega_tol:
                return PlayerCheck(i, CheckStatus.VERIFIED, 0.0, (), tuple(orders), tuple(statuses))

        atoms = extract_atoms(solution.y, spec.d0, k, equalities, options)
        if not atoms:
            continue
        values = [objective.evaluate(v) for v in atoms]
        improving = tuple(v for v, value in zip(atoms, values) if value < -options.omega_tol)
        if improving:
            return PlayerCheck(i, CheckStatus.IMPROVED, min(values), improving, tuple(orders), tuple(statuses))
        if certified:
            return PlayerCheck(i, CheckStatus.VERIFIED, min(min(values), 0.0), (), tuple(orders), tuple(statuses))

    point, value = _local_descent(player, objective, u_i, options.seed)
    if point is not None and value < -options.omega_tol:
        logger.warning(
            f"Player {i + 1}: extraction failed, using a local descent point with value {value:.6g} as cut"
        )
        return PlayerCheck(i, CheckStatus.IMPROVED, value, (point,), tuple(orders), tuple(statuses), fallback=True)
    omega = min(lower, 0.0) if np.isfinite(lower) else float('-inf')
    return PlayerCheck(i, CheckStatus.INCONCLUSIVE, omega, (), tuple(orders), tuple(statuses))


def check_candidate(nep, u, options=None):
    """
    Check every player's best response at the candidate u.

    Players are independent and run on options.workers threads.

    Returns:
        CandidateCheck with omega_i per player and omega_star = min omega_i
    """
    options = options or SolverOptions()
    players = range(nep.nplayers)
    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            checks = list(pool.map(lambda i: check_player(nep, i, u, options), players))
    else:
        checks = [check_player(nep, i, u, options) for i in players]
    return CandidateCheck(checks=tuple(checks))
