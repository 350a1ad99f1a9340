"""
KKT services: multiplier expressions, KKT polynomial sets, cuts and the
per-player check sets.
"""

import logging
from dataclasses import replace

import numpy as np
from scipy import optimize

from nashpoly.polycore import (
    DimensionError,
    Polynomial,
    block_gradient,
    block_polynomial,
    restrict_rivals,
    rival_values,
)

from .families import check_family_shape, constraint_matrix, family_matrix
from .models import FamilyKind, KktSystem, MultiplierCheck, MultiplierError

logger = logging.getLogger(__name__)


def multiplier_expressions(player):
    """
    Lagrange multiplier expressions lambda_{i,j}(x) of one player.

    Built-in families give lambda_i = H_i(x_i) (grad_{x_i} f_i, 0); custom
    families return the supplied polynomials.

    Args:
        player: PlayerProblem whose objective carries the full block layout

    Returns:
        List of m_i polynomials over the full variable x

    Raises:
        FamilyError: If the family does not match the constraints
    """
    check_family_shape(player)
    layout = player.layout
    if player.family.kind == FamilyKind.CUSTOM:
        return list(player.family.multipliers)
    gradient = block_gradient(player.objective, player.index)
    expressions = []
    for row in family_matrix(player):
        lam = Polynomial.zero(layout.nvars, layout)
        for h, df in zip(row[:player.width], gradient):
            if not h.is_zero():
                lam = lam + block_polynomial(h, player.index, layout) * df
        expressions.append(lam)
    return expressions


def _player_sets(player, lambdas):
    """(phi_i, psi_i) over the full variable."""
    layout = player.layout
    gradient = block_gradient(player.objective, player.index)
    constraints = [block_polynomial(g, player.index, layout) for g in player.constraints]

    stationarity = []
    for l, var in enumerate(layout.block_variables(player.index)):
        component = gradient[l]
        for lam, g in zip(lambdas, constraints):
            dg = g.diff(var)
            if not dg.is_zero():
                component = component - lam * dg
        stationarity.append(component)

    phi = stationarity
    phi += [constraints[j] for j in player.equality_indices]
    phi += [lambdas[j] * constraints[j] for j in player.inequality_indices]
    psi = [constraints[j] for j in player.inequality_indices]
    psi += [lambdas[j] for j in player.inequality_indices]
    return phi, psi


def kkt_sets(nep):
    """
    Assemble the KKT polynomial sets Phi and Psi of a game.

    Returns:
        KktSystem without cuts
    """
    phi, psi, lambda_exprs = [], [], []
    for player in nep.players:
        lambdas = multiplier_expressions(player)
        player_phi, player_psi = _player_sets(player, lambdas)
        phi.extend(player_phi)
        psi.extend(player_psi)
        lambda_exprs.append(tuple(lambdas))
    logger.debug(f"KKT system for '{nep.name}': {len(phi)} equalities, {len(psi)} inequalities")
    return KktSystem(phi=phi, psi=psi, lambda_exprs=tuple(lambda_exprs), layout=nep.layout)


def cut_polynomial(objective, i, v):
    """f_i(v, x_-i) - f_i(x)."""
    layout = objective.layout
    v = np.asarray(v, dtype=float)
    if v.shape != (layout[i],):
        raise DimensionError(f"Cut point for player {i + 1} needs {layout[i]} entries, got {v.shape}")
    fixed = objective.partial_evaluate(dict(zip(layout.block_variables(i), v)))
    return fixed - objective


def attach_cuts(system, cuts, objectives):
    """
    Append cut inequalities for new points v in K_i.

    Args:
        system: KktSystem to extend
        cuts: Per player, an iterable of new cut points of length n_i
        objectives: Per player objective f_i

    Returns:
        A new KktSystem; the input is unchanged
    """
    cuts = list(cuts)
    if len(cuts) != len(system.layout):
        raise DimensionError(f"Expected cut lists for {len(system.layout)} players, got {len(cuts)}")
    psi = list(system.psi)
    merged = []
    for i, points in enumerate(cuts):
        added = []
        for v in points:
            psi.append(cut_polynomial(objectives[i], i, v))
            added.append(tuple(float(c) for c in v))
        merged.append(tuple(system.cuts[i]) + tuple(added))
    return replace(system, psi=tuple(psi), cuts=tuple(merged))


def check_sets(nep, i, u):
    """
    Polynomial sets H_i(u) (equalities) and G_i(u) (inequalities) in x_i.

    Rival blocks are fixed to u_-i. These describe the KKT points of player
    i's own problem given the rivals' strategies at u.

    Returns:
        (H_i(u), G_i(u)) as lists of polynomials in n_i variables
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (nep.n,):
        raise DimensionError(f"Candidate point needs {nep.n} entries, got {u.shape}")
    player = nep.player(i)
    lambdas = multiplier_expressions(player)
    u_minus_i = rival_values(nep.layout, i, u)
    restricted = [restrict_rivals(lam, i, u_minus_i) for lam in lambdas]
    gradient = [restrict_rivals(df, i, u_minus_i) for df in block_gradient(player.objective, i)]
    equalities = [player.constraints[j] for j in player.equality_indices]
    equalities += [restricted[j] * player.constraints[j] for j in player.inequality_indices]
    for l in range(player.width):
        component = gradient[l]
        for lam, g in zip(restricted, player.constraints):
            component = component - lam * g.diff(l)
        equalities.append(component)

    inequalities = [player.constraints[j] for j in player.inequality_indices]
    inequalities += [restricted[j] for j in player.inequality_indices]
    return equalities, inequalities


def multiplier_values(nep, x):
    """Evaluate lambda_{i,j}(x) for every player."""
    x = np.asarray(x, dtype=float)
    return [np.array([lam.evaluate(x) for lam in multiplier_expressions(p)]) for p in nep.players]


def nonsingularity_diagnostic(player, samples=20, seed=0):
    """
    Smallest numeric column rank of G_i(x_i) over random sample points.

    A rank below m_i means the constraint tuple is singular somewhere and
    multiplier expressions may not exist. Logs a warning in that case.
    """
    if player.m == 0:
        return 0
    rng = np.random.default_rng(seed)
    rows = constraint_matrix(player)
    min_rank = player.m
    for _ in range(samples):
        point = rng.uniform(-1.0, 1.0, size=player.width)
        matrix = np.array([[entry.evaluate(point) for entry in row] for row in rows])
        min_rank = min(min_rank, int(np.linalg.matrix_rank(matrix, tol=1e-9)))
    if min_rank < player.m:
        logger.warning(
            f"Player {player.index + 1}: G_i is rank deficient ({min_rank} < {player.m}) at sampled points"
        )
    return min_rank


def _own_kkt_residual(player, u_minus_i):
    """Residual function of player i's own KKT system in (x_i, mu)."""
    i, width, m = player.index, player.width, player.m
    gradient = [restrict_rivals(df, i, u_minus_i) for df in block_gradient(player.objective, i)]
    jacobian = [[g.diff(l) for g in player.constraints] for l in range(width)]

    def residual(z):
        x, mu = z[:width], z[width:]
        g_values = np.array([g.evaluate(x) for g in player.constraints])
        out = [
            gradient[l].evaluate(x) - sum(mu[j] * jacobian[l][j].evaluate(x) for j in range(m))
            for l in range(width)
        ]
        for j in range(m):
            out.append(g_values[j] if player.is_equality(j) else mu[j] * g_values[j])
        return np.array(out)

    return residual


def verify_custom_multipliers(nep, i, samples=20, seed=0, tol=1e-6):
    """
    Check supplied multiplier expressions against numerically solved KKT points.

    For random rival strategies the player's own KKT system in (x_i, mu) is
    solved from random starts; at every solution found the expressions
    lambda_{i,j}(x) must reproduce mu_j.

    Returns:
        MultiplierCheck

    Raises:
        MultiplierError: If some KKT point contradicts the expressions
    """
    player = nep.player(i)
    if player.family.kind != FamilyKind.CUSTOM:
        return MultiplierCheck(player=i, points_checked=0, max_error=0.0, passed=True)
    lambdas = multiplier_expressions(player)
    rng = np.random.default_rng(seed)
    layout = nep.layout
    width, m = player.width, player.m

    found = []
    max_error = 0.0
    attempts = 0
    while len(found) < samples and attempts < 10 * samples:
        attempts += 1
        point = rng.uniform(-1.0, 1.0, size=nep.n)
        u_minus_i = rival_values(layout, i, point)
        residual = _own_kkt_residual(player, u_minus_i)
        start = rng.uniform(-1.5, 1.5, size=width + m)
        solution = optimize.root(residual, start, method='hybr')
        if not solution.success or np.max(np.abs(residual(solution.x))) > 1e-10:
            continue
        x_i, mu = solution.x[:width], solution.x[width:]
        if np.max(np.abs(x_i)) > 1e3:
            continue
        full = point.copy()
        full[layout.block_slice(i)] = x_i
        values = np.array([lam.evaluate(full) for lam in lambdas])
        error = float(np.max(np.abs(values - mu)) / max(1.0, float(np.max(np.abs(mu)))))
        max_error = max(max_error, error)
        found.append(full)
        if error > tol:
            raise MultiplierError(
                f"Player {i + 1}: multiplier expressions give {values.round(8).tolist()} "
                f"but the KKT point needs {mu.round(8).tolist()}"
            )

    if len(found) < samples:
        logger.warning(f"Player {i + 1}: only {len(found)} of {samples} KKT points found to check multipliers")
    return MultiplierCheck(player=i, points_checked=len(found), max_error=max_error, passed=True)


def validate_multipliers(nep, samples=5, seed=0):
    """
    Numerical checks run on games read from problem files.

    Every player's G_i is sampled for rank deficiency (a warning only), and
    custom multiplier expressions are checked against solved KKT points.

    Returns:
        List of MultiplierCheck, one per player

    Raises:
        MultiplierError: If custom expressions contradict a KKT point
    """
    checks = []
    for player in nep.players:
        nonsingularity_diagnostic(player, seed=seed)
        checks.append(verify_custom_multipliers(nep, player.index, samples=samples, seed=seed))
    return checks
