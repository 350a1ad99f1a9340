"""
Catalog of worked games.

Every builder returns a fresh NepProblem. GAMES maps the bundled names to
their builders; random_ball_quadratic produces seeded random instances.
"""

from itertools import combinations, combinations_with_replacement

import numpy as np

from nashpoly.polycore import BlockLayout, Polynomial

from .families import canonical_constraints
from .models import ConstraintFamily, FamilyError, NepProblem, PlayerProblem


def _blocks(widths):
    """Per-player variable lists over the full layout, plus the layout."""
    layout = BlockLayout(widths)
    variables = Polynomial.variables(layout.nvars, layout)
    return [[variables[v] for v in layout.block_variables(i)] for i in range(len(widths))], layout


def _own(width):
    return Polynomial.variables(width)


def _zero(layout):
    return Polynomial.zero(layout.nvars, layout)


def _total(polys, layout):
    return sum(polys, _zero(layout))


def _player(i, width, objective, family, constraints=None, equalities=()):
    if constraints is None:
        constraints, equalities = canonical_constraints(family, width)
    return PlayerProblem(
        index=i,
        width=width,
        objective=objective,
        constraints=tuple(constraints),
        equality_indices=tuple(equalities),
        family=family,
    )


def _grad(objective, layout, i):
    return [objective.diff(v) for v in layout.block_variables(i)]


def ball_duel():
    """Two players on unit balls with three isolated equilibria."""
    (x1, x2), layout = _blocks((2, 2))
    f1 = x1[0] * (x1[0] + x2[0] + 4 * x2[1]) + 2 * x1[1] ** 2
    f2 = x2[0] * (x1[0] + 2 * x1[1] + x2[0]) + x2[1] * (2 * x1[0] + x1[1] + x2[1])
    ball = ConstraintFamily.ball()
    return NepProblem(
        players=(_player(0, 2, f1, ball), _player(1, 2, f2, ball)),
        name='ball_duel',
    )


def ball_simplex_convex():
    """Convex game: a ball player against a simplex player."""
    (x1, x2), layout = _blocks((2, 2))
    f1 = x1[0] * (x1[0] + x2[0] + 4 * x2[1]) + 4 * x1[1] ** 2
    f2 = 2 * x2[0] ** 2 + 2 * x2[1] ** 2 + (x1[0] - 2 * x1[1]) * x2[0] + (4 * x1[0] + x1[1]) * x2[1]
    return NepProblem(
        players=(
            _player(0, 2, f1, ConstraintFamily.ball()),
            _player(1, 2, f2, ConstraintFamily.simplex()),
        ),
        name='ball_simplex_convex',
    )


def _cubic_sphere(negated):
    (x1, x2), layout = _blocks((3, 3))
    f1 = _total([x1[j] * (x1[j] - (j + 1) * x2[j]) for j in range(3)], layout)
    product = x2[0] * x2[1] * x2[2]
    rival_pairs = _total([x1[i] * x1[j] * x2[k] for i, j in combinations(range(3), 2) for k in range(3)], layout)
    own_pairs = _total([x1[i] * x2[j] * x2[k] for i in range(3) for j, k in combinations(range(3), 2)], layout)
    if negated:
        f2 = -product + own_pairs - rival_pairs
    else:
        f2 = product + rival_pairs + own_pairs

    # Player 1: x11 >= 0, 1 - x11 x12 >= 0, 1 - x12 x13 >= 0
    y = _own(3)
    one = Polynomial.constant(1.0, 3)
    g1 = (y[0], one - y[0] * y[1], one - y[1] * y[2])
    d1 = _grad(f1, layout, 0)
    lam1 = (
        (1 - x1[0] * x1[1]) * d1[0],
        -x1[0] * d1[0],
        x1[0] * d1[0] - x1[1] * d1[1],
    )

    # Player 2 lives on the full unit sphere; the listed equilibria satisfy |x_2| = 1
    return NepProblem(
        players=(
            _player(0, 3, f1, ConstraintFamily.custom(lam1), g1),
            _player(1, 3, f2, ConstraintFamily.sphere()),
        ),
        name='cubic_sphere_negated' if negated else 'cubic_sphere',
    )


def cubic_sphere():
    """Nonconvex game with an unbounded first player; four equilibria."""
    return _cubic_sphere(negated=False)


def cubic_sphere_negated():
    """Sign-flipped second objective of cubic_sphere; has no equilibrium."""
    return _cubic_sphere(negated=True)


def _three_player(zero_sum):
    (x1, x2, x3), layout = _blocks((2, 2, 2))
    f1 = (2 * x1[0] - x1[1] + 3) * x1[0] * x2[0] + ((2 * x1[1]) ** 2 + x3[1] ** 2) * x1[1]
    f2 = (x2[0] ** 2 - x1[1]) * x2[0] + (x2[1] ** 2 + 2 * x3[1] + x1[1] * x3[0]) * x2[1]
    if zero_sum:
        f3 = -f1 - f2
    else:
        f3 = (x1[0] * x1[1] - 1) * x3[0] - (3 * x3[1] ** 2 + 1) * x3[1] + 2 * (x3[0] + x3[1]) * x3[0] * x3[1]

    # Player 2: x^T x - 1 = 0, x21 >= 0, x22 >= 0
    z = _own(2)
    g2 = (z[0] ** 2 + z[1] ** 2 - 1, z[0], z[1])
    d2 = _grad(f2, layout, 1)
    lam21 = (x2[0] * d2[0] + x2[1] * d2[1]) * 0.5
    lam2 = (lam21, d2[0] - 2 * x2[0] * lam21, d2[1] - 2 * x2[1] * lam21)

    # Player 3: 1 - x3j^2 >= 0 per coordinate
    w = _own(2)
    g3 = (1 - w[0] ** 2, 1 - w[1] ** 2)
    d3 = _grad(f3, layout, 2)
    lam3 = (x3[0] * d3[0] * -0.5, x3[1] * d3[1] * -0.5)

    return NepProblem(
        players=(
            _player(0, 2, f1, ConstraintFamily.ball()),
            _player(1, 2, f2, ConstraintFamily.custom(lam2), g2, equalities=(0,)),
            _player(2, 2, f3, ConstraintFamily.custom(lam3), g3),
        ),
        name='three_player_zero_sum' if zero_sum else 'three_player_mixed',
    )


def three_player_mixed():
    """Three players: ball, arc of the unit circle, and a box; unique equilibrium."""
    return _three_player(zero_sum=False)


def three_player_zero_sum():
    """Zero-sum variant of three_player_mixed; has no equilibrium."""
    return _three_player(zero_sum=True)


def annulus():
    """Two players on the annulus 1 <= x^T x <= 2."""
    (x1, x2), layout = _blocks((2, 2))
    f1 = 2 * x1[0] * x1[1] + 3 * x1[0] * x2[0] ** 2 + 3 * x1[1] ** 2 * x2[1]
    f2 = (
        x2[0] ** 3 + x2[1] ** 3 + x1[0] * x2[0] ** 2 + x1[1] * x2[1] ** 2
        + x1[0] * x1[1] * (x2[0] + x2[1])
    )
    players = []
    for i, (f, block) in enumerate(((f1, x1), (f2, x2))):
        z = _own(2)
        radius = z[0] ** 2 + z[1] ** 2
        g = (radius - 1, 2 - radius)
        grad = _grad(f, layout, i)
        slope = block[0] * grad[0] + block[1] * grad[1]
        norm = block[0] ** 2 + block[1] ** 2
        lam = (slope * (2 - norm) * 0.5, slope * (1 - norm) * 0.25)
        players.append(_player(i, 2, f, ConstraintFamily.custom(lam), g))
    return NepProblem(players=tuple(players), name='annulus')


def sphere_symmetric(n=3):
    """Two players on unit spheres in R^n with mirrored cubic objectives."""
    (x1, x2), layout = _blocks((n, n))

    def objective(own, rival):
        return _total(
            [own[i] * own[j] * (rival[i] + rival[j]) for i, j in combinations_with_replacement(range(n), 2)],
            layout,
        )

    sphere = ConstraintFamily.sphere()
    return NepProblem(
        players=(_player(0, n, objective(x1, x2), sphere), _player(1, n, objective(x2, x1), sphere)),
        name=f'sphere_symmetric_{n}',
    )


def quartic_unconstrained(n=2):
    """Three unconstrained players with quartic objectives, x_{i,0} = 1."""
    blocks, layout = _blocks((n, n, n))
    one = Polynomial.constant(1.0, layout.nvars, layout)
    padded = [[one] + block for block in blocks]
    objectives = []
    for p in range(3):
        own, first, second = padded[p], padded[(p + 1) % 3], padded[(p + 2) % 3]
        cubic = _total(
            [
                own[i] * own[j] * (own[k] + first[i] + second[j])
                for i in range(n + 1) for j in range(i, n + 1) for k in range(j, n + 1)
            ],
            layout,
        )
        quartic = _total([own[i] ** 4 for i in range(1, n + 1)], layout)
        objectives.append(quartic + cubic / n ** 2)
    free = ConstraintFamily.unconstrained()
    return NepProblem(
        players=tuple(_player(p, n, objectives[p], free) for p in range(3)),
        name=f'quartic_unconstrained_{n}',
    )


POLLUTION_PARAMETERS = {
    'b': (1.5, 2.0, 1.8),
    'c': {(0, 1): 0.2, (0, 2): 0.3, (1, 0): 0.4, (1, 2): 0.2, (2, 0): 0.5, (2, 1): 0.1},
    'd': (0.8, 1.2, 1.0),
    'E': (3.0, 4.0, 2.0),
    'gamma': (0.7, 0.5, 0.9),
}


def pollution_control(parameters=None):
    """
    Three countries choosing emissions x_{i,1} and local investment x_{i,2}.

    Constraints per country, in multiplier order: x_{i,2} >= 0,
    b_i - x_{i,1} >= 0, x_{i,1} - gamma_i x_{i,2} >= 0 and
    E_i - x_{i,1} + gamma_i x_{i,2} >= 0.
    """
    params = parameters or POLLUTION_PARAMETERS
    blocks, layout = _blocks((2, 2, 2))
    players = []
    for i, (e, q) in enumerate(blocks):
        b, d, E, gamma = params['b'][i], params['d'][i], params['E'][i], params['gamma'][i]
        if abs(b - E) < 1e-12:
            raise FamilyError(f"Country {i + 1}: the multiplier formulas need b != E")
        spill = _total([params['c'][(i, j)] * q * blocks[j][0] for j in range(3) if j != i], layout)
        f = -e * (b - 0.5 * e) + q ** 2 * 0.5 + d * (e - gamma * q) + spill

        z = _own(2)
        net = z[0] - gamma * z[1]
        g = (z[1], b - z[0], net, E - net)

        d_e, d_q = _grad(f, layout, i)
        net_x = e - gamma * q
        lam4 = (d_q * q * net_x - d_e * (b - e) * net_x) / ((b - E) * E)
        lam3 = ((b - e) * (d_e + lam4) - q * (d_q - gamma * lam4)) / b
        lam2 = lam3 - lam4 - d_e
        lam1 = d_q + gamma * lam3 - gamma * lam4
        players.append(_player(i, 2, f, ConstraintFamily.custom((lam1, lam2, lam3, lam4)), g))
    return NepProblem(players=tuple(players), name='pollution_control')


ELECTRICITY_PARAMETERS = {
    'a': 1.0,
    'b': 10.0,
    'c': ((0.4,), (0.35, 0.35), (0.46, 0.5, 0.5)),
    'd': ((2.0,), (1.25, 1.0), (2.25, 3.0, 3.0)),
    'E': ((2.0,), (2.5, 0.67), (1.2, 1.8, 1.6)),
}


def electricity_market(parameters=None):
    """Three generating companies with 1, 2 and 3 capacity-bounded units."""
    params = parameters or ELECTRICITY_PARAMETERS
    widths = tuple(len(c) for c in params['c'])
    blocks, layout = _blocks(widths)
    everything = _total([x for block in blocks for x in block], layout)
    price = params['b'] - params['a'] * everything
    players = []
    for i, block in enumerate(blocks):
        cost = _total(
            [0.5 * params['c'][i][j] * x ** 2 + params['d'][i][j] * x for j, x in enumerate(block)],
            layout,
        )
        f = cost - price * _total(block, layout)
        family = ConstraintFamily.box(lower=(0.0,) * len(block), upper=params['E'][i])
        players.append(_player(i, len(block), f, family))
    return NepProblem(players=tuple(players), name='electricity_market')


def random_ball_quadratic(seed, widths=(2, 2)):
    """
    Random game with generic dense quadratic objectives and ball constraints.

    Coefficients are uniform in [-1, 1] from a seeded generator.
    """
    rng = np.random.default_rng(seed)
    _, layout = _blocks(widths)
    n = layout.nvars
    x = Polynomial.variables(n, layout)
    ball = ConstraintFamily.ball()
    players = []
    for i, width in enumerate(widths):
        quadratic = rng.uniform(-1.0, 1.0, size=(n, n))
        linear = rng.uniform(-1.0, 1.0, size=n)
        f = _zero(layout)
        for a in range(n):
            f = f + linear[a] * x[a]
            for b in range(a, n):
                f = f + quadratic[a, b] * x[a] * x[b]
        players.append(_player(i, width, f, ball))
    return NepProblem(players=tuple(players), name=f'random_ball_quadratic_{seed}')


GAMES = {
    'ball_duel': ball_duel,
    'ball_simplex_convex': ball_simplex_convex,
    'cubic_sphere': cubic_sphere,
    'cubic_sphere_negated': cubic_sphere_negated,
    'three_player_mixed': three_player_mixed,
    'three_player_zero_sum': three_player_zero_sum,
    'annulus': annulus,
    'sphere_symmetric_3': sphere_symmetric,
    'quartic_unconstrained_2': quartic_unconstrained,
    'pollution_control': pollution_control,
    'electricity_market': electricity_market,
}

# Alternate names accepted by build_game and the command line
ALIASES = {
    'example_1_1': 'ball_duel',
    'example_5_2_negated': 'cubic_sphere_negated',
}


def available_games():
    return sorted(GAMES)


def build_game(name):
    """
    Build a bundled game by name or alias.

    Raises:
        KeyError: If the name is not in the catalog
    """
    name = ALIASES.get(name, name)
    if name not in GAMES:
        raise KeyError(f"Unknown game '{name}'. Available: {', '.join(available_games())}")
    return GAMES[name]()
