"""
Built-in constraint families.

Each family knows its canonical constraint tuple g_i and a polynomial matrix
H_i(x_i) with H_i(x_i) G_i(x_i) = I, where

    G_i = [ grad g_1  ...  grad g_m ]
          [ diag(g_1, ..., g_m)     ]

so that lambda_i(x) = H_i(x_i) (grad f_i(x), 0).
"""

from nashpoly.polycore import Polynomial

from .models import FamilyError, FamilyKind

# Box bounds closer than this are treated as a fixed coordinate
MIN_BOX_WIDTH = 1e-12


def _box_pairs(family, width):
    """(coordinate, side, bound) in the order the box constraints are listed."""
    pairs = []
    for j in range(width):
        upper = family.bound('upper', j)
        lower = family.bound('lower', j)
        if upper is not None and lower is not None and upper - lower < MIN_BOX_WIDTH:
            raise FamilyError(f"Box coordinate {j + 1} has empty or degenerate bounds [{lower}, {upper}]")
        if upper is not None:
            pairs.append((j, 'upper', upper))
        if lower is not None:
            pairs.append((j, 'lower', lower))
    return pairs


def canonical_constraints(family, width):
    """
    Constraint tuple generated by a built-in family.

    Returns:
        (constraints, equality_indices) with constraints in `width` variables

    Raises:
        FamilyError: For custom families, which have no canonical tuple
    """
    x = Polynomial.variables(width)
    one = Polynomial.constant(1.0, width)
    kind = family.kind
    if kind == FamilyKind.UNCONSTRAINED:
        return (), ()
    if kind in (FamilyKind.BALL, FamilyKind.SPHERE):
        g = one - sum((xj * xj for xj in x), Polynomial.zero(width))
        return (g,), ((0,) if kind == FamilyKind.SPHERE else ())
    if kind == FamilyKind.SIMPLEX:
        g0 = one - sum(x, Polynomial.zero(width))
        return (g0,) + tuple(x), ()
    if kind == FamilyKind.BOX:
        constraints = []
        for j, side, bound in _box_pairs(family, width):
            constraints.append(bound - x[j] if side == 'upper' else x[j] - bound)
        return tuple(constraints), ()
    raise FamilyError(f"Family '{kind.value}' has no canonical constraints")


def constraint_matrix(player):
    """G_i(x_i) as a list of rows, (n_i + m_i) x m_i polynomials in x_i."""
    width, m = player.width, player.m
    zero = Polynomial.zero(width)
    rows = [[g.diff(l) for g in player.constraints] for l in range(width)]
    for r in range(m):
        rows.append([player.constraints[r] if c == r else zero for c in range(m)])
    return rows


def family_matrix(player):
    """
    H_i(x_i) as a list of rows, m_i x (n_i + m_i) polynomials in x_i.

    Raises:
        FamilyError: For custom families
    """
    family = player.family
    width, m = player.width, player.m
    x = Polynomial.variables(width)
    zero = Polynomial.zero(width)
    one = Polynomial.constant(1.0, width)
    kind = family.kind

    if kind == FamilyKind.UNCONSTRAINED:
        return []
    if kind in (FamilyKind.BALL, FamilyKind.SPHERE):
        return [[xj * -0.5 for xj in x] + [one]]
    if kind == FamilyKind.SIMPLEX:
        bottom = [one] * m
        rows = [[-xj for xj in x] + bottom]
        for j in range(width):
            rows.append([(one if l == j else zero) - x[l] for l in range(width)] + bottom)
        return rows
    if kind == FamilyKind.BOX:
        pairs = _box_pairs(family, width)
        position = {(j, side): r for r, (j, side, _) in enumerate(pairs)}
        rows = []
        for j, side, bound in pairs:
            top = [zero] * width
            bottom = [zero] * m
            other = 'lower' if side == 'upper' else 'upper'
            if (j, other) not in position:
                top[j] = -one if side == 'upper' else one
            else:
                upper = family.bound('upper', j)
                lower = family.bound('lower', j)
                scale = 1.0 / (upper - lower)
                # upper row: -(x_j - a)/(b - a) e_j, lower row adds e_j
                top[j] = (x[j] - lower) * -scale + (one if side == 'lower' else zero)
                bottom[position[(j, 'upper')]] = one * scale
                bottom[position[(j, 'lower')]] = one * scale
            rows.append(top + bottom)
        return rows
    raise FamilyError("Custom families are given by multiplier expressions, not by H_i")


def matrix_product(left, right):
    """Product of two polynomial matrices given as row lists."""
    if not left or not right:
        return []
    inner = len(right)
    if any(len(row) != inner for row in left):
        raise FamilyError("Polynomial matrix shapes do not match")
    nvars = right[0][0].nvars
    return [
        [sum((row[k] * right[k][c] for k in range(inner)), Polynomial.zero(nvars)) for c in range(len(right[0]))]
        for row in left
    ]


def check_family_shape(player):
    """
    Verify that a built-in family matches the player's constraint tuple.

    Raises:
        FamilyError: On count, kind or coefficient mismatch
    """
    family = player.family
    if family.kind == FamilyKind.CUSTOM:
        if family.multipliers is None:
            raise FamilyError(f"Player {player.index + 1}: custom family without multiplier expressions")
        if len(family.multipliers) != player.m:
            raise FamilyError(
                f"Player {player.index + 1}: {len(family.multipliers)} multipliers for {player.m} constraints"
            )
        return
    if family.kind == FamilyKind.BOX:
        for side in ('lower', 'upper'):
            values = family.lower if side == 'lower' else family.upper
            if values is not None and len(values) != player.width:
                raise FamilyError(f"Player {player.index + 1}: {side} bounds need {player.width} entries")
    expected, equalities = canonical_constraints(family, player.width)
    if len(expected) != player.m:
        raise FamilyError(
            f"Player {player.index + 1}: family '{family.kind.value}' expects {len(expected)} "
            f"constraints, got {player.m}"
        )
    if tuple(equalities) != tuple(player.equality_indices):
        raise FamilyError(f"Player {player.index + 1}: equality pattern does not match family '{family.kind.value}'")
    for j, (g, want) in enumerate(zip(player.constraints, expected)):
        if g.max_abs_difference(want) > 1e-12:
            raise FamilyError(
                f"Player {player.index + 1}: constraint {j + 1} differs from the '{family.kind.value}' family"
            )
