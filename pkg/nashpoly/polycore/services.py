"""
Polynomial services: bases, evaluation, gradients and the moment pairing.
"""

import numpy as np

from .models import (
    BlockLayout,
    DegreeOverflowError,
    DimensionError,
    Tms,
    basis_index,
    basis_size,
    monomial_basis,
)

__all__ = [
    'monomial_basis',
    'basis_index',
    'basis_size',
    'evaluate',
    'block_gradient',
    'pair',
    'lift',
    'monomial_vector',
    'restrict_rivals',
    'block_polynomial',
    'rival_values',
    'replace_block',
]


def evaluate(p, point):
    """
    Evaluate p term by term at a point.

    Raises:
        DimensionError: If the point length differs from p.nvars
    """
    return p.evaluate(point)


def block_gradient(p, i):
    """
    Gradient of p with respect to block i, as polynomials in all variables.

    Raises:
        InvalidPlayerError: If i is not a block of p's layout
    """
    p.layout.check_player(i)
    return [p.diff(v) for v in p.layout.block_variables(i)]


def monomial_vector(point, d):
    """[u]_d, the values u^alpha over monomial_basis(len(u), d)."""
    point = np.asarray(point, dtype=float)
    alphas = np.array(monomial_basis(len(point), d), dtype=int)
    return np.prod(point[None, :] ** alphas, axis=1)


def lift(u, order):
    """
    Moment vector of the Dirac measure at u: y_alpha = u^alpha for |alpha| <= order.
    """
    u = np.asarray(u, dtype=float)
    if order < 0:
        raise DegreeOverflowError(f"Lift order must be nonnegative, got {order}")
    return Tms(order, len(u), monomial_vector(u, order))


def pair(f, y):
    """
    <f, y> = sum_alpha f_alpha * y_alpha.

    Raises:
        DimensionError: If f and y live in different spaces
        DegreeOverflowError: If deg(f) exceeds the order of y
    """
    if f.nvars != y.nvars:
        raise DimensionError(f"Polynomial in {f.nvars} variables paired with a tms in {y.nvars}")
    if f.degree() > y.order:
        raise DegreeOverflowError(f"Polynomial of degree {f.degree()} exceeds tms order {y.order}")
    index = basis_index(y.nvars, y.order)
    return float(sum(coef * y.values[index[alpha]] for alpha, coef in f.terms.items()))


def restrict_rivals(p, i, u_minus_i):
    """
    Fix every block except block i to numeric values.

    Args:
        p: Polynomial over the full blocked variable
        i: Player index of the block that stays symbolic
        u_minus_i: Values of the rival blocks, concatenated in block order

    Returns:
        Polynomial in n_i variables

    Raises:
        DimensionError: If u_minus_i has the wrong length
    """
    layout = p.layout
    layout.check_player(i)
    rivals = layout.rival_variables(i)
    u_minus_i = np.asarray(u_minus_i, dtype=float).ravel()
    if len(u_minus_i) != len(rivals):
        raise DimensionError(f"Expected {len(rivals)} rival values for player {i}, got {len(u_minus_i)}")
    fixed = p.partial_evaluate(dict(zip(rivals, u_minus_i)))
    return fixed.select_variables(list(layout.block_variables(i)))


def block_polynomial(q, i, layout):
    """Embed a polynomial in block i's own variables into the full layout."""
    layout = BlockLayout(layout)
    if q.nvars != layout[i]:
        raise DimensionError(f"Block {i} has {layout[i]} variables, polynomial has {q.nvars}")
    return q.embed(list(layout.block_variables(i)), layout.nvars, layout)


def rival_values(layout, i, point):
    """u_{-i}: the point with block i removed."""
    point = np.asarray(point, dtype=float)
    return point[BlockLayout(layout).rival_variables(i)]


def replace_block(layout, point, i, block_value):
    """(v, u_{-i}): the point with block i replaced."""
    point = np.array(point, dtype=float)
    point[BlockLayout(layout).block_slice(i)] = block_value
    return point
