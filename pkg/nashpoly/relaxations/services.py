"""
Moment relaxation services.

Builds moment and localizing matrices and assembles the order-k moment
relaxation of a polynomial problem as an SdpProblem.
"""

import logging

import numpy as np
from scipy import sparse

from nashpoly.polycore import (
    DegreeOverflowError,
    Polynomial,
    basis_index,
    basis_size,
    monomial_basis,
)

from .models import PsdBlock, RelaxationOrderError, SdpProblem

logger = logging.getLogger(__name__)

# Lower bound on the spectrum of the random objective matrix
THETA_SHIFT = 1e-6


def localizing_template(q, nvars, t, order):
    """
    Sparse map y -> vec(L_q[y]) for a localizing matrix of side C(nvars + t, t).

    Args:
        q: Localizing polynomial (q = 1 gives the moment matrix)
        nvars: Number of variables
        t: Half order of the monomial vector [z]_t
        order: Order of the tms the template acts on

    Returns:
        (size, csr matrix of shape (size * size, basis_size(nvars, order)))
    """
    if 2 * t + q.degree() > order:
        raise DegreeOverflowError(f"Localizing matrix of degree {2 * t + q.degree()} exceeds order {order}")
    basis = monomial_basis(nvars, t)
    index = basis_index(nvars, order)
    size = len(basis)
    terms = list(q.terms.items())
    rows, cols, data = [], [], []
    for r in range(size):
        for c in range(r, size):
            shift = basis[r] + basis[c]
            for gamma, coef in terms:
                pos = index[gamma + shift]
                rows.append(r * size + c)
                cols.append(pos)
                data.append(coef)
                if r != c:
                    rows.append(c * size + r)
                    cols.append(pos)
                    data.append(coef)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=(size * size, basis_size(nvars, order)))
    return size, matrix


def localizing_matrix(q, y, k):
    """
    L_q^(k)[y] = sum_alpha y_alpha Q_alpha with q [z]_t [z]_t^T = sum z^alpha Q_alpha.

    The side is C(n + t, t) with t = k - ceil(deg(q) / 2).

    Raises:
        DegreeOverflowError: If 2k exceeds the tms order
    """
    if 2 * k > y.order:
        raise DegreeOverflowError(f"Localizing order 2k = {2 * k} exceeds tms order {y.order}")
    t = k - q.half_degree()
    if t < 0:
        raise DegreeOverflowError(f"Polynomial of degree {q.degree()} needs order at least {q.half_degree()}")
    size, matrix = localizing_template(q, y.nvars, t, y.order)
    return np.asarray(matrix @ y.values).reshape(size, size)


def moment_matrix(y, d):
    """M_d[y], with entry (alpha, beta) equal to y_{alpha + beta}."""
    if 2 * d > y.order:
        raise DegreeOverflowError(f"Moment matrix of order {d} needs a tms of order {2 * d}, got {y.order}")
    basis = monomial_basis(y.nvars, d)
    index = basis_index(y.nvars, y.order)
    positions = np.array([[index[a + b] for b in basis] for a in basis], dtype=int)
    return y.values[positions]


def gen_theta(seed, n):
    """
    Random positive definite matrix Theta = R^T R + 1e-6 I of side n + 1.

    R has entries uniform in [-1, 1] drawn from a generator seeded with seed.
    """
    rng = np.random.default_rng(seed)
    R = rng.uniform(-1.0, 1.0, size=(n + 1, n + 1))
    return R.T @ R + THETA_SHIFT * np.eye(n + 1)


def theta_polynomial(theta, layout):
    """[x]_1^T Theta [x]_1 as a polynomial over the given block layout."""
    nvars = layout.nvars
    monomials = [Polynomial.constant(1.0, nvars, layout)] + Polynomial.variables(nvars, layout)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (nvars + 1, nvars + 1):
        raise RelaxationOrderError(f"Theta must be {(nvars + 1, nvars + 1)}, got {theta.shape}")
    result = Polynomial.zero(nvars, layout)
    for a in range(nvars + 1):
        for b in range(nvars + 1):
            if theta[a, b] != 0.0:
                result = result + theta[a, b] * monomials[a] * monomials[b]
    return result


def theta_value(theta, point):
    v = np.concatenate(([1.0], np.asarray(point, dtype=float)))
    return float(v @ np.asarray(theta) @ v)


def _equality_rows(phi, nvars, k, index):
    """Rows <p z^beta, y> = 0 for p in phi, |beta| <= 2(k - ceil(deg p / 2)), without duplicates."""
    seen = set()
    rows = []
    for p in phi:
        if p.is_zero():
            continue
        t = k - p.half_degree()
        terms = list(p.terms.items())
        for beta in monomial_basis(nvars, 2 * t):
            row = {}
            for gamma, coef in terms:
                pos = index[gamma + beta]
                row[pos] = row.get(pos, 0.0) + coef
            row = {pos: coef for pos, coef in row.items() if coef != 0.0}
            if not row:
                continue
            lead = row[min(row)]
            key = tuple((pos, round(coef / lead, 12)) for pos, coef in sorted(row.items()))
            if key in seen:
                continue
            seen.add(key)
            rows.append(row)
    return rows


def assemble_relaxation(spec):
    """
    Assemble the order-k moment relaxation

        min <theta, y>  s.t.  y_0 = 1,  L_p^(k)[y] = 0 (p in phi),
                              M_k[y] PSD,  L_q^(k)[y] PSD (q in psi).

    Args:
        spec: RelaxationSpec with order k >= d0

    Returns:
        SdpProblem over y indexed by monomial_basis(n, 2k)
    """
    k, nvars = spec.order, spec.nvars
    if k < spec.d0:
        raise RelaxationOrderError(f"Relaxation order {k} is below the minimum order {spec.d0}")
    order = 2 * k
    m = basis_size(nvars, order)
    index = basis_index(nvars, order)

    objective = np.zeros(m)
    for alpha, coef in spec.objective.terms.items():
        objective[index[alpha]] += coef

    rows = [{0: 1.0}] + _equality_rows(spec.phi, nvars, k, index)
    rhs = np.zeros(len(rows))
    rhs[0] = 1.0
    row_ids, col_ids, data = [], [], []
    for r, row in enumerate(rows):
        for pos, coef in row.items():
            row_ids.append(r)
            col_ids.append(pos)
            data.append(coef)
    equalities = sparse.csr_matrix((data, (row_ids, col_ids)), shape=(len(rows), m))

    one = Polynomial.constant(1.0, nvars)
    size, matrix = localizing_template(one, nvars, k, order)
    blocks = [PsdBlock(name='moment', size=size, matrix=matrix)]
    for j, q in enumerate(spec.psi):
        if q.is_zero():
            continue
        size, matrix = localizing_template(q, nvars, k - q.half_degree(), order)
        blocks.append(PsdBlock(name=f'localizing[{j}]', size=size, matrix=matrix))

    logger.debug(
        f"Order {k} relaxation: {m} moments, {len(rows)} equalities, "
        f"blocks {[b.size for b in blocks]}"
    )
    return SdpProblem(
        nvars=nvars,
        order=order,
        objective=objective,
        equalities=equalities,
        rhs=rhs,
        blocks=tuple(blocks),
    )
