"""
Flat truncation and minimizer extraction from moment solutions.

extract_minimizers follows the classic moment-matrix procedure: factor
M_t[y] = V V^T, bring V to column echelon form over a greedy monomial basis,
read off one multiplication matrix per variable and diagonalize a random
combination of them with a real Schur form.
"""

import logging

import numpy as np
from scipy import linalg

from config import settings
from nashpoly.polycore import MultiIndex, basis_index, basis_size, monomial_basis, monomial_vector
from nashpoly.relaxations import moment_matrix

from .models import FlatReport

logger = logging.getLogger(__name__)

# Singular value test for the greedy basis
PIVOT_TOL = 1e-6

# Extracted points closer than this are the same atom
ATOM_SEPARATION = 1e-6


def singular_values(M):
    M = np.asarray(M, dtype=float)
    return linalg.svdvals((M + M.T) / 2)


def _rank_from_values(sv, rank_tol):
    if len(sv) == 0:
        return 0, False
    scale = max(float(sv[0]), 1.0)
    ratios = sv / scale
    rank = int(np.sum(ratios > rank_tol))
    ambiguous = bool(np.any((ratios > rank_tol / 10) & (ratios < rank_tol * 10)))
    return rank, ambiguous


def numeric_rank(M, rank_tol=None):
    """
    Number of singular values above rank_tol * max(sigma_1, 1).

    The matrix is symmetrized first.
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    rank, _ = _rank_from_values(singular_values(M), rank_tol)
    return rank


def flat_truncation(y, d0, k, rank_tol=None):
    """
    Scan t = d0, ..., k for the first flat truncation of y.

    A truncation whose singular values fall within a factor 10 of rank_tol
    is skipped instead of guessed.

    Args:
        y: Tms of order at least 2k
        d0: Rank gap between the two compared moment matrices
        k: Largest truncation order

    Returns:
        FlatReport; report.t is None when no order qualifies
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    k = min(k, y.order // 2)
    report = FlatReport(rank_tol=rank_tol)
    for t in range(d0, k + 1):
        upper = singular_values(moment_matrix(y, t))
        lower = singular_values(moment_matrix(y, t - d0))
        upper_rank, upper_ambiguous = _rank_from_values(upper, rank_tol)
        lower_rank, lower_ambiguous = _rank_from_values(lower, rank_tol)
        ambiguous = upper_ambiguous or lower_ambiguous
        if upper_rank == lower_rank and not ambiguous:
            logger.debug(f"Flat truncation at t = {t} with rank {upper_rank}")
            return FlatReport(t, upper_rank, upper, lower, rank_tol, False)
        report = FlatReport(None, upper_rank, upper, lower, rank_tol, ambiguous)
    return report


def _greedy_pivots(W, r):
    """First r columns of W (in monomial order) that are linearly independent."""
    scale = max(float(linalg.norm(W, 2)), 1.0)
    pivots = []
    for c in range(W.shape[1]):
        candidate = pivots + [c]
        smallest = linalg.svdvals(W[:, candidate])[-1]
        if smallest > PIVOT_TOL * scale:
            pivots = candidate
            if len(pivots) == r:
                break
    return pivots


def extract_minimizers(y, t, r, seed=0):
    """
    Extract the r atoms of a flat moment vector.

    Args:
        y: Tms with a flat truncation at order t of rank r
        t: Truncation order
        r: Rank of M_t[y]
        seed: Seed of the random combination of multiplication matrices

    Returns:
        List of r points sorted lexicographically, or None when the
        factorization or the simultaneous diagonalization fails
    """
    n = y.nvars
    if r < 1:
        return None
    M = moment_matrix(y, t)
    eigenvalues, eigenvectors = linalg.eigh((M + M.T) / 2)
    eigenvalues, eigenvectors = eigenvalues[::-1][:r], eigenvectors[:, ::-1][:, :r]
    if eigenvalues[-1] <= 0.0:
        logger.debug("Moment matrix has fewer positive eigenvalues than its numeric rank")
        return None
    V = eigenvectors * np.sqrt(eigenvalues)

    basis = monomial_basis(n, t)
    pivots = _greedy_pivots(V.T, r)
    if len(pivots) < r:
        logger.debug(f"Only {len(pivots)} of {r} independent monomials found")
        return None
    if any(basis[p].degree >= t for p in pivots):
        logger.debug("Extraction basis reaches the truncation degree")
        return None
    try:
        U = linalg.solve(V[pivots, :].T, V.T).T
    except linalg.LinAlgError:
        return None

    index = basis_index(n, t)
    multiplication = []
    for var in range(n):
        unit = [0] * n
        unit[var] = 1
        shifted = [index[basis[p] + MultiIndex(unit)] for p in pivots]
        multiplication.append(U[shifted, :])

    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.0, 1.0, size=n)
    weights /= weights.sum()
    combined = sum(w * N for w, N in zip(weights, multiplication))
    T, Q = linalg.schur(combined, output='real')
    if r > 1 and np.max(np.abs(np.diag(T, -1))) > 1e-6 * max(1.0, np.max(np.abs(T))):
        logger.debug("Combined multiplication matrix has complex eigenvalues")
        return None

    points = np.array([[Q[:, j] @ N @ Q[:, j] for N in multiplication] for j in range(r)])
    for a in range(r):
        for b in range(a + 1, r):
            if np.max(np.abs(points[a] - points[b])) < ATOM_SEPARATION:
                logger.debug("Extraction produced repeated atoms")
                return None
    order = np.lexsort(points.T[::-1])
    return [points[j] for j in order]


def _relift_matrix(points, order):
    return np.column_stack([monomial_vector(x, order) for x in points])


def mixture_weights(points, y, t):
    """
    Least-squares weights w with sum_j w_j [x_j]_{2t} closest to y's degree <= 2t part.
    """
    A = _relift_matrix(points, 2 * t)
    target = y.values[:basis_size(y.nvars, 2 * t)]
    weights, *_ = linalg.lstsq(A, target)
    return weights


def relift_residual(points, y, t, weights=None):
    """max_alpha |y_alpha - sum_j w_j x_j^alpha| over |alpha| <= 2t."""
    if weights is None:
        weights = mixture_weights(points, y, t)
    A = _relift_matrix(points, 2 * t)
    target = y.values[:basis_size(y.nvars, 2 * t)]
    return float(np.max(np.abs(A @ weights - target)))


def _system_residual(equations, x):
    if not equations:
        return 0.0
    return float(np.max(np.abs([p.evaluate(x) for p in equations])))


def refine_points(points, equations, max_steps=20, tol=1e-14):
    """
    Gauss-Newton polish of points against equations p(x) = 0.

    A refined point replaces the original only when it lowers the residual.
    """
    if not equations:
        return [np.asarray(x, dtype=float) for x in points]
    nvars = equations[0].nvars
    jacobian = [[p.diff(v) for v in range(nvars)] for p in equations]
    refined = []
    for x in points:
        x = np.asarray(x, dtype=float)
        best, best_residual = x, _system_residual(equations, x)
        current = x.copy()
        for _ in range(max_steps):
            F = np.array([p.evaluate(current) for p in equations])
            if np.max(np.abs(F)) <= tol:
                break
            J = np.array([[d.evaluate(current) for d in row] for row in jacobian])
            step, *_ = linalg.lstsq(J, -F)
            current = current + step
            residual = _system_residual(equations, current)
            if residual < best_residual:
                best, best_residual = current.copy(), residual
            if not np.isfinite(residual):
                break
        refined.append(best)
    return refined
