"""
Embedded conic back-end: a dense homogeneous self-dual interior point method.

The linear equalities of an SdpProblem are eliminated first, y = y_p + N z,
with N an orthonormal basis of their null space. The PSD blocks then read
F(y) = C + sum_i z_i G_i, which is the dual of the standard pair

    (P)  min <C, X>   s.t. <A_i, X> = b_i, X PSD
    (D)  max b^T w    s.t. C - sum_i w_i A_i = S PSD

with A_i = -G_i, b = -N^T c and w = z. The moment value is c^T y_p - b^T w
and <C, X> gives the dual (sum of squares) bound c^T y_p - <C, X>.
"""

import logging

import numpy as np
from scipy import linalg, sparse

from nashpoly.polycore import Tms

from .models import MalformedProblemError, SdpSolution, SolverStatus, SolverTolerances

logger = logging.getLogger(__name__)

STEP_FRACTION = 0.95
EQUALITY_RANK_TOL = 1e-10
STALL_STEP = 1e-9
STALL_LIMIT = 5
SYMMETRY_TOL = 1e-8


def validate_problem(problem):
    """
    Reject structurally malformed problems before any factorization.

    Raises:
        MalformedProblemError: On shape mismatches, asymmetric blocks or
            non-finite data
    """
    m = len(problem.objective)
    if m == 0:
        raise MalformedProblemError("Problem has no moment variables")
    if not np.all(np.isfinite(problem.objective)):
        raise MalformedProblemError("Objective has non-finite entries")
    if problem.equalities.shape != (len(problem.rhs), m):
        raise MalformedProblemError(
            f"Equality matrix has shape {problem.equalities.shape}, expected {(len(problem.rhs), m)}"
        )
    if not problem.blocks:
        raise MalformedProblemError("Problem has no PSD blocks")
    for block in problem.blocks:
        if block.matrix.shape != (block.size * block.size, m):
            raise MalformedProblemError(
                f"Block '{block.name}' has shape {block.matrix.shape}, expected {(block.size ** 2, m)}"
            )
        matrix = sparse.csr_matrix(block.matrix)
        if not np.all(np.isfinite(matrix.data)):
            raise MalformedProblemError(f"Block '{block.name}' has non-finite entries")
        size = block.size
        transposed = np.arange(size * size).reshape(size, size).T.ravel()
        asymmetry = abs(matrix[transposed, :] - matrix)
        if asymmetry.nnz and asymmetry.max() > SYMMETRY_TOL * max(1.0, abs(matrix).max()):
            raise MalformedProblemError(f"Block '{block.name}' is not symmetric")


def _sym(M):
    return (M + M.T) / 2


class EmbeddedSolver:
    """
    Homogeneous self-dual interior point solver with the HKM direction and a
    predictor-corrector choice of the centering parameter.
    """

    name = 'embedded'

    def __init__(self, tolerances=None):
        self.tolerances = tolerances or SolverTolerances()

    def solve(self, problem):
        """
        Solve an SdpProblem.

        Returns:
            SdpSolution; infeasibility statuses carry a certificate
        """
        validate_problem(problem)
        tol = self.tolerances
        c = np.asarray(problem.objective, dtype=float)
        Aeq = problem.equalities.toarray()
        rhs = np.asarray(problem.rhs, dtype=float)

        # Equality elimination; Vt must span R^m, U only the row space
        U, s, Vt = linalg.svd(Aeq, full_matrices=Aeq.shape[0] < Aeq.shape[1])
        rank = int(np.sum(s > EQUALITY_RANK_TOL * max(s[0], 1.0))) if s.size else 0
        y_p = Vt[:rank].T @ ((U[:, :rank].T @ rhs) / s[:rank])
        residual = rhs - Aeq @ y_p
        if np.linalg.norm(residual) > tol.feas_tol * (1.0 + np.linalg.norm(rhs)):
            certificate = residual / np.linalg.norm(residual)
            logger.debug("Equality constraints are inconsistent")
            return SdpSolution(
                status=SolverStatus.PRIMAL_INFEASIBLE,
                certificate={'equalities': certificate},
                primal_residual=float(np.linalg.norm(Aeq.T @ certificate)),
                backend=self.name,
                message='linear equalities are inconsistent',
            )
        N = Vt[rank:].T

        C, A = [], []
        for block in problem.blocks:
            size = block.size
            C.append(_sym(np.asarray(block.matrix @ y_p).reshape(size, size)))
            G = np.asarray(block.matrix @ N)
            A.append(-G.T.reshape(N.shape[1], size, size))
        base = float(c @ y_p)

        if N.shape[1] == 0:
            return self._fixed_point(problem, y_p, C, base)

        b = -(N.T @ c)
        return self._interior_point(problem, C, A, b, y_p, N, base)

    def _fixed_point(self, problem, y, C, base):
        """The equalities pin y down; only PSD-ness is left to check."""
        tol = self.tolerances
        worst, vector = 0.0, None
        for Cj in C:
            values, vectors = np.linalg.eigh(Cj)
            if values[0] < worst:
                worst, vector = float(values[0]), vectors[:, 0]
        if worst < -tol.feas_tol:
            return SdpSolution(
                status=SolverStatus.PRIMAL_INFEASIBLE,
                certificate={'eigenvector': vector},
                primal_residual=-worst,
                backend=self.name,
                message='unique point of the equalities is not PSD',
            )
        return SdpSolution(
            status=SolverStatus.OPTIMAL,
            y=Tms(problem.order, problem.nvars, y),
            objective=base,
            dual_objective=base,
            primal_residual=max(0.0, -worst),
            dual_residual=0.0,
            gap=0.0,
            backend=self.name,
        )

    def _interior_point(self, problem, C_raw, A, b_raw, y_p, N, base):
        tol = self.tolerances
        r = len(b_raw)
        sizes = [Cj.shape[0] for Cj in C_raw]
        nu = sum(sizes)
        A_flat = [Aj.reshape(r, -1) for Aj in A]

        c_norm = np.sqrt(sum(np.sum(Cj * Cj) for Cj in C_raw))
        c_scale = max(1.0, c_norm)
        b_scale = max(1.0, float(np.linalg.norm(b_raw)))
        C = [Cj / c_scale for Cj in C_raw]
        b = b_raw / b_scale
        C_norm = c_norm / c_scale
        b_norm = float(np.linalg.norm(b))

        def A_op(Xs):
            return sum(Af @ Xj.ravel() for Af, Xj in zip(A_flat, Xs))

        def At_op(w):
            return [np.tensordot(w, Aj, axes=1) for Aj in A]

        def inner(Us, Vs):
            return float(sum(np.vdot(Uj, Vj) for Uj, Vj in zip(Us, Vs)))

        X = [np.eye(s) for s in sizes]
        S = [np.eye(s) for s in sizes]
        w = np.zeros(r)
        tau, kappa = 1.0, 1.0
        status = None
        stalls = 0
        it = 0
        pres = dres = gap = float('inf')

        for it in range(tol.max_iters + 1):
            AX = A_op(X)
            Atw = At_op(w)
            rp = AX - b * tau
            rd = [Aw + Sj - Cj * tau for Aw, Sj, Cj in zip(Atw, S, C)]
            cx = inner(C, X)
            bw = float(b @ w)
            rg = cx - bw + kappa
            mu = (inner(X, S) + tau * kappa) / (nu + 1)

            pres = float(np.linalg.norm(rp)) / tau / (1.0 + b_norm)
            dres = np.sqrt(sum(np.sum(R * R) for R in rd)) / tau / (1.0 + C_norm)
            pobj, dobj = cx / tau, bw / tau
            gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

            if pres <= tol.feas_tol and dres <= tol.feas_tol and gap <= tol.gap_tol:
                status = SolverStatus.OPTIMAL
                break
            if cx < 0 and np.linalg.norm(AX) <= tol.feas_tol * -cx:
                status = SolverStatus.PRIMAL_INFEASIBLE
                break
            if bw > 0:
                ray = np.sqrt(sum(np.sum((Aw + Sj) ** 2) for Aw, Sj in zip(Atw, S)))
                if ray <= tol.feas_tol * bw:
                    status = SolverStatus.DUAL_INFEASIBLE
                    break
            if it == tol.max_iters:
                status = SolverStatus.ITERATION_LIMIT
                break

            try:
                step = self._step(C, A, A_flat, b, X, S, w, tau, kappa, rp, rd, rg, mu, A_op, At_op, inner)
            except (linalg.LinAlgError, np.linalg.LinAlgError) as exc:
                logger.debug(f"Factorization failed at iteration {it}: {exc}")
                status = SolverStatus.INACCURATE
                break
            X, S, w, tau, kappa, alpha = step
            stalls = stalls + 1 if alpha < STALL_STEP else 0
            if stalls >= STALL_LIMIT:
                status = SolverStatus.INACCURATE
                break

        logger.debug(
            f"Embedded solve finished: {status.value} after {it} iterations "
            f"(pres={pres:.2e}, dres={dres:.2e}, gap={gap:.2e})"
        )

        if status == SolverStatus.PRIMAL_INFEASIBLE:
            return SdpSolution(
                status=status,
                certificate={'ray': [Xj / -cx for Xj in X]},
                primal_residual=float(np.linalg.norm(A_op(X)) / -cx),
                iterations=it,
                backend=self.name,
                message='moment relaxation is infeasible',
            )
        if status == SolverStatus.DUAL_INFEASIBLE:
            return SdpSolution(
                status=status,
                certificate={'direction': N @ (w / bw)},
                dual_residual=float(ray / bw),
                iterations=it,
                backend=self.name,
                message='moment relaxation is unbounded below',
            )

        z = (w / tau) * c_scale
        y = y_p + N @ z
        objective = base - float(b_raw @ z)
        dual_objective = base - c_scale * b_scale * cx / tau
        return SdpSolution(
            status=status,
            y=Tms(problem.order, problem.nvars, y),
            objective=objective,
            dual_objective=dual_objective,
            primal_residual=float(dres),
            dual_residual=float(pres),
            gap=float(gap),
            iterations=it,
            backend=self.name,
        )

    def _step(self, C, A, A_flat, b, X, S, w, tau, kappa, rp, rd, rg, mu, A_op, At_op, inner):
        """One predictor-corrector step. Returns the new iterate and step length."""
        r = len(b)
        S_inv = []
        for Sj in S:
            factor = linalg.cho_factor(Sj, lower=True)
            S_inv.append(_sym(linalg.cho_solve(factor, np.eye(Sj.shape[0]))))

        def W(Ms):
            return [_sym(Xj @ Mj @ Si) for Xj, Mj, Si in zip(X, Ms, S_inv)]

        M = np.zeros((r, r))
        for Af, Aj, Xj, Si in zip(A_flat, A, X, S_inv):
            P = np.matmul(np.matmul(Xj, Aj), Si)
            M += Af @ P.reshape(r, -1).T
        M = _sym(M)
        factor = linalg.cho_factor(M, lower=True)

        WC = W(C)
        u = A_op(WC)
        alpha_c = inner(C, WC)
        q = linalg.cho_solve(factor, u + b)
        denominator = float((u - b) @ q) - alpha_c - kappa / tau
        Wrd = W(rd)

        def direction(sigma):
            eta = 1.0 - sigma
            R = [sigma * mu * Si - Xj + eta * Wr for Si, Xj, Wr in zip(S_inv, X, Wrd)]
            rhs1 = -eta * rp - A_op(R)
            rhs2 = -eta * rg - inner(C, R) - (sigma * mu - tau * kappa) / tau
            p = linalg.cho_solve(factor, rhs1)
            dtau = (rhs2 - float((u - b) @ p)) / denominator
            dw = p + q * dtau
            Atdw = At_op(dw)
            dS = [-eta * rdj - Ad + Cj * dtau for rdj, Ad, Cj in zip(rd, Atdw, C)]
            dX = [Rj + WA - dtau * WCj for Rj, WA, WCj in zip(R, W(Atdw), WC)]
            dkappa = (sigma * mu - tau * kappa - kappa * dtau) / tau
            return dX, dS, dw, dtau, dkappa

        def max_step(dX, dS, dtau, dkappa):
            limit = np.inf
            for Ms, dMs in ((X, dX), (S, dS)):
                for Mj, dMj in zip(Ms, dMs):
                    L = linalg.cholesky(Mj, lower=True)
                    Z = linalg.solve_triangular(L, dMj, lower=True)
                    Z = linalg.solve_triangular(L, Z.T, lower=True)
                    smallest = linalg.eigvalsh(_sym(Z))[0]
                    if smallest < 0:
                        limit = min(limit, -1.0 / smallest)
            for value, delta in ((tau, dtau), (kappa, dkappa)):
                if delta < 0:
                    limit = min(limit, -value / delta)
            return limit

        nu = sum(Xj.shape[0] for Xj in X)
        dX, dS, dw, dtau, dkappa = direction(0.0)
        a = min(1.0, max_step(dX, dS, dtau, dkappa))
        mu_aff = (
            inner([Xj + a * d for Xj, d in zip(X, dX)], [Sj + a * d for Sj, d in zip(S, dS)])
            + (tau + a * dtau) * (kappa + a * dkappa)
        ) / (nu + 1)
        sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0))

        dX, dS, dw, dtau, dkappa = direction(sigma)
        a = min(1.0, STEP_FRACTION * max_step(dX, dS, dtau, dkappa))
        X = [_sym(Xj + a * d) for Xj, d in zip(X, dX)]
        S = [_sym(Sj + a * d) for Sj, d in zip(S, dS)]
        return X, S, w + a * dw, tau + a * dtau, kappa + a * dkappa, a
