"""
Relaxation models: the polynomial problem to relax and its conic form.
"""

from dataclasses import dataclass, field

import numpy as np

from nashpoly.exceptions import NashpolyError
from nashpoly.polycore import DimensionError


class RelaxationOrderError(NashpolyError):
    """Raised when a relaxation order is below the minimum order d0."""
    pass


@dataclass(frozen=True)
class RelaxationSpec:
    """
    min <objective, y> over the moment relaxation of order k of

        {x : p(x) = 0 for p in phi, q(x) >= 0 for q in psi}.

    d0 is the largest half-degree among phi, psi and the objective.
    """
    objective: object
    phi: tuple = ()
    psi: tuple = ()
    order: int = None
    d0: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'phi', tuple(self.phi))
        object.__setattr__(self, 'psi', tuple(self.psi))
        nvars = self.objective.nvars
        for p in self.phi + self.psi:
            if p.nvars != nvars:
                raise DimensionError(f"Relaxation polynomial in {p.nvars} variables, objective has {nvars}")
        d0 = max([1, self.objective.half_degree()] + [p.half_degree() for p in self.phi + self.psi])
        object.__setattr__(self, 'd0', d0)
        if self.order is None:
            object.__setattr__(self, 'order', d0)
        if self.order < d0:
            raise RelaxationOrderError(f"Relaxation order {self.order} is below the minimum order {d0}")

    @property
    def nvars(self):
        return self.objective.nvars

    def at_order(self, k):
        return RelaxationSpec(objective=self.objective, phi=self.phi, psi=self.psi, order=k)


@dataclass(frozen=True)
class PsdBlock:
    """
    A linear matrix function of y required to be PSD.

    matrix has shape (size * size, m); the block at y is
    (matrix @ y).reshape(size, size).
    """
    name: str
    size: int
    matrix: object

    def at(self, y):
        return np.asarray(self.matrix @ np.asarray(y, dtype=float)).reshape(self.size, self.size)

    def functional(self, r, c):
        """Coefficient vector of entry (r, c)."""
        return self.matrix.getrow(r * self.size + c)


@dataclass(frozen=True)
class SdpProblem:
    """
    Conic form of a moment relaxation:

        minimize  objective @ y
        s.t.      equalities @ y = rhs
                  block(y) PSD for every block
    """
    nvars: int
    order: int
    objective: np.ndarray
    equalities: object
    rhs: np.ndarray
    blocks: tuple

    @property
    def dimension(self):
        return len(self.objective)

    @property
    def block_sizes(self):
        return [block.size for block in self.blocks]

    def equality_residual(self, y):
        return float(np.max(np.abs(self.equalities @ y - self.rhs), initial=0.0))

    def min_block_eigenvalue(self, y):
        return min(
            (float(np.linalg.eigvalsh((b.at(y) + b.at(y).T) / 2)[0]) for b in self.blocks),
            default=0.0,
        )

    def is_feasible(self, y, tol=1e-8):
        """Whether y satisfies every equality and PSD block up to tol."""
        return self.equality_residual(y) <= tol and self.min_block_eigenvalue(y) >= -tol
