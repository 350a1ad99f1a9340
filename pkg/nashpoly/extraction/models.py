"""
Extraction models.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FlatReport:
    """
    Outcome of a flat truncation scan.

    When t is set, numeric_rank(M_t[y]) = numeric_rank(M_{t-d0}[y]) = rank.
    singular_values belong to the last truncation examined.
    """
    t: int = None
    rank: int = 0
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lower_singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rank_tol: float = 0.0
    ambiguous: bool = False

    @property
    def is_flat(self):
        return self.t is not None
