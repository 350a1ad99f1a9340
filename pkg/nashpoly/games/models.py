"""
Game models: constraint families, players, games and KKT systems.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

from nashpoly.exceptions import NashpolyError
from nashpoly.polycore import BlockLayout, Polynomial


class FamilyError(NashpolyError):
    """Raised when a constraint family does not fit a player's constraints."""
    pass


class MultiplierError(NashpolyError):
    """Raised when multiplier expressions are missing or wrong."""
    pass


class LocalityError(NashpolyError):
    """Raised when a player's constraint depends on a rival block."""
    pass


class FamilyKind(str, Enum):
    """Constraint families with known multiplier expressions."""
    BALL = 'ball', 'Ball (1 - x^T x >= 0)'
    SPHERE = 'sphere', 'Sphere (1 - x^T x = 0)'
    SIMPLEX = 'simplex', 'Simplex (1 - sum x >= 0, x >= 0)'
    BOX = 'box', 'Box (a <= x <= b)'
    UNCONSTRAINED = 'unconstrained', 'Unconstrained'
    CUSTOM = 'custom', 'Custom multipliers'

    def __new__(cls, value, label):
        member = str.__new__(cls, value)
        member._value_ = value
        member.label = label
        return member


@dataclass(frozen=True)
class ConstraintFamily:
    """
    Family tag of a player's constraint tuple.

    Box bounds are tuples with None for a missing side. Custom multipliers
    are polynomials over the full variable x, one per constraint.
    """
    kind: FamilyKind
    lower: tuple = None
    upper: tuple = None
    multipliers: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', FamilyKind(self.kind))
        if self.kind == FamilyKind.BOX:
            if self.lower is None and self.upper is None:
                raise FamilyError("Box family needs lower or upper bounds")
        if self.multipliers is not None:
            object.__setattr__(self, 'multipliers', tuple(self.multipliers))

    @classmethod
    def ball(cls):
        return cls(FamilyKind.BALL)

    @classmethod
    def sphere(cls):
        return cls(FamilyKind.SPHERE)

    @classmethod
    def simplex(cls):
        return cls(FamilyKind.SIMPLEX)

    @classmethod
    def unconstrained(cls):
        return cls(FamilyKind.UNCONSTRAINED)

    @classmethod
    def box(cls, lower=None, upper=None):
        return cls(
            FamilyKind.BOX,
            lower=tuple(lower) if lower is not None else None,
            upper=tuple(upper) if upper is not None else None,
        )

    @classmethod
    def custom(cls, multipliers):
        return cls(FamilyKind.CUSTOM, multipliers=tuple(multipliers))

    def bound(self, side, j):
        values = self.lower if side == 'lower' else self.upper
        if values is None:
            return None
        value = values[j]
        return None if value is None else float(value)


@dataclass(frozen=True)
class PlayerProblem:
    """
    One player's optimization: minimize objective over its own block.

    Constraints are polynomials in the player's own n_i variables, listed in
    the order the multipliers refer to them.
    """
    index: int
    width: int
    objective: Polynomial
    constraints: tuple = ()
    equality_indices: tuple = ()
    family: ConstraintFamily = field(default_factory=ConstraintFamily.unconstrained)
    inequality_indices: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'constraints', tuple(self.constraints))
        equalities = tuple(sorted(set(self.equality_indices)))
        object.__setattr__(self, 'equality_indices', equalities)
        if self.inequality_indices is None:
            inequalities = tuple(j for j in range(len(self.constraints)) if j not in equalities)
        else:
            inequalities = tuple(sorted(set(self.inequality_indices)))
        object.__setattr__(self, 'inequality_indices', inequalities)

        overlap = set(equalities) & set(inequalities)
        if overlap:
            raise FamilyError(f"Player {self.index + 1}: constraints {sorted(overlap)} are both equality and inequality")
        if set(equalities) | set(inequalities) != set(range(len(self.constraints))):
            raise FamilyError(f"Player {self.index + 1}: equality and inequality indices must cover every constraint")
        for j, g in enumerate(self.constraints):
            if g.nvars != self.width:
                raise LocalityError(
                    f"Player {self.index + 1}: constraint {j} has {g.nvars} variables, block has {self.width}"
                )

    @property
    def m(self):
        return len(self.constraints)

    @property
    def layout(self):
        return self.objective.layout

    def is_equality(self, j):
        return j in self.equality_indices


@dataclass(frozen=True)
class NepProblem:
    """A Nash equilibrium problem of polynomials."""
    players: tuple
    name: str = ''

    def __post_init__(self):
        players = tuple(self.players)
        if not players:
            raise FamilyError("A game needs at least one player")
        layout = BlockLayout([p.width for p in players])
        normalized = []
        for i, player in enumerate(players):
            if player.index != i:
                raise FamilyError(f"Player at position {i} has index {player.index}")
            if player.objective.nvars != layout.nvars:
                raise FamilyError(
                    f"Player {i + 1} objective has {player.objective.nvars} variables, game has {layout.nvars}"
                )
            objective = Polynomial(player.objective.terms, layout.nvars, layout)
            family = player.family
            if family.multipliers is not None:
                family = replace(family, multipliers=tuple(
                    Polynomial(lam.terms, layout.nvars, layout) for lam in family.multipliers
                ))
            normalized.append(replace(player, objective=objective, family=family))
        object.__setattr__(self, 'players', tuple(normalized))

    @property
    def layout(self):
        return BlockLayout([p.width for p in self.players])

    @property
    def n(self):
        return self.layout.nvars

    @property
    def nplayers(self):
        return len(self.players)

    @property
    def objectives(self):
        return [p.objective for p in self.players]

    def player(self, i):
        self.layout.check_player(i)
        return self.players[i]


@dataclass(frozen=True)
class KktSystem:
    """
    The KKT polynomial sets of a game.

    phi holds equalities, psi inequalities (q >= 0). cuts[i] lists the points
    v in K_i whose cut inequalities f_i(v, x_-i) - f_i(x) >= 0 are in psi.
    """
    phi: tuple
    psi: tuple
    lambda_exprs: tuple
    layout: BlockLayout
    cuts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'phi', tuple(self.phi))
        object.__setattr__(self, 'psi', tuple(self.psi))
        if not self.cuts:
            object.__setattr__(self, 'cuts', tuple(() for _ in self.layout))
        nvars = self.layout.nvars
        for p in self.phi + self.psi:
            if p.nvars != nvars:
                raise FamilyError(f"KKT polynomial in {p.nvars} variables, expected {nvars}")

    @property
    def n(self):
        return self.layout.nvars

    def cut_sizes(self):
        return [len(k) for k in self.cuts]

    def max_violation(self, point):
        """Largest violation of phi = 0 and psi >= 0 at a point."""
        worst = 0.0
        for p in self.phi:
            worst = max(worst, abs(p.evaluate(point)))
        for q in self.psi:
            worst = max(worst, -q.evaluate(point))
        return worst


@dataclass(frozen=True)
class MultiplierCheck:
    """Outcome of the numerical check of custom multiplier expressions."""
    player: int
    points_checked: int
    max_error: float
    passed: bool
