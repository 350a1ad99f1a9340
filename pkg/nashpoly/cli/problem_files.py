"""
JSON problem files.

    {
      "version": 1,
      "name": "ball_duel",
      "players": [
        {
          "n": 2,
          "objective": [[coefficient, [exponents over all n variables]], ...],
          "family": {"kind": "ball"},
          "constraints": [{"kind": "inequality", "terms": [...]}, ...]
        },
        ...
      ],
      "options": {"seed": 7}
    }

Constraints are written over the full variable layout and must only involve
the player's own block. Players of a built-in family may omit them.
"""

import json
from dataclasses import dataclass, field

from nashpoly.exceptions import NashpolyError
from nashpoly.games import (
    ConstraintFamily,
    FamilyError,
    FamilyKind,
    LocalityError,
    NepProblem,
    PlayerProblem,
    canonical_constraints,
    check_family_shape,
    validate_multipliers,
)
from nashpoly.polycore import BlockLayout, DimensionError, Polynomial, block_polynomial

FORMAT_VERSION = 1

OPTION_TYPES = {
    'seed': int,
    'k_max': int,
    'check_extra_orders': int,
    'delta_init': float,
    'delta_shrink': float,
    'omega_tol': float,
    'feas_check_tol': float,
    'max_outer_loops': int,
    'rank_tol': float,
    'convex': bool,
    'workers': int,
}


class ProblemFileError(NashpolyError):
    """Raised for unreadable or invalid problem files; carries the position when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ProblemFile:
    nep: NepProblem
    options: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION


def _polynomial(records, nvars, layout, where):
    if not isinstance(records, list):
        raise ProblemFileError(f"{where}: expected a list of [coefficient, exponents] terms")
    try:
        for record in records:
            coef, exps = record
            if len(exps) != nvars:
                raise ProblemFileError(f"{where}: exponent vector {exps} needs {nvars} entries")
        return Polynomial.from_records(records, nvars, layout)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{where}: malformed term list ({exc})") from exc
    except DimensionError as exc:
        raise ProblemFileError(f"{where}: {exc}") from exc


def _local(poly, i, layout, where):
    """Restrict a full-layout constraint to player i's own variables."""
    own = list(layout.block_variables(i))
    if poly.support_variables() - set(own):
        raise LocalityError(f"{where}: constraint depends on rival block")
    return poly.select_variables(own)


def _family(data, width, layout, where):
    if not isinstance(data, dict) or 'kind' not in data:
        raise ProblemFileError(f"{where}: family must be an object with a 'kind'")
    try:
        kind = FamilyKind(data['kind'])
    except ValueError:
        raise FamilyError(
            f"{where}: unknown family '{data['kind']}'. Known: {', '.join(k.value for k in FamilyKind)}"
        ) from None
    if kind == FamilyKind.BOX:
        return ConstraintFamily.box(lower=data.get('lower'), upper=data.get('upper'))
    if kind == FamilyKind.CUSTOM:
        multipliers = data.get('multipliers')
        if not isinstance(multipliers, list):
            raise ProblemFileError(f"{where}: custom family needs a 'multipliers' list")
        return ConstraintFamily.custom([
            _polynomial(terms, layout.nvars, layout, f"{where} multiplier {j + 1}")
            for j, terms in enumerate(multipliers)
        ])
    return ConstraintFamily(kind)


def _player(i, data, layout):
    where = f"player {i + 1}"
    if not isinstance(data, dict):
        raise ProblemFileError(f"{where}: expected an object")
    width = layout[i]
    objective = _polynomial(data.get('objective', []), layout.nvars, layout, f"{where} objective")
    family = _family(data.get('family', {'kind': 'unconstrained'}), width, layout, where)

    if 'constraints' in data:
        constraints, equalities, inequalities = [], [], []
        for j, item in enumerate(data['constraints']):
            if not isinstance(item, dict) or item.get('kind') not in ('equality', 'inequality'):
                raise ProblemFileError(f"{where} constraint {j + 1}: kind must be 'equality' or 'inequality'")
            poly = _polynomial(item.get('terms', []), layout.nvars, layout, f"{where} constraint {j + 1}")
            constraints.append(_local(poly, i, layout, f"{where} constraint {j + 1}"))
            (equalities if item['kind'] == 'equality' else inequalities).append(j)
    elif family.kind == FamilyKind.CUSTOM:
        raise ProblemFileError(f"{where}: custom family needs explicit constraints")
    else:
        constraints, equalities = canonical_constraints(family, width)
        inequalities = None

    player = PlayerProblem(
        index=i,
        width=width,
        objective=objective,
        constraints=tuple(constraints),
        equality_indices=tuple(equalities),
        inequality_indices=None if inequalities is None else tuple(inequalities),
        family=family,
    )
    check_family_shape(player)
    return player


def _options(data):
    if not isinstance(data, dict):
        raise ProblemFileError("options must be an object")
    options = {}
    for key, value in data.items():
        if key not in OPTION_TYPES:
            raise ProblemFileError(f"Unknown option '{key}'. Known: {', '.join(sorted(OPTION_TYPES))}")
        cast = OPTION_TYPES[key]
        if cast is bool and not isinstance(value, bool):
            raise ProblemFileError(f"Option '{key}' must be true or false")
        try:
            options[key] = cast(value)
        except (TypeError, ValueError):
            raise ProblemFileError(f"Option '{key}' must be {cast.__name__}") from None
    return options


def parse_problem_file(text, check_multipliers=True):
    """
    Parse a problem file into a validated game and its option overrides.

    With check_multipliers, G_i is sampled for rank deficiency and custom
    multiplier expressions are checked numerically.

    Raises:
        ProblemFileError: Syntax errors (with line and column) and format errors
        LocalityError: A constraint that involves rival variables
        FamilyError: Unknown family, inconsistent constraint tags, or constraints
            that do not match a built-in family
        MultiplierError: Custom multiplier expressions that contradict a KKT point
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ProblemFileError("A problem file must be a JSON object")
    version = data.get('version')
    if version != FORMAT_VERSION:
        raise ProblemFileError(f"Unsupported problem file version {version!r}, expected {FORMAT_VERSION}")
    players = data.get('players')
    if not isinstance(players, list) or not players:
        raise ProblemFileError("'players' must be a non-empty list")
    try:
        layout = BlockLayout([int(p['n']) for p in players])
    except (KeyError, TypeError, ValueError):
        raise ProblemFileError("Every player needs a positive integer 'n'") from None
    if any(width < 1 for width in layout):
        raise ProblemFileError("Every player needs a positive integer 'n'")

    nep = NepProblem(
        players=tuple(_player(i, p, layout) for i, p in enumerate(players)),
        name=str(data.get('name', '')),
    )
    if check_multipliers:
        validate_multipliers(nep)
    return ProblemFile(nep=nep, options=_options(data.get('options', {})), version=version)


def parse_problem(text):
    """Parse a problem file and return its NepProblem."""
    return parse_problem_file(text).nep


def _records(poly):
    return [[coef, exps] for coef, exps in poly.to_records()]


def _serialize_family(family):
    data = {'kind': family.kind.value}
    if family.kind == FamilyKind.BOX:
        if family.lower is not None:
            data['lower'] = list(family.lower)
        if family.upper is not None:
            data['upper'] = list(family.upper)
    if family.kind == FamilyKind.CUSTOM:
        data['multipliers'] = [_records(lam) for lam in family.multipliers]
    return data


def serialize_problem(nep, options=None):
    """Canonical problem file text for a game."""
    layout = nep.layout
    players = []
    for player in nep.players:
        players.append({
            'n': player.width,
            'objective': _records(player.objective),
            'family': _serialize_family(player.family),
            'constraints': [
                {
                    'kind': 'equality' if player.is_equality(j) else 'inequality',
                    'terms': _records(block_polynomial(g, player.index, layout)),
                }
                for j, g in enumerate(player.constraints)
            ],
        })
    data = {'version': FORMAT_VERSION, 'name': nep.name, 'players': players}
    if options:
        data['options'] = dict(sorted(options.items()))
    return json.dumps(data, indent=2) + '\n'
