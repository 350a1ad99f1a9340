from .catalog import ALIASES, GAMES, available_games, build_game, random_ball_quadratic  # noqa: F401
from .families import (  # noqa: F401
    canonical_constraints,
    check_family_shape,
    constraint_matrix,
    family_matrix,
    matrix_product,
)
from .models import (  # noqa: F401
    ConstraintFamily,
    FamilyError,
    FamilyKind,
    KktSystem,
    LocalityError,
    MultiplierCheck,
    MultiplierError,
    NepProblem,
    PlayerProblem,
)
from .services import (  # noqa: F401
    attach_cuts,
    check_sets,
    cut_polynomial,
    kkt_sets,
    multiplier_expressions,
    multiplier_values,
    nonsingularity_diagnostic,
    validate_multipliers,
    verify_custom_multipliers,
)
