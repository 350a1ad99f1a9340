from .hierarchy import extract_atoms, is_certified, is_tight, moment_hierarchy, order_range  # noqa: F401
from .models import (  # noqa: F401
    CandidateCheck,
    CheckStatus,
    Equilibrium,
    InvalidOptionsError,
    LoopRecord,
    MasterResult,
    MasterStatus,
    NeReport,
    NeStatus,
    NextResult,
    NextStatus,
    PlayerCheck,
    SearchPhase,
    SearchTransitionError,
    SolverOptions,
)
from .search import (  # noqa: F401
    EquilibriumSearch,
    enumerate_nes,
    find_next_ne,
    find_one_ne,
    gate_value,
    random_game_smoke_test,
)
from .services import check_candidate, check_player, solve_master  # noqa: F401
