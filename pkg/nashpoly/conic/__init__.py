from .backends import BACKENDS, get_backend, register_backend  # noqa: F401
from .embedded import EmbeddedSolver, validate_problem  # noqa: F401
from .models import (  # noqa: F401
    BackendUnavailableError,
    MalformedProblemError,
    SdpSolution,
    SolverStatus,
    SolverTolerances,
)
from .sdpa import SdpaImport, export_sdpa, read_sdpa  # noqa: F401
from .services import solve_sdp  # noqa: F401
