from .models import PsdBlock, RelaxationOrderError, RelaxationSpec, SdpProblem  # noqa: F401
from .services import (  # noqa: F401
    assemble_relaxation,
    gen_theta,
    localizing_matrix,
    localizing_template,
    moment_matrix,
    theta_polynomial,
    theta_value,
)
