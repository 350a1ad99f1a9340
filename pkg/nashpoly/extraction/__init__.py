from .models import FlatReport  # noqa: F401
from .services import (  # noqa: F401
    extract_minimizers,
    flat_truncation,
    mixture_weights,
    numeric_rank,
    refine_points,
    relift_residual,
    singular_values,
)
