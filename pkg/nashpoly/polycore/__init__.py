from .models import (  # noqa: F401
    BlockLayout,
    DegreeOverflowError,
    DimensionError,
    InvalidPlayerError,
    MultiIndex,
    Polynomial,
    Tms,
)
from .services import (  # noqa: F401
    basis_index,
    basis_size,
    block_gradient,
    block_polynomial,
    evaluate,
    lift,
    monomial_basis,
    monomial_vector,
    pair,
    replace_block,
    restrict_rivals,
    rival_values,
)
