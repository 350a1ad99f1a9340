"""
Shared fixtures for the nashpoly test suite.
"""

import hypothesis
import numpy as np
import pytest

from nashpoly.equilibria import SolverOptions
from nashpoly.games import build_game

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)


@pytest.fixture
def options():
    """Default options with a fixed seed."""
    return SolverOptions(seed=0)


@pytest.fixture
def ball_duel():
    return build_game('ball_duel')
