import numpy as np
import pytest

from sherlab import make_grid


@pytest.fixture
def grid():
    """Small uniform half-strip grid shared across module tests."""
    return make_grid(N_x=32, Z_max=20.0, N_z=161)


@pytest.fixture
def fine_grid():
    return make_grid(N_x=32, Z_max=40.0, N_z=801)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
