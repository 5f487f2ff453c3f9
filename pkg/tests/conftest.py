import numpy as np
import pytest

import helpers
from fluxcav.core import CouplingGeometry
from fluxcav.sweep import DEFAULT_GEOMETRY, default_mode


@pytest.fixture(scope="session")
def qubit_s():
    return helpers.s_qubit()


@pytest.fixture(scope="session")
def mode1():
    return default_mode(1)


@pytest.fixture(scope="session")
def mode2():
    return default_mode(2)


@pytest.fixture(scope="session")
def mode3():
    return default_mode(3)


@pytest.fixture(scope="session")
def geometry() -> CouplingGeometry:
    return DEFAULT_GEOMETRY


@pytest.fixture(scope="session")
def group_s(mode3):
    return helpers.s_group(mode3)


@pytest.fixture(scope="session")
def setup_s(mode3):
    return helpers.s_setup(mode3)


@pytest.fixture(scope="session")
def flux_grid_s():
    return np.linspace(-0.02, 0.02, 2001)


@pytest.fixture(scope="session")
def trace_s(group_s, mode3, flux_grid_s):
    """Noise-free eight-qubit trace at the third mode."""
    return helpers.group_trace([group_s], mode3, flux_grid_s)
