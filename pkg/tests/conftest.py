import numpy as np
import pytest

from optomech import normalize

from _support import fig3_system, fig5_system


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fig3_norm():
    return normalize(fig3_system())


@pytest.fixture
def fig5_norm():
    return normalize(fig5_system())
