import numpy as np
import pytest

from opfam.families import HGrid


@pytest.fixture(scope="session")
def grid():
    return HGrid()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
