import numpy as np
import pytest

from willmore import plane_immersion
from willmore.weierstrass import four_end_immersion


@pytest.fixture(scope="session")
def plane():
    return plane_immersion()


@pytest.fixture(scope="session")
def plane_at_origin():
    return plane_immersion(translation=(0.0, 0.0, 0.0))


@pytest.fixture(scope="session")
def four_end():
    return four_end_immersion()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
