import random

import pytest

from entrokit.catalog import ideal_gas, two_level_spin
from entrokit.reservoir import Reservoir, reference_reservoir


@pytest.fixture(scope="session")
def gas():
    return ideal_gas()


@pytest.fixture(scope="session")
def spin():
    return two_level_spin()


@pytest.fixture(scope="session")
def gas_rel(gas):
    return gas.relation()


@pytest.fixture()
def rng():
    return random.Random(12345)


@pytest.fixture()
def r300():
    return Reservoir(id="r300", temperature=300.0)


@pytest.fixture()
def r0():
    return reference_reservoir()
