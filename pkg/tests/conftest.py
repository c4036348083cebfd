import os
import random
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.curves import build_curve
from core.fields import PrimeField


@pytest.fixture(scope="session")
def F101():
    return PrimeField(101)


@pytest.fixture(scope="session")
def twisted_cubic(F101):
    return build_curve("twisted-cubic", F101)


@pytest.fixture(scope="session")
def elliptic_quartic(F101):
    return build_curve("elliptic-quartic", F101)


@pytest.fixture(scope="session")
def rational_quartic(F101):
    return build_curve("rational-quartic", F101)


@pytest.fixture
def rng():
    return random.Random(20240611)
