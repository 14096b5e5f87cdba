import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from codedmm.field import PrimeField

GF7 = PrimeField(7)
GF257 = PrimeField(257)
GF65537 = PrimeField(65537)


@pytest.fixture
def rng():
    """Seeded stdlib generator; reseeded per test for isolation."""
    return random.Random(0xC0DED)


@pytest.fixture
def gf7():
    return GF7


@pytest.fixture
def gf257():
    return GF257


@pytest.fixture
def gf65537():
    return GF65537
