import pytest

from framefree.core import RandomSource


@pytest.fixture
def rng():
    return RandomSource(seed=1234)
