import numpy as np
import pytest

from emergent_numerals.core import NeedPrior, NumberLine


@pytest.fixture
def line():
    return NumberLine()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def uniform20():
    return NeedPrior(np.full(20, 0.05))
