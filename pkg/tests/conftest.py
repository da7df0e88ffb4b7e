import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)


def random_fitting_kernel(rng, shape, max_side=3):
    """Random kernel no larger than ``shape`` on either side."""
    m = int(rng.integers(1, min(max_side, shape[0]) + 1))
    n = int(rng.integers(1, min(max_side, shape[1]) + 1))
    return rng.normal(size=(m, n))
