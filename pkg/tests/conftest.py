import numpy as np
import pytest

from shallowpack.setsystem import SetSystem


def random_system(rng: np.random.Generator, n: int, m: int) -> SetSystem:
    """Random deduplicated system over [n] with at most m rows."""
    mat = rng.integers(0, 2, size=(m, n)).astype(bool)
    return SetSystem.from_bool_matrix(n, mat)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240731))
