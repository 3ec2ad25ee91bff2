import numpy as np
import pytest

from oscillab.torus import ModularMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_modular(rng, n_factors=6, max_shear=3):
    """Random determinant-one integer matrix as a product of elementary shears."""
    result = ModularMatrix.identity()
    for _ in range(n_factors):
        k = int(rng.integers(-max_shear, max_shear + 1))
        if rng.random() < 0.5:
            result = result @ ModularMatrix(1, k, 0, 1)
        else:
            result = result @ ModularMatrix(1, 0, k, 1)
    return result
