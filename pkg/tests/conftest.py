import numpy as np
import pytest

from vecrad import DataSample


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def unit_rows(gen, N, d):
    x = gen.standard_normal((N, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def unit_sample(gen, N, d):
    return DataSample(unit_rows(gen, N, d))


def cycling_basis_sample(N, d):
    """Rows cycle through the standard basis: exactly whitened, unit norm."""
    assert N % d == 0
    return DataSample(np.tile(np.eye(d), (N // d, 1)))
