import numpy as np
import pytest

from projres import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Kernel backend module; tests using it run once per available backend."""
    return kernels.get_backend(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_spd(rng, m, shift=None):
    g = rng.standard_normal((m, m))
    return g @ g.T + (m if shift is None else shift) * np.eye(m)


def random_regression(rng, n, d, noise=0.3):
    """Well-posed regression instance (X, Y)."""
    X = rng.standard_normal((n, d))
    Y = X @ rng.standard_normal(d) + noise * rng.standard_normal(n)
    return X, Y
