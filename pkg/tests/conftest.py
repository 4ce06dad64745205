import numpy as np
import pytest

from loewnerqc.beltrami import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1729)


@pytest.fixture
def small_region():
    """Cheap annulus region for verification runs inside unit tests."""
    return GridSpec(bands=((0.1, 0.95), (1.05, 2.0)), n_radii=16, n_angles=48)


def disk_points(rng, n, r_max=0.9):
    r = r_max * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
