import numpy as np
import pytest
from hypothesis import settings, strategies as st

from bendix.polygon import SideLengths
from bendix.reconstruction import sample_polygon

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

GRID = [(1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (2, 7), (3, 8)]


def random_hermitian(d, rng):
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (Z + Z.conj().T)


def random_unit(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def polygon_for(m, n, seed):
    rng = np.random.default_rng([seed, m, n, 77])
    s = SideLengths(m, tuple(float(x) for x in rng.uniform(1.0, 1.5, n)))
    return sample_polygon(s, seed)


@st.composite
def grid_polygons(draw, grid=GRID):
    m, n = draw(st.sampled_from(grid))
    seed = draw(st.integers(min_value=0, max_value=10**6))
    return polygon_for(m, n, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
