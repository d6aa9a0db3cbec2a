import numpy as np
import pytest

import airylab as al


@pytest.fixture
def critical6():
    return al.make_exponents(6.0, 1.0 / 6.0)


@pytest.fixture
def critical8():
    return al.make_exponents(8.0, 1.0 / 8.0)


@pytest.fixture
def gauss_profile():
    return al.gaussian_profile(al.symmetric_grid(8.0, 1025))


@pytest.fixture
def small_st_grid():
    return al.SpaceTimeGrid(-1.0, 1.0, 65, -8.0, 8.0, 129)


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
