import numpy as np
import pytest

import hyperflux as hf


@pytest.fixture(scope="session")
def mink3():
    return hf.minkowski(3)


@pytest.fixture(scope="session")
def mink4():
    return hf.minkowski(4)


@pytest.fixture(scope="session")
def conf3():
    return hf.conformal_test_metric(3)


@pytest.fixture(scope="session")
def conf4():
    return hf.conformal_test_metric(4)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
