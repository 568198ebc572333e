import numpy as np
import pytest

from sparsethresh import (
    PartitionedDictionary,
    analyze,
    build_mub,
    build_two_onb,
)


@pytest.fixture(scope="session")
def mub3():
    return build_mub(3)


@pytest.fixture(scope="session")
def mub5():
    return build_mub(5)


@pytest.fixture(scope="session")
def mub7():
    return build_mub(7)


@pytest.fixture(scope="session")
def mub7_stats(mub7):
    return analyze(mub7)


@pytest.fixture(scope="session")
def two_onb4():
    return build_two_onb(4)


@pytest.fixture(scope="session")
def two_onb8():
    return build_two_onb(8)


@pytest.fixture(scope="session")
def identity110():
    # orthonormal columns, split 10 + 100: the zero-coherence reference profile
    return PartitionedDictionary(np.eye(110), 10)
