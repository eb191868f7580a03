# Shared fixtures for the fibercheck tests
# Fiber products are slow to build, so each one is built once per test module

import pytest

from fiber import analyze_pair, build_fiber
from semigroup import sg_from_generators


@pytest.fixture(scope="session")
def naturals():
    """The DVR k[[t]]"""
    return sg_from_generators([1])


@pytest.fixture(scope="session")
def cusp():
    return sg_from_generators([2, 3])


@pytest.fixture(scope="session")
def h345():
    return sg_from_generators([3, 4, 5])


@pytest.fixture(scope="session")
def h378():
    return sg_from_generators([3, 7, 8])


@pytest.fixture(scope="module")
def cusp_fiber(cusp):
    """k[[t^2,t^3]] x_k k[[s^2,s^3]]"""
    return build_fiber(cusp, cusp)


@pytest.fixture(scope="module")
def cusp_pair(cusp):
    return analyze_pair(cusp, cusp)


@pytest.fixture(scope="module")
def dvr_pair(naturals, h345):
    return analyze_pair(naturals, h345)
