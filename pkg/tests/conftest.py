import sys

import pytest
from hypothesis import HealthCheck, settings

from orlovkit import make_ring

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def ring_kx():
    return make_ring("Q", [("x", 1)])


def ring_p1():
    return make_ring("Q", [("x0", 1), ("x1", 1)])


def ring_u2():
    return make_ring("Q", [("u", 1)], ["u^2"])


def ring_node():
    return make_ring("Q", [("x", 1), ("y", 1)], ["x*y"])


def ring_x2t():
    return make_ring("Q", [("x", 0), ("T", 1)], ["x^2*T"])


@pytest.fixture(scope="session")
def kx():
    return ring_kx()


@pytest.fixture(scope="session")
def p1():
    return ring_p1()


@pytest.fixture(scope="session")
def u2():
    return ring_u2()


@pytest.fixture(scope="session")
def node():
    return ring_node()


@pytest.fixture(scope="session")
def x2t():
    return ring_x2t()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
