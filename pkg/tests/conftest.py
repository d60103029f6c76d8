from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from toric_heights.formats import parse_fan_file

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


def load(name: str):
    return parse_fan_file(name)[0]


@pytest.fixture(scope="session")
def p1():
    return load("p1")


@pytest.fixture(scope="session")
def p2():
    return load("p2")


@pytest.fixture(scope="session")
def p1xp1():
    return load("p1xp1")


@pytest.fixture(scope="session")
def f1():
    return load("f1")


@pytest.fixture(scope="session")
def all_fans(p1, p2, p1xp1, f1):
    return {"p1": p1, "p2": p2, "p1xp1": p1xp1, "f1": f1}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
