import os

import pytest
from hypothesis import HealthCheck, settings

from groupwl import catalog

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_NAMES = catalog.names(max_order=16)


@pytest.fixture(scope="session")
def small_groups():
    return catalog.groups(max_order=16)


@pytest.fixture
def d8():
    return catalog.get("D8")


@pytest.fixture
def q8():
    return catalog.get("Q8")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
