import pytest

from recoilshift.config import build_config
from recoilshift.dynamics import FountainTiming


@pytest.fixture(scope="session")
def timing():
    return FountainTiming(0.15, 0.5, 0.8)


@pytest.fixture(scope="session")
def standard():
    return build_config({})


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
