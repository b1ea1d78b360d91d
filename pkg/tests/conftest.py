from fractions import Fraction

import pytest
from hypothesis import settings

from oltsp.model import Instance

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction


@pytest.fixture
def thm1_small():
    return Instance.from_events([(0, [1, F(-1, 1000)]), (2, [1])], label="thm1(x=1,y=1/1000)")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
