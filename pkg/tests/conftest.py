import math
import os
import sys

import pytest
from hypothesis import settings

from symik.kinmodel import builtin_robot
from symik.pipeline import solve

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

PUMA_SEED_DEG = (30, 50, 40, 45, 120, 60)


@pytest.fixture(scope="session")
def solved():
    """Solve each bundled robot once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = solve(builtin_robot(name))
        return cache[name]

    return get


@pytest.fixture
def puma_seed():
    return {f"th_{i + 1}": math.radians(v) for i, v in enumerate(PUMA_SEED_DEG)}


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
