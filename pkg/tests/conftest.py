import json
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

ORACLES = os.path.join(os.path.dirname(__file__), "oracles", "frozen.json")


@pytest.fixture(scope="session")
def frozen():
    with open(ORACLES) as fh:
        return json.load(fh)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config._acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config._acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
