import numpy as np
import pytest
from hypothesis import settings

from irig._kernels import HAVE_COMPILED
from irig.harness.generators import p2 as _p2

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

BACKENDS = ["python"] + (["compiled"] if HAVE_COMPILED else [])


@pytest.fixture
def p2():
    return _p2()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "PASS/FAIL AC<n> ..." line per acceptance criterion, filled in by
# tests/test_acceptance.py and echoed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: s.split()[1]):
            terminalreporter.write_line(line)
