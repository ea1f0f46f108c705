import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from abelianizer.abelian_gw import MemoStore
from abelianizer.partitions import BoxSpec

ACCEPTANCE_LINES = []


def record_acceptance(line: str):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def store():
    """One shared invariant cache; keys carry (k, n) so all targets coexist."""
    return MemoStore()


@pytest.fixture(scope="session")
def box24():
    return BoxSpec(2, 4)


@pytest.fixture(scope="session")
def box25():
    return BoxSpec(2, 5)


@pytest.fixture(scope="session")
def box36():
    return BoxSpec(3, 6)
