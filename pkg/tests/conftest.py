import numpy as np
import pytest

from analasso import instances

ACCEPTANCE_LINES = []


def record_acceptance(label, ok, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def segment():
    return instances.segment_example()


@pytest.fixture
def strict():
    return instances.strictly_convex_example()


@pytest.fixture
def kernel_pb():
    return instances.kernel_example()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
