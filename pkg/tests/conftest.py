import numpy as np
import pytest

import acceptance_log

from clustergauss import SqueezingSpec, SymplecticTarget, WeightConfig


@pytest.fixture
def unit_weights():
    return WeightConfig(1.0, 1.0, 1.0, 1.0)


@pytest.fixture
def strong_weights():
    """Asymmetric high-weight operating point used throughout the suite."""
    return WeightConfig(5.0, 5.0, 4.0, 4.0)


@pytest.fixture
def squeezing_15db():
    return SqueezingSpec.from_db(-15.0)


@pytest.fixture
def generic_target():
    a, b, c = 1.2, 0.5, 0.3
    return SymplecticTarget(a, b, c, (1.0 + b * c) / a)


def complete_target(a, b, c):
    """Symplectic target with d completed from the determinant."""
    return SymplecticTarget(float(a), float(b), float(c),
                            (1.0 + float(b) * float(c)) / float(a))


@pytest.fixture
def make_target():
    return complete_target


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_log.LINES:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
