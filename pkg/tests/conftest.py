import math

import pytest

from pitheorem.dimcore import MKS_BASIS, Dimension
from pitheorem.pengine import DimensionProblem, Variable

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = []


def mks(*exps):
    return Dimension(exps, MKS_BASIS)


def pendulum_F(v):
    m, l, g = v
    return 2 * math.pi * math.sqrt(l / g)


def atwood_F(v):
    m1, m2, h, g = v
    return math.sqrt(2 * g * h * abs(m1 - m2) / (m1 + m2))


def atwood_G(z):
    return math.sqrt(2 * abs(z - 1) / (z + 1))


@pytest.fixture
def pendulum():
    return DimensionProblem(
        (Variable("m", mks(0, 1, 0)), Variable("l", mks(1, 0, 0)), Variable("g", mks(1, 0, -2))),
        Variable("T", mks(0, 0, 1)),
        pendulum_F,
    )


@pytest.fixture
def atwood():
    return DimensionProblem(
        (
            Variable("m1", mks(0, 1, 0)),
            Variable("m2", mks(0, 1, 0)),
            Variable("h", mks(1, 0, 0)),
            Variable("g", mks(1, 0, -2)),
        ),
        Variable("v", mks(1, 0, -1)),
        atwood_F,
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
